// Copyright 2026 The ea2e Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Context self-augmentation: wraps the target event's trigger in <trg>
// markers and inserts <tag> Role </tag> annotations directly before the
// spans of arguments belonging to neighboring events.
//
// The neighborhood of an event contains every other event whose trigger
// start lies strictly within a token window of the target's trigger start.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ea2e/common.hpp"
#include "ea2e/corpus.hpp"
#include "ea2e/tokens.hpp"

namespace ea2e {

inline constexpr std::size_t kDefaultNeighborWindow = 40;

struct Neighborhood {
  std::string target_event;
  std::vector<std::string> neighbor_ids;  // distance ascending, ties doc order
  std::size_t window = kDefaultNeighborWindow;

  friend bool operator==(const Neighborhood&, const Neighborhood&) = default;
};

// Per-event argument assignments (gold at training time, predicted during
// iterative inference).
using AssignmentsMap = std::map<std::string, std::vector<RoleAssignment>>;

// Neighbors of `target`: every other event with trigger distance strictly
// below `window`, ordered by distance ascending, ties by document order.
inline Neighborhood neighbors(const Document& doc, const std::string& target,
                              std::size_t window = kDefaultNeighborWindow) {
  const auto& target_event = doc.event_by_id(target);
  std::vector<std::pair<std::size_t, std::string>> found;
  for (const auto& ev : doc.events) {
    if (ev.event_id == target) continue;
    const std::size_t a = target_event.trigger.start;
    const std::size_t b = ev.trigger.start;
    const std::size_t dist = a > b ? a - b : b - a;
    if (dist < window) found.emplace_back(dist, ev.event_id);
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  Neighborhood nb;
  nb.target_event = target;
  nb.window = window;
  for (auto& [dist, id] : found) nb.neighbor_ids.push_back(std::move(id));
  return nb;
}

// An event-specific view of the document: the token sequence with markers
// inserted, a map from each augmented position back to the original token
// index (empty for inserted markers), and the annotations actually placed.
struct AugmentedContext {
  std::string doc_id;
  std::string event_id;
  std::vector<std::string> tokens;
  std::vector<std::optional<std::size_t>> offset_map;
  std::vector<std::pair<std::string, Span>> tagged_roles;  // insertion order

  friend bool operator==(const AugmentedContext&,
                         const AugmentedContext&) = default;

  // Translates a span over augmented tokens into document coordinates.
  // Fails (nullopt) when the range covers any inserted marker token.
  std::optional<Span> to_document_span(std::size_t start,
                                       std::size_t end) const {
    if (start >= end || end > tokens.size()) return std::nullopt;
    for (std::size_t i = start; i < end; ++i) {
      if (!offset_map[i]) return std::nullopt;
    }
    return Span{*offset_map[start], *offset_map[end - 1] + 1, std::nullopt};
  }

  // Augmented position of an original token index.
  std::optional<std::size_t> from_document_index(std::size_t orig) const {
    for (std::size_t i = 0; i < offset_map.size(); ++i) {
      if (offset_map[i] && *offset_map[i] == orig) return i;
    }
    return std::nullopt;
  }
};

namespace detail {

inline bool is_reserved_token(const std::string& t) {
  return t == kTagOpen || t == kTagClose || t == kTriggerMark;
}

inline void check_no_reserved(const Document& doc) {
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    if (is_reserved_token(doc.tokens[i])) {
      throw ValidationError(msg("document '", doc.doc_id,
                                "' contains reserved marker token '",
                                doc.tokens[i], "' at position ", i));
    }
  }
}

struct Insertion {
  std::size_t pos = 0;       // insert before original token index `pos`
  int priority = 0;          // 0 trigger-close, 1 tag, 2 trigger-open
  std::size_t distance = 0;  // neighbor distance (tags only)
  std::string role;          // tag role (tags only)
  Span span;                 // tagged span (tags only)
  std::vector<std::string> tokens;
};

}  // namespace detail

// Builds the augmented context for the neighborhood's target: <trg> on both
// sides of the trigger, and for every assignment of every neighbor a
// <tag> Role </tag> annotation before the assigned span. One tag pair is
// inserted per assignment — two neighbors tagging the same span stack two
// pairs. Annotations landing on one position are ordered by neighbor
// distance, then role name; a trigger-close marker at the same position
// precedes annotations, a trigger-open marker follows them (staying adjacent
// to the trigger token). The target's own arguments are never tagged.
inline AugmentedContext augment(const Document& doc, const std::string& target,
                                const AssignmentsMap& assignments,
                                const Neighborhood& neighborhood) {
  detail::check_no_reserved(doc);
  if (neighborhood.target_event != target) {
    throw ValidationError(msg("neighborhood built for event '",
                              neighborhood.target_event,
                              "' used to augment event '", target, "'"));
  }
  const auto& target_event = doc.event_by_id(target);
  const std::size_t n = doc.tokens.size();
  if (target_event.trigger.end > n ||
      target_event.trigger.start >= target_event.trigger.end) {
    throw ValidationError(msg("document '", doc.doc_id, "': event '", target,
                              "' trigger span out of bounds [",
                              target_event.trigger.start, ", ",
                              target_event.trigger.end, ")"));
  }

  std::vector<detail::Insertion> inserts;
  inserts.push_back(
      {target_event.trigger.start, 2, 0, "", Span{}, {kTriggerMark}});
  inserts.push_back(
      {target_event.trigger.end, 0, 0, "", Span{}, {kTriggerMark}});

  for (const auto& neighbor_id : neighborhood.neighbor_ids) {
    auto it = assignments.find(neighbor_id);
    if (it == assignments.end()) {
      throw ValidationError(msg("no assignments provided for neighbor '",
                                neighbor_id, "' of event '", target, "'"));
    }
    const std::size_t distance = token_distance(doc, target, neighbor_id);
    for (const auto& arg : it->second) {
      if (arg.role.empty()) {
        throw ValidationError(msg("document '", doc.doc_id,
                                  "': empty role in assignment of neighbor '",
                                  neighbor_id, "'"));
      }
      if (arg.span.end > n || arg.span.start >= arg.span.end) {
        throw ValidationError(msg("document '", doc.doc_id, "': assignment '",
                                  arg.role, "' of neighbor '", neighbor_id,
                                  "' span out of bounds [", arg.span.start,
                                  ", ", arg.span.end, ")"));
      }
      detail::Insertion ins;
      ins.pos = arg.span.start;
      ins.priority = 1;
      ins.distance = distance;
      ins.role = arg.role;
      ins.span = arg.span;
      ins.tokens.push_back(kTagOpen);
      for (auto& w : split_whitespace(arg.role)) ins.tokens.push_back(w);
      ins.tokens.push_back(kTagClose);
      inserts.push_back(std::move(ins));
    }
  }

  std::stable_sort(inserts.begin(), inserts.end(),
                   [](const detail::Insertion& a, const detail::Insertion& b) {
                     if (a.pos != b.pos) return a.pos < b.pos;
                     if (a.priority != b.priority) return a.priority < b.priority;
                     if (a.distance != b.distance) return a.distance < b.distance;
                     return a.role < b.role;
                   });

  AugmentedContext ctx;
  ctx.doc_id = doc.doc_id;
  ctx.event_id = target;
  std::size_t next = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    while (next < inserts.size() && inserts[next].pos == i) {
      for (const auto& t : inserts[next].tokens) {
        ctx.tokens.push_back(t);
        ctx.offset_map.push_back(std::nullopt);
      }
      if (inserts[next].priority == 1) {
        ctx.tagged_roles.emplace_back(inserts[next].role, inserts[next].span);
      }
      ++next;
    }
    if (i < n) {
      ctx.tokens.push_back(doc.tokens[i]);
      ctx.offset_map.push_back(i);
    }
  }
  return ctx;
}

// The unaugmented view still marks the target trigger; only neighbor
// annotations are absent.
inline AugmentedContext regular_context(const Document& doc,
                                        const std::string& target) {
  Neighborhood empty;
  empty.target_event = target;
  return augment(doc, target, {}, empty);
}

// Gold arguments of every event, keyed by event id (training-time
// assignments for augment()).
inline AssignmentsMap gold_assignments(const Document& doc) {
  AssignmentsMap out;
  for (const auto& ev : doc.events) out[ev.event_id] = ev.gold_args;
  return out;
}

// Removes every marker inserted by augment(), recovering the original token
// sequence. Rejects malformed input: a <tag> without its </tag>, a nested or
// stray tag marker, or an odd number of <trg> markers.
inline std::vector<std::string> strip_tags(
    const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  std::size_t trigger_marks = 0;
  for (std::size_t i = 0; i < tokens.size();) {
    const std::string& t = tokens[i];
    if (t == kTagOpen) {
      std::size_t j = i + 1;
      while (j < tokens.size() && tokens[j] != kTagClose) {
        if (tokens[j] == kTagOpen) {
          throw ValidationError(msg("nested '", kTagOpen, "' at position ", j));
        }
        ++j;
      }
      if (j >= tokens.size()) {
        throw ValidationError(msg("unclosed '", kTagOpen, "' at position ", i));
      }
      i = j + 1;
    } else if (t == kTagClose) {
      throw ValidationError(msg("stray '", kTagClose, "' at position ", i));
    } else if (t == kTriggerMark) {
      ++trigger_marks;
      ++i;
    } else {
      out.push_back(t);
      ++i;
    }
  }
  if (trigger_marks % 2 != 0) {
    throw ValidationError(
        msg("odd number of '", kTriggerMark, "' markers (", trigger_marks, ")"));
  }
  return out;
}

inline std::vector<std::string> strip_tags(const AugmentedContext& ctx) {
  return strip_tags(ctx.tokens);
}

}  // namespace ea2e
