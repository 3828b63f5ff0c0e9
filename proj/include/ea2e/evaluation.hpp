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

// Argument scoring: Identification and Classification F1 under Head match
// (predicted head index equals a gold head index) and Coref match (credit
// extends to any mention of the gold argument's entity cluster). Matching is
// one-to-one per event — greedy in role-then-position order, completed to a
// maximum bipartite matching — and micro-averaged over the corpus.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ea2e/common.hpp"
#include "ea2e/corpus.hpp"

namespace ea2e {

enum class Task { kIdentification, kClassification };
enum class Match { kHead, kCoref };

inline const char* task_name(Task t) {
  return t == Task::kIdentification ? "identification" : "classification";
}
inline const char* match_name(Match m) {
  return m == Match::kHead ? "head" : "coref";
}

// Annotated head index, or the last token of the span.
inline std::size_t head_of(const Span& span) {
  return span.head ? *span.head : span.end - 1;
}

inline std::size_t head_of(const Span& span, const Document& doc) {
  if (span.start >= span.end || span.end > doc.tokens.size()) {
    throw ValidationError(msg("document '", doc.doc_id,
                              "': span out of bounds [", span.start, ", ",
                              span.end, ")"));
  }
  return head_of(span);
}

struct CellScore {
  std::size_t predicted = 0;
  std::size_t gold = 0;
  std::size_t matched = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;

  friend bool operator==(const CellScore&, const CellScore&) = default;
};

struct ScoreReport {
  CellScore head_identification;
  CellScore head_classification;
  CellScore coref_identification;
  CellScore coref_classification;

  friend bool operator==(const ScoreReport&, const ScoreReport&) = default;

  const CellScore& cell(Task task, Match match) const {
    if (match == Match::kHead) {
      return task == Task::kIdentification ? head_identification
                                           : head_classification;
    }
    return task == Task::kIdentification ? coref_identification
                                         : coref_classification;
  }

  CellScore& cell(Task task, Match match) {
    return const_cast<CellScore&>(
        static_cast<const ScoreReport*>(this)->cell(task, match));
  }
};

using EventAssignments = std::map<std::string, std::vector<RoleAssignment>>;

// Gold arguments of every event across the corpus, the reference side for
// score(). Event ids must be globally unique.
inline EventAssignments gold_assignments_map(const std::vector<Document>& docs) {
  EventAssignments out;
  for (const auto& doc : docs) {
    for (const auto& event : doc.events) {
      if (!out.emplace(event.event_id, event.gold_args).second) {
        throw ValidationError(msg("event id '", event.event_id,
                                  "' appears in multiple documents"));
      }
    }
  }
  return out;
}

namespace detail {

// event id → owning document, for cluster and head lookups.
inline std::map<std::string, const Document*> document_index(
    const std::vector<Document>& docs) {
  std::map<std::string, const Document*> index;
  for (const auto& doc : docs) {
    for (const auto& event : doc.events) {
      if (!index.emplace(event.event_id, &doc).second) {
        throw ValidationError(msg("event id '", event.event_id,
                                  "' appears in multiple documents"));
      }
    }
  }
  return index;
}

inline bool spans_match(const Span& pred, const RoleAssignment& gold,
                        const Document& doc, Match match) {
  const std::size_t pred_head = head_of(pred);
  if (pred_head == head_of(gold.span)) return true;
  if (match == Match::kCoref && gold.entity_id) {
    if (const EntityCluster* cluster = doc.cluster_by_id(*gold.entity_id)) {
      for (const auto& member : cluster->member_spans) {
        if (head_of(member) == pred_head) return true;
      }
    }
  }
  return false;
}

inline bool argument_matches(const RoleAssignment& pred,
                             const RoleAssignment& gold, const Document& doc,
                             Task task, Match match) {
  if (task == Task::kClassification && pred.role != gold.role) return false;
  return spans_match(pred.span, gold, doc, match);
}

// Kuhn's augmenting-path step: tries to (re)assign prediction p.
inline bool try_assign(std::size_t p,
                       const std::vector<std::vector<char>>& edges,
                       std::vector<char>* visited,
                       std::vector<std::optional<std::size_t>>* gold_owner) {
  for (std::size_t g = 0; g < edges[p].size(); ++g) {
    if (!edges[p][g] || (*visited)[g]) continue;
    (*visited)[g] = 1;
    if (!(*gold_owner)[g] ||
        try_assign(*(*gold_owner)[g], edges, visited, gold_owner)) {
      (*gold_owner)[g] = p;
      return true;
    }
  }
  return false;
}

// One-to-one maximum matching between predictions and golds of one event.
// Seeded greedily in role-then-position order, then completed with
// augmenting paths, so the matched count is maximum.
inline std::size_t event_matched_count(std::vector<RoleAssignment> preds,
                                       std::vector<RoleAssignment> golds,
                                       const Document& doc, Task task,
                                       Match match) {
  std::stable_sort(preds.begin(), preds.end());
  std::stable_sort(golds.begin(), golds.end());
  std::vector<std::vector<char>> edges(
      preds.size(), std::vector<char>(golds.size(), 0));
  for (std::size_t p = 0; p < preds.size(); ++p) {
    for (std::size_t g = 0; g < golds.size(); ++g) {
      edges[p][g] = argument_matches(preds[p], golds[g], doc, task, match);
    }
  }
  std::vector<std::optional<std::size_t>> gold_owner(golds.size());
  std::vector<char> pred_matched(preds.size(), 0);
  for (std::size_t p = 0; p < preds.size(); ++p) {
    for (std::size_t g = 0; g < golds.size(); ++g) {
      if (edges[p][g] && !gold_owner[g]) {
        gold_owner[g] = p;
        pred_matched[p] = 1;
        break;
      }
    }
  }
  for (std::size_t p = 0; p < preds.size(); ++p) {
    if (pred_matched[p]) continue;
    std::vector<char> visited(golds.size(), 0);
    try_assign(p, edges, &visited, &gold_owner);
  }
  std::size_t matched = 0;
  for (const auto& owner : gold_owner) {
    if (owner) ++matched;
  }
  return matched;
}

inline void finalize(CellScore* cell) {
  cell->precision = cell->predicted == 0
                        ? 0.0
                        : static_cast<double>(cell->matched) /
                              static_cast<double>(cell->predicted);
  cell->recall = cell->gold == 0 ? 0.0
                                 : static_cast<double>(cell->matched) /
                                       static_cast<double>(cell->gold);
  const double pr = cell->precision + cell->recall;
  cell->f1 = pr > 0 ? 2.0 * cell->precision * cell->recall / pr : 0.0;
}

}  // namespace detail

// Micro-averaged score for one (task, match) cell over all events in `gold`.
// Every predicted event id must appear in `gold`; events without predictions
// count against recall only.
inline CellScore score(const EventAssignments& pred,
                       const EventAssignments& gold,
                       const std::vector<Document>& docs, Task task,
                       Match match) {
  const auto index = detail::document_index(docs);
  for (const auto& [event_id, args] : pred) {
    if (!gold.count(event_id)) {
      throw ValidationError(
          msg("prediction for unknown event id '", event_id, "'"));
    }
  }
  CellScore cell;
  for (const auto& [event_id, gold_args] : gold) {
    auto doc_it = index.find(event_id);
    if (doc_it == index.end()) {
      throw ValidationError(
          msg("event id '", event_id, "' not found in any document"));
    }
    auto pred_it = pred.find(event_id);
    const std::vector<RoleAssignment> no_preds;
    const auto& pred_args = pred_it == pred.end() ? no_preds : pred_it->second;
    cell.predicted += pred_args.size();
    cell.gold += gold_args.size();
    cell.matched += detail::event_matched_count(pred_args, gold_args,
                                                *doc_it->second, task, match);
  }
  detail::finalize(&cell);
  return cell;
}

inline ScoreReport score_all(const EventAssignments& pred,
                             const EventAssignments& gold,
                             const std::vector<Document>& docs) {
  ScoreReport report;
  for (Task task : {Task::kIdentification, Task::kClassification}) {
    for (Match match : {Match::kHead, Match::kCoref}) {
      report.cell(task, match) = score(pred, gold, docs, task, match);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Consistency diagnostic

struct RoleProfile {
  std::string entity_id;
  std::map<std::string, std::size_t> role_counts;
  std::size_t events = 0;  // distinct events the entity fills a role in

  friend bool operator==(const RoleProfile&, const RoleProfile&) = default;
};

struct ConsistencyReport {
  double threshold = 1.0;
  std::size_t entities_considered = 0;  // entities arguing in ≥ 2 events
  std::size_t entities_majority = 0;    // with majority role share ≥ threshold
  double summary = 1.0;                 // majority fraction; 1.0 when vacuous
  std::map<std::string, std::vector<RoleProfile>> per_document;
};

// Descriptive cross-event role-consistency profile of predicted assignments.
// A predicted span is attributed to the first gold cluster containing a
// member with the same head; entities filling roles in at least two events
// contribute a profile.
inline ConsistencyReport consistency_report(const EventAssignments& pred,
                                            const std::vector<Document>& docs,
                                            double threshold = 1.0) {
  ConsistencyReport report;
  report.threshold = threshold;
  for (const auto& doc : docs) {
    struct Tally {
      std::map<std::string, std::size_t> role_counts;
      std::set<std::string> event_ids;
    };
    std::map<std::string, Tally> tallies;  // entity id → tally
    for (const auto& event : doc.events) {
      auto it = pred.find(event.event_id);
      if (it == pred.end()) continue;
      for (const auto& arg : it->second) {
        const std::size_t head = head_of(arg.span);
        const EntityCluster* owner = nullptr;
        for (const auto& cluster : doc.clusters) {
          for (const auto& member : cluster.member_spans) {
            if (head_of(member) == head) {
              owner = &cluster;
              break;
            }
          }
          if (owner) break;
        }
        if (!owner) continue;
        Tally& tally = tallies[owner->entity_id];
        ++tally.role_counts[arg.role];
        tally.event_ids.insert(event.event_id);
      }
    }
    std::vector<RoleProfile> profiles;
    for (const auto& [entity_id, tally] : tallies) {
      if (tally.event_ids.size() < 2) continue;
      RoleProfile profile;
      profile.entity_id = entity_id;
      profile.role_counts = tally.role_counts;
      profile.events = tally.event_ids.size();
      std::size_t total = 0;
      std::size_t top = 0;
      for (const auto& [role, count] : profile.role_counts) {
        total += count;
        top = std::max(top, count);
      }
      ++report.entities_considered;
      if (total > 0 &&
          static_cast<double>(top) / static_cast<double>(total) >= threshold) {
        ++report.entities_majority;
      }
      profiles.push_back(std::move(profile));
    }
    if (!profiles.empty()) {
      report.per_document[doc.doc_id] = std::move(profiles);
    }
  }
  report.summary = report.entities_considered == 0
                       ? 1.0
                       : static_cast<double>(report.entities_majority) /
                             static_cast<double>(report.entities_considered);
  return report;
}

}  // namespace ea2e
