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

// Template machinery for conditional generation: assembling the model input
// sequence, substituting argument fills into a template, and parsing a
// generated filled template back into per-role fills.
//
// The parser is total: malformed generations never throw; missing or
// unattributable material is reported through diagnostics instead.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ea2e/common.hpp"
#include "ea2e/corpus.hpp"
#include "ea2e/ontology.hpp"
#include "ea2e/tokens.hpp"

namespace ea2e {

// Model input: <s> template </s> </s> context </s>, with the two content
// regions tracked by index.
struct InputSequence {
  std::vector<std::string> tokens;
  std::size_t template_begin = 0;
  std::size_t template_end = 0;
  std::size_t context_begin = 0;
  std::size_t context_end = 0;

  friend bool operator==(const InputSequence&, const InputSequence&) = default;
};

inline InputSequence build_input(const std::vector<std::string>& template_tokens,
                                 const std::vector<std::string>& context_tokens) {
  InputSequence seq;
  seq.tokens.push_back(kSeqStart);
  seq.template_begin = seq.tokens.size();
  seq.tokens.insert(seq.tokens.end(), template_tokens.begin(),
                    template_tokens.end());
  seq.template_end = seq.tokens.size();
  seq.tokens.push_back(kSeqEnd);
  seq.tokens.push_back(kSeqEnd);
  seq.context_begin = seq.tokens.size();
  seq.tokens.insert(seq.tokens.end(), context_tokens.begin(),
                    context_tokens.end());
  seq.context_end = seq.tokens.size();
  seq.tokens.push_back(kSeqEnd);
  return seq;
}

// Token range [begin, end) of one argument fill inside a filled template.
struct FillRange {
  std::string role;
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const FillRange&, const FillRange&) = default;
};

// A filled template. Unfilled slots keep the literal <arg> placeholder and
// appear in slot_fills as the single fill {"<arg>"}; multiple fills for one
// slot are joined by "and" in the token sequence. fill_ranges covers actual
// argument content only (placeholders and joins excluded).
struct FilledTemplate {
  std::string event_type;
  std::vector<std::string> tokens;
  std::map<std::string, std::vector<std::vector<std::string>>> slot_fills;
  std::vector<FillRange> fill_ranges;

  friend bool operator==(const FilledTemplate&, const FilledTemplate&) = default;
};

using RoleFills = std::map<std::string, std::vector<std::vector<std::string>>>;

inline bool is_unfilled(const std::vector<std::vector<std::string>>& fills) {
  return fills.size() == 1 && fills[0].size() == 1 &&
         fills[0][0] == kArgPlaceholder;
}

// Substitutes fills into the template. Roles absent from `role_fills` (or
// mapped to an empty list) keep their placeholder; a role not present in the
// template, or an empty fill, is an error.
inline FilledTemplate fill_template(const EventTemplate& tpl,
                                    const RoleFills& role_fills) {
  for (const auto& [role, fills] : role_fills) {
    if (std::find(tpl.roles.begin(), tpl.roles.end(), role) == tpl.roles.end()) {
      throw ValidationError(msg("role '", role, "' not in template for '",
                                tpl.event_type, "'"));
    }
    for (const auto& fill : fills) {
      if (fill.empty()) {
        throw ValidationError(
            msg("empty fill for role '", role, "' in template for '",
                tpl.event_type, "'"));
      }
    }
  }

  FilledTemplate out;
  out.event_type = tpl.event_type;
  for (const auto& tok : tpl.tokens) {
    if (!tok.is_placeholder) {
      out.tokens.push_back(tok.text);
      continue;
    }
    auto it = role_fills.find(tok.role);
    if (it == role_fills.end() || it->second.empty()) {
      out.tokens.push_back(kArgPlaceholder);
      out.slot_fills[tok.role] = {{kArgPlaceholder}};
      continue;
    }
    const auto& fills = it->second;
    for (std::size_t f = 0; f < fills.size(); ++f) {
      if (f > 0) out.tokens.push_back(kFillJoin);
      FillRange range{tok.role, out.tokens.size(), 0};
      out.tokens.insert(out.tokens.end(), fills[f].begin(), fills[f].end());
      range.end = out.tokens.size();
      out.fill_ranges.push_back(std::move(range));
    }
    out.slot_fills[tok.role] = fills;
  }
  return out;
}

// Fills drawn from an event's gold arguments, per role in document order.
inline RoleFills gold_role_fills(const Document& doc, const EventMention& event) {
  std::vector<RoleAssignment> args = event.gold_args;
  std::stable_sort(args.begin(), args.end(),
                   [](const RoleAssignment& a, const RoleAssignment& b) {
                     return a.span < b.span;
                   });
  RoleFills fills;
  for (const auto& arg : args) {
    fills[arg.role].push_back(span_tokens(doc, arg.span));
  }
  return fills;
}

struct ParseResult {
  FilledTemplate filled;
  bool clean = true;
  std::vector<std::string> diagnostics;
};

namespace detail {

// Earliest occurrence of `needle` in `haystack` at or after `from`.
inline std::optional<std::size_t> find_from(
    const std::vector<std::string>& haystack,
    const std::vector<std::string>& needle, std::size_t from) {
  if (needle.empty()) return from <= haystack.size() ? std::optional(from)
                                                     : std::nullopt;
  if (needle.size() > haystack.size()) return std::nullopt;
  for (std::size_t i = from; i + needle.size() <= haystack.size(); ++i) {
    bool hit = true;
    for (std::size_t j = 0; j < needle.size(); ++j) {
      if (haystack[i + j] != needle[j]) {
        hit = false;
        break;
      }
    }
    if (hit) return i;
  }
  return std::nullopt;
}

// Interprets the output region [begin, end) claimed by one placeholder.
inline void parse_region(const std::vector<std::string>& output,
                         std::size_t begin, std::size_t end,
                         const std::string& role, ParseResult* result) {
  auto& fills = result->filled.slot_fills[role];
  if (end - begin == 1 && output[begin] == kArgPlaceholder) {
    fills = {{kArgPlaceholder}};
    return;
  }
  if (begin == end) {
    fills = {{kArgPlaceholder}};
    result->clean = false;
    result->diagnostics.push_back(msg("empty fill region for role '", role, "'"));
    return;
  }
  std::vector<std::vector<std::string>> parts;
  std::vector<std::pair<std::size_t, std::size_t>> part_ranges;
  std::vector<std::string> current;
  std::size_t current_begin = begin;
  auto flush = [&](std::size_t at) {
    if (current.empty()) {
      result->clean = false;
      result->diagnostics.push_back(
          msg("empty conjunct in fill for role '", role, "'"));
    } else {
      parts.push_back(current);
      part_ranges.emplace_back(current_begin, at);
    }
    current.clear();
  };
  for (std::size_t i = begin; i < end; ++i) {
    if (output[i] == kFillJoin) {
      flush(i);
      current_begin = i + 1;
    } else if (output[i] == kArgPlaceholder) {
      result->clean = false;
      result->diagnostics.push_back(
          msg("placeholder mixed into fill for role '", role, "'"));
      if (current.empty()) current_begin = i + 1;
    } else {
      current.push_back(output[i]);
    }
  }
  flush(end);
  if (parts.empty()) {
    fills = {{kArgPlaceholder}};
    result->clean = false;
    result->diagnostics.push_back(msg("no usable fill for role '", role, "'"));
    return;
  }
  fills = parts;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    // Tighten the recorded range to the actual part tokens (placeholders may
    // have been dropped at the edges).
    std::size_t b = part_ranges[i].first;
    std::size_t e = part_ranges[i].second;
    while (b < e && (output[b] == kArgPlaceholder)) ++b;
    while (e > b && (output[e - 1] == kArgPlaceholder)) --e;
    result->filled.fill_ranges.push_back({role, b, e});
  }
}

}  // namespace detail

// Parses a generated token sequence against its unfilled template by locating
// each literal segment left to right at its earliest position; the material
// between consecutive segments is credited to the placeholder separating
// them. Always returns; any deviation from a well-formed filled template
// lowers `clean` and adds a diagnostic.
inline ParseResult parse_filled(const EventTemplate& tpl,
                                const std::vector<std::string>& output) {
  ParseResult result;
  result.filled.event_type = tpl.event_type;
  result.filled.tokens = output;

  // Split the template into the leading literal segment and, per placeholder,
  // the literal segment that follows it.
  std::vector<std::string> leading;
  std::vector<std::string> roles;
  std::vector<std::vector<std::string>> trailing;
  for (const auto& tok : tpl.tokens) {
    if (tok.is_placeholder) {
      roles.push_back(tok.role);
      trailing.emplace_back();
    } else if (roles.empty()) {
      leading.push_back(tok.text);
    } else {
      trailing.back().push_back(tok.text);
    }
  }

  std::size_t pos = 0;
  bool lost_anchor = false;
  if (!leading.empty()) {
    auto p = detail::find_from(output, leading, 0);
    if (!p) {
      result.clean = false;
      result.diagnostics.push_back(
          msg("literal segment '", join_tokens(leading, " "), "' not found"));
      lost_anchor = true;
    } else {
      if (*p != 0) {
        result.clean = false;
        result.diagnostics.push_back(
            msg("unexpected tokens before template start"));
      }
      pos = *p + leading.size();
    }
  }

  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (lost_anchor) {
      result.filled.slot_fills[roles[i]] = {{kArgPlaceholder}};
      continue;
    }
    const bool last = i + 1 == roles.size();
    const auto& seg = trailing[i];
    std::size_t region_end;
    if (seg.empty() && last) {
      region_end = output.size();  // template ends with this placeholder
      detail::parse_region(output, pos, region_end, roles[i], &result);
      pos = region_end;
      continue;
    }
    auto p = detail::find_from(output, seg, pos);
    if (!p) {
      result.clean = false;
      result.diagnostics.push_back(
          msg("literal segment '", join_tokens(seg, " "), "' not found"));
      detail::parse_region(output, pos, output.size(), roles[i], &result);
      pos = output.size();
      lost_anchor = true;
      continue;
    }
    detail::parse_region(output, pos, *p, roles[i], &result);
    pos = *p + seg.size();
  }

  if (!lost_anchor && pos < output.size()) {
    result.clean = false;
    result.diagnostics.push_back(msg("trailing tokens after template end"));
  }
  // Roles never reached still need canonical entries.
  for (const auto& role : tpl.roles) {
    if (!result.filled.slot_fills.count(role)) {
      result.filled.slot_fills[role] = {{kArgPlaceholder}};
    }
  }
  return result;
}

// All start positions where `needle` occurs contiguously in `haystack`.
inline std::vector<std::size_t> find_occurrences(
    const std::vector<std::string>& haystack,
    const std::vector<std::string>& needle) {
  std::vector<std::size_t> out;
  if (needle.empty()) return out;
  std::size_t from = 0;
  while (auto p = detail::find_from(haystack, needle, from)) {
    out.push_back(*p);
    from = *p + 1;
  }
  return out;
}

struct GroundedArgument {
  std::string role;
  Span span;  // coordinates of the context the fill was grounded against
  std::vector<std::string> fill;

  friend bool operator==(const GroundedArgument&,
                         const GroundedArgument&) = default;
};

// Grounds each actual fill at its earliest exact occurrence in `context`.
// Fills with no occurrence are skipped (and reported via `diagnostics`).
inline std::vector<GroundedArgument> ground_fills(
    const FilledTemplate& filled, const std::vector<std::string>& context,
    std::vector<std::string>* diagnostics = nullptr) {
  std::vector<GroundedArgument> out;
  for (const auto& range : filled.fill_ranges) {
    std::vector<std::string> fill(
        filled.tokens.begin() + static_cast<std::ptrdiff_t>(range.begin),
        filled.tokens.begin() + static_cast<std::ptrdiff_t>(range.end));
    auto p = detail::find_from(context, fill, 0);
    if (!p) {
      if (diagnostics) {
        diagnostics->push_back(msg("fill '", join_tokens(fill, " "),
                                   "' for role '", range.role,
                                   "' not found in context"));
      }
      continue;
    }
    out.push_back({range.role, Span{*p, *p + fill.size(), std::nullopt}, fill});
  }
  return out;
}

}  // namespace ea2e
