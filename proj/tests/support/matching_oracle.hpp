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

// Exhaustive maximum-matching scorer used to cross-check the production
// scorer.  The match predicate is restated here from first principles and
// the matching itself tries every injective prediction-to-gold mapping.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ea2e/corpus.hpp"
#include "ea2e/evaluation.hpp"

namespace ea2e_test {

inline std::size_t head_index(const ea2e::Span& s) {
  return s.head ? *s.head : s.end - 1;
}

inline bool oracle_pair_matches(const ea2e::RoleAssignment& pred,
                                const ea2e::RoleAssignment& gold,
                                const ea2e::Document& doc, ea2e::Task task,
                                ea2e::Match match) {
  if (task == ea2e::Task::kClassification && pred.role != gold.role) {
    return false;
  }
  std::size_t pred_head = head_index(pred.span);
  if (pred_head == head_index(gold.span)) return true;
  if (match == ea2e::Match::kCoref && gold.entity_id) {
    for (const ea2e::EntityCluster& cluster : doc.clusters) {
      if (cluster.entity_id != *gold.entity_id) continue;
      for (const ea2e::Span& member : cluster.member_spans) {
        if (head_index(member) == pred_head) return true;
      }
    }
  }
  return false;
}

// Size of the maximum matching, by exhaustive recursion over predictions
// with a bitmask of consumed gold arguments.
inline std::size_t oracle_matched_count(
    const std::vector<ea2e::RoleAssignment>& pred,
    const std::vector<ea2e::RoleAssignment>& gold, const ea2e::Document& doc,
    ea2e::Task task, ea2e::Match match) {
  std::vector<std::vector<bool>> edge(pred.size(),
                                      std::vector<bool>(gold.size(), false));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < gold.size(); ++j) {
      edge[i][j] = oracle_pair_matches(pred[i], gold[j], doc, task, match);
    }
  }
  std::size_t best = 0;
  std::vector<bool> used(gold.size(), false);
  auto recurse = [&](auto&& self, std::size_t i, std::size_t count) -> void {
    if (count > best) best = count;
    if (i == pred.size()) return;
    self(self, i + 1, count);  // leave prediction i unmatched
    for (std::size_t j = 0; j < gold.size(); ++j) {
      if (used[j] || !edge[i][j]) continue;
      used[j] = true;
      self(self, i + 1, count + 1);
      used[j] = false;
    }
  };
  recurse(recurse, 0, 0);
  return best;
}

}  // namespace ea2e_test
