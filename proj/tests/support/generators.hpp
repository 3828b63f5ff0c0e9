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

// Randomized fixtures for property tests.

#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ea2e/common.hpp"
#include "ea2e/corpus.hpp"

namespace ea2e_test {

inline const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> pool = {
      "alpha",  "bravo", "city",  "delta", "ember", "field", "glass",
      "harbor", "index", "judge", "krait", "lemon", "metro", "night",
      "ocean",  "plate", "quay",  "river", "stone", "truck", "urban",
      "vapor",  "wheat", "xenon", "yield", "zonal"};
  return pool;
}

inline const std::vector<std::string>& role_pool() {
  static const std::vector<std::string> pool = {
      "Attacker", "Target", "Place", "Captor", "Detainee",
      "Prosecutor", "Defendant", "Victim", "Instrument", "Origin"};
  return pool;
}

inline std::vector<std::string> random_tokens(ea2e::Rng& rng, std::size_t n) {
  std::vector<std::string> tokens;
  tokens.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    tokens.push_back(word_pool()[rng.below(word_pool().size())]);
  }
  return tokens;
}

inline ea2e::Span random_span(ea2e::Rng& rng, std::size_t n_tokens,
                              std::size_t max_len = 3) {
  std::size_t len = 1 + rng.below(std::min(max_len, n_tokens));
  std::size_t start = rng.below(n_tokens - len + 1);
  ea2e::Span span{start, start + len, std::nullopt};
  if (len > 1 && rng.bernoulli(0.4)) {
    span.head = start + rng.below(len);
  }
  return span;
}

struct DocOpts {
  std::size_t min_tokens = 20;
  std::size_t max_tokens = 100;
  std::size_t max_events = 5;
  std::size_t max_args = 4;
  std::size_t max_clusters = 3;
};

inline ea2e::Document random_document(ea2e::Rng& rng, std::size_t index,
                                      const DocOpts& opts = {}) {
  ea2e::Document doc;
  doc.doc_id = ea2e::msg("rnd-", index);
  std::size_t n = rng.range(opts.min_tokens, opts.max_tokens);
  doc.tokens = random_tokens(rng, n);

  std::size_t n_clusters = rng.below(opts.max_clusters + 1);
  for (std::size_t c = 0; c < n_clusters; ++c) {
    ea2e::EntityCluster cluster;
    cluster.entity_id = ea2e::msg("x", c);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::size_t members = 1 + rng.below(3);
    for (std::size_t m = 0; m < members; ++m) {
      ea2e::Span s = random_span(rng, n);
      if (seen.insert({s.start, s.end}).second) {
        cluster.member_spans.push_back(s);
      }
    }
    doc.clusters.push_back(std::move(cluster));
  }

  std::size_t n_events = rng.below(opts.max_events + 1);
  for (std::size_t e = 0; e < n_events; ++e) {
    ea2e::EventMention ev;
    ev.event_id = ea2e::msg("e", e);
    ev.event_type = rng.bernoulli(0.5) ? "assault" : "capture";
    std::size_t trig = rng.below(n);
    ev.trigger = ea2e::Span{trig, trig + 1, std::nullopt};
    std::set<std::pair<std::string, std::pair<std::size_t, std::size_t>>> seen;
    std::size_t n_args = rng.below(opts.max_args + 1);
    for (std::size_t a = 0; a < n_args; ++a) {
      ea2e::RoleAssignment arg;
      arg.role = role_pool()[rng.below(role_pool().size())];
      arg.span = random_span(rng, n);
      if (!seen.insert({arg.role, {arg.span.start, arg.span.end}}).second) {
        continue;
      }
      if (!doc.clusters.empty() && rng.bernoulli(0.5)) {
        arg.entity_id = doc.clusters[rng.below(doc.clusters.size())].entity_id;
      }
      ev.gold_args.push_back(std::move(arg));
    }
    doc.events.push_back(std::move(ev));
  }
  return doc;
}

}  // namespace ea2e_test
