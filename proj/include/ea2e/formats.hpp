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

// On-disk formats beyond the corpus and checkpoint: prediction JSONL rows,
// iteration traces, score and consistency reports, answer keys, and
// augmented-context dumps.  Argument rows use the same inline span shape as
// corpus documents ({"role", "start", "end", "head"?, "entity_id"?}).

#pragma once

#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ea2e/augmentation.hpp"
#include "ea2e/common.hpp"
#include "ea2e/corpus.hpp"
#include "ea2e/evaluation.hpp"
#include "ea2e/inference.hpp"
#include "ea2e/synth.hpp"

namespace ea2e {

namespace detail {

inline Json assignment_to_json(const RoleAssignment& a) {
  Json j;
  j["role"] = a.role;
  j["start"] = a.span.start;
  j["end"] = a.span.end;
  if (a.span.head) j["head"] = *a.span.head;
  if (a.entity_id) j["entity_id"] = *a.entity_id;
  return j;
}

inline RoleAssignment assignment_from_json(const Json& j, const char* where) {
  RoleAssignment a;
  a.role = require_field(j, "role", where).get<std::string>();
  a.span = span_from_json(j, where);
  if (j.contains("entity_id") && !j.at("entity_id").is_null()) {
    a.entity_id = j.at("entity_id").get<std::string>();
  }
  return a;
}

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError(msg("cannot open '", path, "' for writing"));
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Predictions: one JSONL row per event.

inline Json prediction_row_to_json(const std::string& doc_id,
                                   const std::string& event_id,
                                   const std::vector<RoleAssignment>& args) {
  Json j;
  j["doc_id"] = doc_id;
  j["event_id"] = event_id;
  Json list = Json::array();
  for (const RoleAssignment& a : args) {
    list.push_back(detail::assignment_to_json(a));
  }
  j["arguments"] = std::move(list);
  return j;
}

// Final-iteration assignments of each trace, one row per event, in corpus
// order.
inline void write_predictions(const std::string& path,
                              const std::vector<IterationTrace>& traces) {
  std::ofstream out = detail::open_for_write(path);
  for (const IterationTrace& trace : traces) {
    if (trace.iterations.empty()) continue;
    for (const auto& [event_id, args] : trace.final_record().assignments) {
      out << prediction_row_to_json(trace.doc_id, event_id, args).dump()
          << "\n";
    }
  }
}

inline EventAssignments load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError(msg("cannot open predictions file '", path, "'"));
  }
  EventAssignments preds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ValidationError(
          msg(path, ":", line_no, ": parse failure: ", e.what()));
    }
    try {
      std::string event_id =
          detail::require_field(j, "event_id", "prediction").get<std::string>();
      if (preds.count(event_id)) {
        throw ValidationError(
            msg("duplicate prediction for event '", event_id, "'"));
      }
      std::vector<RoleAssignment> args;
      for (const Json& aj : detail::require_field(j, "arguments", "prediction")) {
        args.push_back(detail::assignment_from_json(aj, "prediction argument"));
      }
      preds.emplace(std::move(event_id), std::move(args));
    } catch (const ValidationError& e) {
      throw ValidationError(msg(path, ":", line_no, ": ", e.what()));
    }
  }
  return preds;
}

// ---------------------------------------------------------------------------
// Iteration traces: one JSONL row per document.

inline Json trace_to_json(const IterationTrace& trace) {
  Json j;
  j["doc_id"] = trace.doc_id;
  if (trace.fixpoint_iteration) {
    j["fixpoint_iteration"] = *trace.fixpoint_iteration;
  } else {
    j["fixpoint_iteration"] = nullptr;
  }
  j["skipped_events"] = trace.skipped_events;
  Json iterations = Json::array();
  for (const IterationRecord& rec : trace.iterations) {
    Json rj;
    Json assignments = Json::object();
    for (const auto& [event_id, args] : rec.assignments) {
      Json list = Json::array();
      for (const RoleAssignment& a : args) {
        list.push_back(detail::assignment_to_json(a));
      }
      assignments[event_id] = std::move(list);
    }
    rj["assignments"] = std::move(assignments);
    Json contexts = Json::object();
    for (const auto& [event_id, tokens] : rec.contexts) {
      contexts[event_id] = tokens;
    }
    rj["contexts"] = std::move(contexts);
    Json outputs = Json::object();
    Json diagnostics = Json::object();
    for (const auto& [event_id, pred] : rec.predictions) {
      outputs[event_id] = pred.output_tokens;
      if (!pred.diagnostics.empty()) {
        diagnostics[event_id] = pred.diagnostics;
      }
    }
    rj["outputs"] = std::move(outputs);
    rj["diagnostics"] = std::move(diagnostics);
    iterations.push_back(std::move(rj));
  }
  j["iterations"] = std::move(iterations);
  return j;
}

inline void write_traces(const std::string& path,
                         const std::vector<IterationTrace>& traces) {
  std::ofstream out = detail::open_for_write(path);
  for (const IterationTrace& trace : traces) {
    out << trace_to_json(trace).dump() << "\n";
  }
}

// ---------------------------------------------------------------------------
// Score and consistency reports.

inline Json cell_to_json(const CellScore& c) {
  Json j;
  j["predicted"] = c.predicted;
  j["gold"] = c.gold;
  j["matched"] = c.matched;
  j["precision"] = c.precision;
  j["recall"] = c.recall;
  j["f1"] = c.f1;
  return j;
}

inline Json score_report_to_json(const ScoreReport& r) {
  Json j;
  j["head_identification"] = cell_to_json(r.head_identification);
  j["head_classification"] = cell_to_json(r.head_classification);
  j["coref_identification"] = cell_to_json(r.coref_identification);
  j["coref_classification"] = cell_to_json(r.coref_classification);
  return j;
}

inline Json consistency_to_json(const ConsistencyReport& r) {
  Json j;
  j["threshold"] = r.threshold;
  j["entities_considered"] = r.entities_considered;
  j["entities_majority"] = r.entities_majority;
  j["summary"] = r.summary;
  Json docs = Json::object();
  for (const auto& [doc_id, profiles] : r.per_document) {
    Json plist = Json::array();
    for (const RoleProfile& p : profiles) {
      Json pj;
      pj["entity_id"] = p.entity_id;
      Json counts = Json::object();
      for (const auto& [role, n] : p.role_counts) counts[role] = n;
      pj["role_counts"] = std::move(counts);
      pj["events"] = p.events;
      plist.push_back(std::move(pj));
    }
    docs[doc_id] = std::move(plist);
  }
  j["per_document"] = std::move(docs);
  return j;
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out = detail::open_for_write(path);
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Answer keys.

inline Json rule_to_json(const Rule& r) {
  Json j;
  j["source_type"] = r.source_type;
  j["source_role"] = r.source_role;
  j["target_type"] = r.target_type;
  j["target_role"] = r.target_role;
  return j;
}

inline Rule rule_from_json(const Json& j) {
  Rule r;
  r.source_type =
      detail::require_field(j, "source_type", "rule").get<std::string>();
  r.source_role =
      detail::require_field(j, "source_role", "rule").get<std::string>();
  r.target_type =
      detail::require_field(j, "target_type", "rule").get<std::string>();
  r.target_role =
      detail::require_field(j, "target_role", "rule").get<std::string>();
  return r;
}

inline Json answer_key_to_json(const AnswerKey& key) {
  Json j;
  j["ambiguity_rate_target"] = key.ambiguity_rate_target;
  j["ambiguity_rate_realized"] = key.ambiguity_rate_realized;
  j["seed"] = key.seed;
  j["total_events"] = key.total_events;
  j["flagged_events"] = key.flagged_events;
  Json rules = Json::array();
  for (const Rule& r : key.rules) rules.push_back(rule_to_json(r));
  j["rules"] = std::move(rules);
  Json events = Json::object();
  for (const auto& [event_id, ek] : key.events) {
    Json ej;
    ej["doc_id"] = ek.doc_id;
    ej["event_type"] = ek.event_type;
    ej["unit_id"] = ek.unit_id;
    ej["unit_kind"] = ek.unit_kind;
    ej["requires_neighbor"] = ek.requires_neighbor;
    Json roles = Json::object();
    for (const auto& [role, rk] : ek.roles) {
      Json rj;
      rj["requires_neighbor"] = rk.requires_neighbor;
      if (!rk.candidates.empty()) rj["candidates"] = rk.candidates;
      if (rk.via_rule) rj["via_rule"] = rule_to_json(*rk.via_rule);
      roles[role] = std::move(rj);
    }
    ej["roles"] = std::move(roles);
    events[event_id] = std::move(ej);
  }
  j["events"] = std::move(events);
  return j;
}

inline AnswerKey answer_key_from_json(const Json& j) {
  AnswerKey key;
  key.ambiguity_rate_target =
      detail::require_field(j, "ambiguity_rate_target", "answer key")
          .get<double>();
  key.ambiguity_rate_realized =
      detail::require_field(j, "ambiguity_rate_realized", "answer key")
          .get<double>();
  key.seed = detail::require_field(j, "seed", "answer key").get<std::uint64_t>();
  key.total_events = detail::size_field(j, "total_events", "answer key");
  key.flagged_events = detail::size_field(j, "flagged_events", "answer key");
  for (const Json& rj : detail::require_field(j, "rules", "answer key")) {
    key.rules.push_back(rule_from_json(rj));
  }
  for (const auto& [event_id, ej] :
       detail::require_field(j, "events", "answer key").items()) {
    EventKey ek;
    ek.event_id = event_id;
    ek.doc_id = detail::require_field(ej, "doc_id", "event key").get<std::string>();
    ek.event_type =
        detail::require_field(ej, "event_type", "event key").get<std::string>();
    ek.unit_id =
        detail::require_field(ej, "unit_id", "event key").get<std::string>();
    ek.unit_kind =
        detail::require_field(ej, "unit_kind", "event key").get<std::string>();
    ek.requires_neighbor =
        detail::require_field(ej, "requires_neighbor", "event key").get<bool>();
    for (const auto& [role, rj] :
         detail::require_field(ej, "roles", "event key").items()) {
      RoleKey rk;
      rk.requires_neighbor =
          detail::require_field(rj, "requires_neighbor", "role key").get<bool>();
      if (rj.contains("candidates")) {
        for (const Json& c : rj.at("candidates")) {
          rk.candidates.push_back(c.get<std::string>());
        }
      }
      if (rj.contains("via_rule")) {
        rk.via_rule = rule_from_json(rj.at("via_rule"));
      }
      ek.roles.emplace(role, std::move(rk));
    }
    key.events.emplace(event_id, std::move(ek));
  }
  return key;
}

inline void save_answer_key(const std::string& path, const AnswerKey& key) {
  write_json_file(path, answer_key_to_json(key));
}

inline AnswerKey load_answer_key(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError(msg("cannot open answer key file '", path, "'"));
  }
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(msg(path, ": parse failure: ", e.what()));
  }
  return answer_key_from_json(j);
}

// ---------------------------------------------------------------------------
// Augmented contexts: one JSONL row per event.

inline Json augmented_to_json(const AugmentedContext& ctx) {
  Json j;
  j["doc_id"] = ctx.doc_id;
  j["event_id"] = ctx.event_id;
  j["tokens"] = ctx.tokens;
  Json tags = Json::array();
  for (const auto& [role, span] : ctx.tagged_roles) {
    Json tj;
    tj["role"] = role;
    tj["start"] = span.start;
    tj["end"] = span.end;
    tags.push_back(std::move(tj));
  }
  j["tagged_roles"] = std::move(tags);
  return j;
}

inline void write_augmented(const std::string& path,
                            const std::vector<AugmentedContext>& contexts) {
  std::ofstream out = detail::open_for_write(path);
  for (const AugmentedContext& ctx : contexts) {
    out << augmented_to_json(ctx).dump() << "\n";
  }
}

}  // namespace ea2e
