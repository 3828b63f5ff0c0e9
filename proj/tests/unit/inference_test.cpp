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

#include "ea2e/inference.hpp"

#include <map>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

using namespace ea2e;

namespace {

Ontology pair_ontology() {
  Ontology onto;
  onto.add(parse_template("assault", "<arg> attacked <arg>",
                          {"Attacker", "Target"}));
  return onto;
}

Document two_event_doc(std::size_t t1, std::size_t t2, std::size_t n = 60) {
  Document doc;
  doc.doc_id = "d";
  doc.tokens.reserve(n);
  for (std::size_t i = 0; i < n; ++i) doc.tokens.push_back("w" + std::to_string(i));
  doc.tokens[t1] = "attacked";
  doc.tokens[t2] = "attacked";
  EventMention e1;
  e1.event_id = "ev1";
  e1.event_type = "assault";
  e1.trigger = {t1, t1 + 1, std::nullopt};
  EventMention e2;
  e2.event_id = "ev2";
  e2.event_type = "assault";
  e2.trigger = {t2, t2 + 1, std::nullopt};
  doc.events = {e1, e2};
  return doc;
}

// Deterministic stand-in extractor: per event, a fixed sequence of argument
// lists emitted on successive calls (the last entry repeats).
class ScriptedExtractor : public Extractor {
 public:
  std::map<std::string, std::vector<std::vector<RoleAssignment>>> script;
  std::map<std::string, std::vector<std::vector<std::string>>> seen_contexts;

  EventPrediction extract(const Document&, const EventMention& event,
                          const AugmentedContext& ctx,
                          const EventTemplate&) override {
    seen_contexts[event.event_id].push_back(ctx.tokens);
    EventPrediction pred;
    pred.event_id = event.event_id;
    const auto it = script.find(event.event_id);
    if (it != script.end() && !it->second.empty()) {
      const std::size_t call = seen_contexts[event.event_id].size() - 1;
      pred.arguments = it->second[std::min(call, it->second.size() - 1)];
    }
    return pred;
  }
};

RoleAssignment arg(const std::string& role, std::size_t start, std::size_t end) {
  return {role, Span{start, end, std::nullopt}, std::nullopt};
}

}  // namespace

TEST_CASE("fixpoint_check ignores ordering and entity ids") {
  AssignmentsMap prev{{"ev1", {arg("A", 0, 1), arg("B", 2, 3)}}};
  AssignmentsMap curr{{"ev1", {arg("B", 2, 3), arg("A", 0, 1)}}};
  CHECK(fixpoint_check(prev, curr));

  // Coreference ids on gold-side assignments do not break agreement.
  AssignmentsMap with_entity{
      {"ev1",
       {{"A", Span{0, 1, std::nullopt}, std::string("x1")},
        {"B", Span{2, 3, std::nullopt}, std::string("x2")}}}};
  CHECK(fixpoint_check(with_entity, curr));

  AssignmentsMap moved{{"ev1", {arg("A", 0, 1), arg("B", 2, 4)}}};
  CHECK_FALSE(fixpoint_check(prev, moved));
  AssignmentsMap relabeled{{"ev1", {arg("A", 0, 1), arg("C", 2, 3)}}};
  CHECK_FALSE(fixpoint_check(prev, relabeled));
  AssignmentsMap fewer{{"ev1", {arg("A", 0, 1)}}};
  CHECK_FALSE(fixpoint_check(prev, fewer));
}

TEST_CASE("fixpoint_check rejects mismatched event id sets") {
  AssignmentsMap prev{{"ev1", {}}};
  AssignmentsMap curr{{"ev1", {}}, {"ev2", {}}};
  CHECK_THROWS_AS(fixpoint_check(prev, curr), ValidationError);
  AssignmentsMap other{{"ev2", {}}};
  CHECK_THROWS_AS(fixpoint_check(prev, other), ValidationError);
}

TEST_CASE("iteration one always runs on the regular context") {
  const Document doc = two_event_doc(10, 20);
  const Ontology onto = pair_ontology();
  ScriptedExtractor ex;
  ex.script["ev1"] = {{arg("Attacker", 3, 4)}};
  ex.script["ev2"] = {{arg("Target", 30, 31)}};
  InferenceConfig cfg;
  cfg.max_iterations = 2;
  const IterationTrace trace = infer_document(doc, onto, ex, cfg);
  REQUIRE(trace.iterations.size() == 2);
  for (const auto& id : {"ev1", "ev2"}) {
    CHECK(trace.iterations[0].contexts.at(id) ==
          regular_context(doc, id).tokens);
    // The second iteration sees the neighbor's tags, so its context grows.
    CHECK(trace.iterations[1].contexts.at(id).size() >
          trace.iterations[0].contexts.at(id).size());
  }
}

TEST_CASE("a single iteration reproduces single_shot exactly") {
  const Document doc = two_event_doc(10, 20);
  const Ontology onto = pair_ontology();
  ScriptedExtractor ex;
  ex.script["ev1"] = {{arg("Attacker", 3, 4), arg("Target", 5, 6)}};
  ex.script["ev2"] = {{arg("Target", 30, 31)}};
  InferenceConfig cfg;
  cfg.max_iterations = 1;
  const IterationTrace trace = infer_document(doc, onto, ex, cfg);
  REQUIRE(trace.iterations.size() == 1);
  CHECK_FALSE(trace.fixpoint_iteration.has_value());

  ScriptedExtractor fresh;
  fresh.script = ex.script;
  const IterationRecord direct = single_shot(doc, onto, fresh);
  CHECK(trace.iterations[0] == direct);
}

TEST_CASE("a single iteration through the model reproduces single_shot") {
  const Document doc = two_event_doc(10, 20, 40);
  const Ontology onto = pair_ontology();
  ModelConfig mc;
  mc.embedding_dim = 16;
  mc.feedforward_dim = 24;
  mc.max_input_len = 64;
  mc.max_output_len = 16;
  mc.init_seed = 5;
  const ExtractorModel model(Vocabulary::from_corpus({doc}, onto), mc);
  InferenceConfig cfg;
  cfg.max_iterations = 1;
  const IterationTrace trace = infer_document(doc, onto, model, cfg);
  ModelExtractor ex(&model, cfg.decode);
  const IterationRecord direct = single_shot(doc, onto, ex);
  CHECK(trace.iterations[0] == direct);
}

TEST_CASE("stable predictions reach a fixpoint at iteration two") {
  const Document doc = two_event_doc(10, 20);
  const Ontology onto = pair_ontology();
  ScriptedExtractor ex;
  ex.script["ev1"] = {{arg("Attacker", 3, 4)}};
  ex.script["ev2"] = {{arg("Target", 30, 31)}};
  InferenceConfig cfg;
  cfg.max_iterations = 4;
  const IterationTrace trace = infer_document(doc, onto, ex, cfg);
  CHECK(trace.iterations.size() == 4);  // no early stop by default
  REQUIRE(trace.fixpoint_iteration.has_value());
  CHECK(*trace.fixpoint_iteration == 2);
}

TEST_CASE("a late change delays the fixpoint") {
  const Document doc = two_event_doc(10, 20);
  const Ontology onto = pair_ontology();
  ScriptedExtractor ex;
  // ev1 changes its answer after the first call, then holds steady.
  ex.script["ev1"] = {{arg("Attacker", 3, 4)}, {arg("Attacker", 5, 6)}};
  ex.script["ev2"] = {{arg("Target", 30, 31)}};
  InferenceConfig cfg;
  cfg.max_iterations = 4;
  const IterationTrace trace = infer_document(doc, onto, ex, cfg);
  REQUIRE(trace.fixpoint_iteration.has_value());
  CHECK(*trace.fixpoint_iteration == 3);
  CHECK(trace.iterations.size() == 4);
}

TEST_CASE("early stopping halts at the fixpoint iteration") {
  const Document doc = two_event_doc(10, 20);
  const Ontology onto = pair_ontology();
  ScriptedExtractor ex;
  ex.script["ev1"] = {{arg("Attacker", 3, 4)}, {arg("Attacker", 5, 6)}};
  ex.script["ev2"] = {{arg("Target", 30, 31)}};
  InferenceConfig cfg;
  cfg.max_iterations = 6;
  cfg.early_stop_on_fixpoint = true;
  const IterationTrace trace = infer_document(doc, onto, ex, cfg);
  CHECK(trace.iterations.size() == 3);
  REQUIRE(trace.fixpoint_iteration.has_value());
  CHECK(*trace.fixpoint_iteration == 3);
  CHECK(trace.final_record() == trace.iterations[2]);
}

TEST_CASE("events outside the window do not exchange context") {
  const Document doc = two_event_doc(5, 55);  // distance 50
  const Ontology onto = pair_ontology();
  ScriptedExtractor ex;
  ex.script["ev1"] = {{arg("Attacker", 3, 4)}};
  ex.script["ev2"] = {{arg("Target", 30, 31)}};
  InferenceConfig cfg;
  cfg.max_iterations = 2;
  cfg.window = 40;
  const IterationTrace trace = infer_document(doc, onto, ex, cfg);
  // No neighbors within the window: iteration 2 context stays regular.
  CHECK(trace.iterations[1].contexts.at("ev1") ==
        regular_context(doc, "ev1").tokens);
  REQUIRE(trace.fixpoint_iteration.has_value());
  CHECK(*trace.fixpoint_iteration == 2);

  InferenceConfig wide = cfg;
  wide.window = 51;
  const IterationTrace wide_trace = infer_document(doc, onto, ex, wide);
  CHECK(wide_trace.iterations[1].contexts.at("ev1") !=
        regular_context(doc, "ev1").tokens);
}

TEST_CASE("events with unknown types are skipped but still neighbor others") {
  Document doc = two_event_doc(10, 20);
  doc.events[1].event_type = "mystery";
  const Ontology onto = pair_ontology();
  ScriptedExtractor ex;
  ex.script["ev1"] = {{arg("Attacker", 3, 4)}};
  InferenceConfig cfg;
  cfg.max_iterations = 2;
  const IterationTrace trace = infer_document(doc, onto, ex, cfg);
  CHECK(trace.skipped_events == std::vector<std::string>{"ev2"});
  for (const auto& rec : trace.iterations) {
    CHECK(rec.assignments.count("ev2") == 0);
    CHECK(rec.predictions.count("ev2") == 0);
  }
  // The skipped neighbor contributes no predicted arguments, so the
  // augmented context carries no tags and matches the regular one.
  CHECK(trace.iterations[1].contexts.at("ev1") ==
        regular_context(doc, "ev1").tokens);
}

TEST_CASE("final_record fails on an empty trace") {
  IterationTrace trace;
  trace.doc_id = "d";
  CHECK_THROWS_AS(trace.final_record(), ValidationError);
}

TEST_CASE("inference configuration is validated") {
  InferenceConfig cfg;
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  InferenceConfig win;
  win.window = 0;
  CHECK_THROWS_AS(win.validate(), ValidationError);
}

TEST_CASE("final_assignments collects every document once") {
  const Ontology onto = pair_ontology();
  Document d1 = two_event_doc(10, 20);
  Document d2 = two_event_doc(10, 20);
  d2.doc_id = "d2";
  d2.events[0].event_id = "ev3";
  d2.events[1].event_id = "ev4";
  ScriptedExtractor ex;
  ex.script["ev1"] = {{arg("Attacker", 3, 4)}};
  ex.script["ev3"] = {{arg("Target", 7, 8)}};
  InferenceConfig cfg;
  cfg.max_iterations = 2;
  const auto traces = infer_corpus({d1, d2}, onto, ex, cfg);
  REQUIRE(traces.size() == 2);
  const auto assignments = final_assignments(traces);
  CHECK(assignments.size() == 4);
  CHECK(assignments.at("ev1") == std::vector<RoleAssignment>{arg("Attacker", 3, 4)});
  CHECK(assignments.at("ev2").empty());

  // Duplicate event ids across documents are rejected.
  auto clashing = traces;
  clashing[1].iterations.back().assignments["ev1"] = {};
  CHECK_THROWS_AS(final_assignments(clashing), ValidationError);
}
