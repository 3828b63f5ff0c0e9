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

#include "ea2e/formats.hpp"

#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ea2e/config.hpp"
#include "support/tempfile.hpp"

using namespace ea2e;
using ea2e_test::TempFile;

namespace {

RoleAssignment arg(const std::string& role, std::size_t start, std::size_t end,
                   std::optional<std::size_t> head = std::nullopt,
                   std::optional<std::string> entity = std::nullopt) {
  return {role, Span{start, end, head}, std::move(entity)};
}

IterationTrace make_trace(const std::string& doc_id,
                          std::map<std::string, std::vector<RoleAssignment>>
                              assignments) {
  IterationTrace trace;
  trace.doc_id = doc_id;
  IterationRecord rec;
  rec.assignments = std::move(assignments);
  for (const auto& [event_id, args] : rec.assignments) {
    rec.contexts[event_id] = {"a", "b"};
    EventPrediction pred;
    pred.event_id = event_id;
    pred.arguments = args;
    pred.output_tokens = {"x", "y"};
    rec.predictions[event_id] = std::move(pred);
  }
  trace.iterations.push_back(std::move(rec));
  return trace;
}

}  // namespace

TEST_CASE("predictions round trip through the JSONL file") {
  const std::vector<IterationTrace> traces = {
      make_trace("d1", {{"ev1", {arg("Attacker", 2, 5, 4, "x0"),
                                 arg("Place", 7, 8)}},
                        {"ev2", {}}}),
      make_trace("d2", {{"ev3", {arg("Target", 0, 1)}}})};
  TempFile f("preds");
  write_predictions(f.path, traces);
  const EventAssignments loaded = load_predictions(f.path);
  CHECK(loaded == final_assignments(traces));
  CHECK(loaded.at("ev1")[0].span.head == 4);
  CHECK(loaded.at("ev1")[0].entity_id == "x0");
  CHECK(loaded.at("ev1")[1].span.head == std::nullopt);
  CHECK(loaded.at("ev2").empty());
}

TEST_CASE("prediction rows keep optional fields optional") {
  const Json with = prediction_row_to_json("d", "ev", {arg("R", 1, 3, 2, "x")});
  CHECK(with.at("arguments")[0].contains("head"));
  CHECK(with.at("arguments")[0].contains("entity_id"));
  const Json without = prediction_row_to_json("d", "ev", {arg("R", 1, 3)});
  CHECK_FALSE(without.at("arguments")[0].contains("head"));
  CHECK_FALSE(without.at("arguments")[0].contains("entity_id"));
}

TEST_CASE("duplicate prediction rows are rejected with their line number") {
  TempFile f("preds-dup");
  const std::string row =
      prediction_row_to_json("d", "ev1", {arg("R", 0, 1)}).dump();
  f.write(row + "\n\n" + row + "\n");
  CHECK_THROWS_WITH(load_predictions(f.path),
                    Catch::Matchers::ContainsSubstring(f.path + ":3"));
  CHECK_THROWS_WITH(load_predictions(f.path),
                    Catch::Matchers::ContainsSubstring("duplicate prediction"));
}

TEST_CASE("malformed prediction rows name the file and line") {
  TempFile f("preds-bad");
  f.write("{\"doc_id\": \"d\", \"event_id\": \"ev\", \"arguments\": []}\nnot json\n");
  CHECK_THROWS_WITH(load_predictions(f.path),
                    Catch::Matchers::ContainsSubstring(f.path + ":2"));
  TempFile g("preds-missing-field");
  g.write("{\"doc_id\": \"d\"}\n");
  CHECK_THROWS_WITH(load_predictions(g.path),
                    Catch::Matchers::ContainsSubstring("event_id"));
  CHECK_THROWS_AS(load_predictions("/nonexistent/preds.jsonl"),
                  ValidationError);
}

TEST_CASE("trace rows expose fixpoint, contexts, outputs, and diagnostics") {
  IterationTrace trace = make_trace("d1", {{"ev1", {arg("R", 0, 1)}}});
  Json j = trace_to_json(trace);
  CHECK(j.at("doc_id") == "d1");
  CHECK(j.at("fixpoint_iteration").is_null());
  CHECK(j.at("skipped_events").empty());
  REQUIRE(j.at("iterations").size() == 1);
  const Json& it = j.at("iterations")[0];
  CHECK(it.at("assignments").at("ev1").size() == 1);
  CHECK(it.at("assignments").at("ev1")[0].at("role") == "R");
  CHECK(it.at("contexts").at("ev1") == Json::array({"a", "b"}));
  CHECK(it.at("outputs").at("ev1") == Json::array({"x", "y"}));
  CHECK(it.at("diagnostics").empty());

  trace.fixpoint_iteration = 2;
  trace.skipped_events = {"ghost"};
  j = trace_to_json(trace);
  CHECK(j.at("fixpoint_iteration") == 2);
  CHECK(j.at("skipped_events") == Json::array({"ghost"}));

  TempFile f("traces");
  write_traces(f.path, {trace});
  CHECK(f.read().find("\"doc_id\"") != std::string::npos);
}

TEST_CASE("score and consistency reports serialize every cell") {
  ScoreReport report;
  report.head_classification.predicted = 4;
  report.head_classification.matched = 3;
  const Json j = score_report_to_json(report);
  for (const char* cell : {"head_identification", "head_classification",
                           "coref_identification", "coref_classification"}) {
    for (const char* field :
         {"predicted", "gold", "matched", "precision", "recall", "f1"}) {
      CHECK(j.at(cell).contains(field));
    }
  }
  CHECK(j.at("head_classification").at("predicted") == 4);

  ConsistencyReport consistency;
  consistency.threshold = 0.75;
  consistency.entities_considered = 2;
  consistency.entities_majority = 1;
  consistency.summary = 0.5;
  consistency.per_document["d1"] = {
      RoleProfile{"x0", {{"Attacker", 2}, {"Target", 1}}, 3}};
  const Json cj = consistency_to_json(consistency);
  CHECK(cj.at("threshold") == 0.75);
  CHECK(cj.at("per_document").at("d1")[0].at("entity_id") == "x0");
  CHECK(cj.at("per_document").at("d1")[0].at("role_counts").at("Attacker") == 2);
  CHECK(cj.at("per_document").at("d1")[0].at("events") == 3);
}

TEST_CASE("answer keys round trip through disk") {
  SynthSpec spec;
  spec.num_docs = 6;
  spec.min_events_per_doc = 2;
  spec.max_events_per_doc = 3;
  spec.ambiguity_rate = 0.5;
  spec.seed = 3;
  const SynthResult result = generate(spec);
  TempFile f("answer-key");
  save_answer_key(f.path, result.key);
  const AnswerKey loaded = load_answer_key(f.path);
  CHECK(loaded == result.key);

  CHECK_THROWS_AS(load_answer_key("/nonexistent/key.json"), ValidationError);
  TempFile g("answer-key-bad");
  g.write("{broken");
  CHECK_THROWS_WITH(load_answer_key(g.path),
                    Catch::Matchers::ContainsSubstring(g.path));
}

TEST_CASE("augmented context rows carry tokens and placed tags") {
  AugmentedContext ctx;
  ctx.doc_id = "d1";
  ctx.event_id = "ev1";
  ctx.tokens = {"<tag>", "Attacker", "</tag>", "raiders", "struck"};
  ctx.tagged_roles = {{"Attacker", Span{3, 4, std::nullopt}}};
  const Json j = augmented_to_json(ctx);
  CHECK(j.at("doc_id") == "d1");
  CHECK(j.at("tokens").size() == 5);
  REQUIRE(j.at("tagged_roles").size() == 1);
  CHECK(j.at("tagged_roles")[0].at("role") == "Attacker");
  CHECK(j.at("tagged_roles")[0].at("start") == 3);
  CHECK(j.at("tagged_roles")[0].at("end") == 4);

  TempFile f("augmented");
  write_augmented(f.path, {ctx});
  CHECK(f.read().find("\"event_id\"") != std::string::npos);
}

TEST_CASE("run configurations round trip with every field changed") {
  RunConfig cfg;
  cfg.paths = {"c.jsonl", "o.json",  "m.json", "p.jsonl", "r.json",
               "t.jsonl", "k.json", "a.jsonl", "g.jsonl"};
  cfg.model = {24, 48, 3, 1, 100, 20, 77};
  cfg.training = {0.3, 0.9, 1e-2, 9, 5, 13, 21};
  cfg.inference.max_iterations = 7;
  cfg.inference.window = 9;
  cfg.inference.early_stop_on_fixpoint = true;
  cfg.inference.decode.max_len = 6;
  cfg.synth.num_docs = 3;
  cfg.synth.min_events_per_doc = 1;
  cfg.synth.max_events_per_doc = 2;
  cfg.synth.vocabulary_size = 9;
  cfg.synth.entity_pool_size = 24;
  cfg.synth.rules = {{"capture", "Detainee", "accuse", "Defendant"}};
  cfg.synth.ambiguity_rate = 0.25;
  cfg.synth.list_size = 3;
  cfg.synth.seed = 5;
  cfg.synth.filler_gap = 17;

  TempFile f("run-config");
  save_run_config(f.path, cfg);
  const RunConfig loaded = load_run_config(f.path);
  CHECK(loaded == cfg);

  // An empty object falls back to defaults for everything.
  CHECK(run_config_from_json(Json::object()) == RunConfig{});
}

TEST_CASE("unknown config sections and fields fail loudly") {
  CHECK_THROWS_WITH(run_config_from_json(Json::parse("{\"modle\": {}}")),
                    Catch::Matchers::ContainsSubstring("unknown section 'modle'"));
  CHECK_THROWS_WITH(
      run_config_from_json(Json::parse("{\"model\": {\"embeding_dim\": 4}}")),
      Catch::Matchers::ContainsSubstring("unknown field 'model.embeding_dim'"));
  CHECK_THROWS_WITH(
      run_config_from_json(
          Json::parse("{\"inference\": {\"decode\": {\"maxlen\": 4}}}")),
      Catch::Matchers::ContainsSubstring(
          "unknown field 'inference.decode.maxlen'"));
  CHECK_THROWS_WITH(
      run_config_from_json(Json::parse("{\"paths\": {\"output\": \"x\"}}")),
      Catch::Matchers::ContainsSubstring("unknown field 'paths.output'"));
}

TEST_CASE("config type errors name the exact field") {
  try {
    run_config_from_json(Json::parse("{\"training\": {\"alpha\": \"high\"}}"));
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()) ==
          "config: field 'training.alpha' has the wrong type");
  }
  CHECK_THROWS_AS(
      run_config_from_json(Json::parse("{\"model\": {\"init_seed\": []}}")),
      ValidationError);
}

TEST_CASE("config files must exist and hold an object") {
  CHECK_THROWS_AS(load_run_config("/nonexistent/run.json"), ValidationError);
  TempFile f("run-config-array");
  f.write("[1, 2]\n");
  CHECK_THROWS_WITH(load_run_config(f.path),
                    Catch::Matchers::ContainsSubstring("must be an object"));
  TempFile g("run-config-broken");
  g.write("{nope");
  CHECK_THROWS_WITH(load_run_config(g.path),
                    Catch::Matchers::ContainsSubstring("parse failure"));
}
