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

// Command-line surface: synth, train, predict, evaluate, augment.  Every
// subcommand reads an optional JSON config file; explicit flags override the
// config.  Exit codes: 0 success, 1 usage error, 2 data/validation error,
// 3 internal error.

#include <cstdio>
#include <exception>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ea2e/config.hpp"
#include "ea2e/corpus.hpp"
#include "ea2e/evaluation.hpp"
#include "ea2e/formats.hpp"
#include "ea2e/inference.hpp"
#include "ea2e/model.hpp"
#include "ea2e/ontology.hpp"
#include "ea2e/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

// A usage problem detected after flag parsing (e.g. a missing path).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ea2e::RunConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return ea2e::RunConfig{};
  return ea2e::load_run_config(path);
}

const std::string& require_path(const std::string& value, const char* flag,
                                const char* config_key) {
  if (value.empty()) {
    throw UsageError(ea2e::msg("missing ", flag, " (or config paths.",
                               config_key, ")"));
  }
  return value;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string config;
  std::string corpus;
  std::string ontology;
  std::string answer_key;
  std::size_t num_docs = 0;
  std::size_t min_events = 0;
  std::size_t max_events = 0;
  std::size_t vocab_size = 0;
  std::size_t entity_pool = 0;
  double ambiguity_rate = 0.0;
  std::size_t list_size = 0;
  std::uint64_t seed = 0;
  std::size_t filler_gap = 0;
};

void add_synth(CLI::App& app, SynthArgs& a, CLI::App** out) {
  CLI::App* sub =
      app.add_subcommand("synth", "Generate a synthetic corpus with planted "
                                  "cross-event argument rules");
  sub->add_option("--config", a.config, "JSON run configuration file");
  sub->add_option("--corpus", a.corpus, "Output corpus JSONL path");
  sub->add_option("--ontology", a.ontology, "Output ontology JSON path");
  sub->add_option("--answer-key", a.answer_key, "Output answer key JSON path");
  sub->add_option("--num-docs", a.num_docs, "Number of documents");
  sub->add_option("--min-events", a.min_events, "Minimum events per document");
  sub->add_option("--max-events", a.max_events, "Maximum events per document");
  sub->add_option("--vocab-size", a.vocab_size, "Filler word pool size");
  sub->add_option("--entity-pool", a.entity_pool, "Entity name pool size");
  sub->add_option("--ambiguity-rate", a.ambiguity_rate,
                  "Fraction of events underdetermined without a neighbor");
  sub->add_option("--list-size", a.list_size,
                  "Candidates per planted list in pair units");
  sub->add_option("--seed", a.seed, "Generation seed");
  sub->add_option("--filler-gap", a.filler_gap,
                  "Minimum filler tokens between units");
  *out = sub;
}

int run_synth(const CLI::App* sub, const SynthArgs& a) {
  ea2e::RunConfig cfg = load_config_or_default(a.config);
  if (sub->count("--corpus")) cfg.paths.corpus = a.corpus;
  if (sub->count("--ontology")) cfg.paths.ontology = a.ontology;
  if (sub->count("--answer-key")) cfg.paths.answer_key = a.answer_key;
  if (sub->count("--num-docs")) cfg.synth.num_docs = a.num_docs;
  if (sub->count("--min-events")) cfg.synth.min_events_per_doc = a.min_events;
  if (sub->count("--max-events")) cfg.synth.max_events_per_doc = a.max_events;
  if (sub->count("--vocab-size")) cfg.synth.vocabulary_size = a.vocab_size;
  if (sub->count("--entity-pool")) cfg.synth.entity_pool_size = a.entity_pool;
  if (sub->count("--ambiguity-rate")) {
    cfg.synth.ambiguity_rate = a.ambiguity_rate;
  }
  if (sub->count("--list-size")) cfg.synth.list_size = a.list_size;
  if (sub->count("--seed")) cfg.synth.seed = a.seed;
  if (sub->count("--filler-gap")) cfg.synth.filler_gap = a.filler_gap;

  require_path(cfg.paths.corpus, "--corpus", "corpus");
  ea2e::SynthResult result = ea2e::generate(cfg.synth);
  ea2e::write_corpus(cfg.paths.corpus, result.documents);
  if (!cfg.paths.ontology.empty()) {
    ea2e::save_ontology(cfg.paths.ontology, result.ontology);
  }
  if (!cfg.paths.answer_key.empty()) {
    ea2e::save_answer_key(cfg.paths.answer_key, result.key);
  }
  std::printf("documents: %zu\nevents: %zu\nflagged_events: %zu\n"
              "ambiguity_rate_realized: %.6f\n",
              result.documents.size(), result.key.total_events,
              result.key.flagged_events, result.key.ambiguity_rate_realized);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string config;
  std::string corpus;
  std::string ontology;
  std::string checkpoint;
  double alpha = 0.0;
  double beta = 0.0;
  double learning_rate = 0.0;
  std::size_t epochs = 0;
  std::size_t batch_size = 0;
  std::size_t window = 0;
  std::uint64_t seed = 0;
};

void add_train(CLI::App& app, TrainArgs& a, CLI::App** out) {
  CLI::App* sub = app.add_subcommand(
      "train", "Train the extraction model with alignment-enhanced loss");
  sub->add_option("--config", a.config, "JSON run configuration file");
  sub->add_option("--corpus", a.corpus, "Training corpus JSONL path");
  sub->add_option("--ontology", a.ontology, "Ontology JSON path");
  sub->add_option("--checkpoint", a.checkpoint, "Output checkpoint path");
  sub->add_option("--alpha", a.alpha, "Weight of the augmented-context loss");
  sub->add_option("--beta", a.beta, "Weight of the alignment loss");
  sub->add_option("--learning-rate", a.learning_rate, "Adam learning rate");
  sub->add_option("--epochs", a.epochs, "Training epochs");
  sub->add_option("--batch-size", a.batch_size, "Instances per optimizer step");
  sub->add_option("--window", a.window, "Neighborhood window in tokens");
  sub->add_option("--seed", a.seed, "Shuffling seed");
  *out = sub;
}

int run_train(const CLI::App* sub, const TrainArgs& a) {
  ea2e::RunConfig cfg = load_config_or_default(a.config);
  if (sub->count("--corpus")) cfg.paths.corpus = a.corpus;
  if (sub->count("--ontology")) cfg.paths.ontology = a.ontology;
  if (sub->count("--checkpoint")) cfg.paths.checkpoint = a.checkpoint;
  if (sub->count("--alpha")) cfg.training.alpha = a.alpha;
  if (sub->count("--beta")) cfg.training.beta = a.beta;
  if (sub->count("--learning-rate")) cfg.training.learning_rate = a.learning_rate;
  if (sub->count("--epochs")) cfg.training.epochs = a.epochs;
  if (sub->count("--batch-size")) cfg.training.batch_size = a.batch_size;
  if (sub->count("--window")) cfg.training.neighborhood_window = a.window;
  if (sub->count("--seed")) cfg.training.seed = a.seed;

  require_path(cfg.paths.corpus, "--corpus", "corpus");
  require_path(cfg.paths.ontology, "--ontology", "ontology");
  require_path(cfg.paths.checkpoint, "--checkpoint", "checkpoint");
  cfg.model.validate();
  cfg.training.validate();

  std::vector<ea2e::Document> docs = ea2e::load_corpus(cfg.paths.corpus);
  ea2e::Ontology onto = ea2e::load_ontology(cfg.paths.ontology);
  ea2e::Vocabulary vocab = ea2e::Vocabulary::from_corpus(docs, onto);
  ea2e::ExtractorModel model(vocab, cfg.model);
  ea2e::TrainingRunReport report = model.train(docs, onto, cfg.training);
  model.save(cfg.paths.checkpoint);

  for (const std::string& warning : report.warnings) {
    std::fprintf(stderr, "warning: %s\n", warning.c_str());
  }
  std::printf("instances: %zu\nsteps: %zu\n", report.instances,
              report.steps.size());
  if (!report.steps.empty()) {
    const ea2e::TrainingStepReport& last = report.steps.back();
    std::printf("final_loss_total: %.6f\nfinal_loss_E: %.6f\n"
                "final_loss_E_aug: %.6f\nfinal_loss_T: %.6f\n",
                last.loss_total, last.loss_E, last.loss_E_aug, last.loss_T);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// predict

struct PredictArgs {
  std::string config;
  std::string corpus;
  std::string ontology;
  std::string checkpoint;
  std::string out;
  std::string trace;
  std::string answer_key;
  std::size_t iterations = 0;
  std::size_t window = 0;
  bool oracle = false;
  bool early_stop = false;
};

void add_predict(CLI::App& app, PredictArgs& a, CLI::App** out) {
  CLI::App* sub = app.add_subcommand(
      "predict", "Run iterative inference and write predictions");
  sub->add_option("--config", a.config, "JSON run configuration file");
  sub->add_option("--corpus", a.corpus, "Input corpus JSONL path");
  sub->add_option("--ontology", a.ontology, "Ontology JSON path");
  sub->add_option("--checkpoint", a.checkpoint, "Model checkpoint path");
  sub->add_option("--out", a.out, "Output predictions JSONL path");
  sub->add_option("--iterations", a.iterations, "Maximum inference iterations");
  sub->add_option("--window", a.window, "Neighborhood window in tokens");
  sub->add_option("--trace", a.trace, "Optional per-iteration trace JSONL path");
  sub->add_flag("--oracle", a.oracle,
                "Use the scripted oracle reader instead of a model checkpoint");
  sub->add_option("--answer-key", a.answer_key,
                  "Answer key JSON supplying the oracle's rules");
  sub->add_flag("--early-stop", a.early_stop,
                "Stop iterating once predictions reach a fixpoint");
  *out = sub;
}

int run_predict(const CLI::App* sub, const PredictArgs& a) {
  ea2e::RunConfig cfg = load_config_or_default(a.config);
  if (sub->count("--corpus")) cfg.paths.corpus = a.corpus;
  if (sub->count("--ontology")) cfg.paths.ontology = a.ontology;
  if (sub->count("--checkpoint")) cfg.paths.checkpoint = a.checkpoint;
  if (sub->count("--out")) cfg.paths.predictions = a.out;
  if (sub->count("--trace")) cfg.paths.trace = a.trace;
  if (sub->count("--answer-key")) cfg.paths.answer_key = a.answer_key;
  if (sub->count("--iterations")) cfg.inference.max_iterations = a.iterations;
  if (sub->count("--window")) cfg.inference.window = a.window;
  if (a.early_stop) cfg.inference.early_stop_on_fixpoint = true;

  require_path(cfg.paths.corpus, "--corpus", "corpus");
  require_path(cfg.paths.ontology, "--ontology", "ontology");
  require_path(cfg.paths.predictions, "--out", "predictions");
  cfg.inference.validate();

  std::vector<ea2e::Document> docs = ea2e::load_corpus(cfg.paths.corpus);
  ea2e::Ontology onto = ea2e::load_ontology(cfg.paths.ontology);

  std::unique_ptr<ea2e::ExtractorModel> model;
  std::unique_ptr<ea2e::Extractor> extractor;
  if (a.oracle) {
    require_path(cfg.paths.answer_key, "--answer-key", "answer_key");
    ea2e::AnswerKey key = ea2e::load_answer_key(cfg.paths.answer_key);
    extractor = std::make_unique<ea2e::OracleExtractor>(key.rules);
  } else {
    require_path(cfg.paths.checkpoint, "--checkpoint", "checkpoint");
    model = std::make_unique<ea2e::ExtractorModel>(
        ea2e::ExtractorModel::load(cfg.paths.checkpoint));
    extractor = std::make_unique<ea2e::ModelExtractor>(model.get(),
                                                       cfg.inference.decode);
  }

  std::vector<ea2e::IterationTrace> traces;
  traces.reserve(docs.size());
  std::size_t events = 0;
  std::size_t fixpoints = 0;
  for (const ea2e::Document& doc : docs) {
    traces.push_back(
        ea2e::infer_document(doc, onto, *extractor, cfg.inference));
    events += doc.events.size();
    if (traces.back().fixpoint_iteration) ++fixpoints;
  }

  ea2e::write_predictions(cfg.paths.predictions, traces);
  if (!cfg.paths.trace.empty()) {
    ea2e::write_traces(cfg.paths.trace, traces);
  }
  std::printf("documents: %zu\nevents: %zu\nfixpoint_documents: %zu\n",
              docs.size(), events, fixpoints);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string config;
  std::string pred;
  std::string gold;
  std::string report;
  double consistency_threshold = 1.0;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a, CLI::App** out) {
  CLI::App* sub = app.add_subcommand(
      "evaluate", "Score predictions against a gold corpus");
  sub->add_option("--config", a.config, "JSON run configuration file");
  sub->add_option("--pred", a.pred, "Predictions JSONL path");
  sub->add_option("--gold", a.gold, "Gold corpus JSONL path");
  sub->add_option("--report", a.report, "Output report JSON path");
  sub->add_option("--consistency-threshold", a.consistency_threshold,
                  "Majority-share threshold for the consistency diagnostic");
  *out = sub;
}

int run_evaluate(const CLI::App* sub, const EvaluateArgs& a) {
  ea2e::RunConfig cfg = load_config_or_default(a.config);
  if (sub->count("--pred")) cfg.paths.predictions = a.pred;
  if (sub->count("--gold")) cfg.paths.corpus = a.gold;
  if (sub->count("--report")) cfg.paths.report = a.report;

  require_path(cfg.paths.predictions, "--pred", "predictions");
  require_path(cfg.paths.corpus, "--gold", "corpus");
  require_path(cfg.paths.report, "--report", "report");

  std::vector<ea2e::Document> docs = ea2e::load_corpus(cfg.paths.corpus);
  ea2e::EventAssignments pred = ea2e::load_predictions(cfg.paths.predictions);
  ea2e::EventAssignments gold = ea2e::gold_assignments_map(docs);
  ea2e::ScoreReport scores = ea2e::score_all(pred, gold, docs);
  ea2e::ConsistencyReport consistency =
      ea2e::consistency_report(pred, docs, a.consistency_threshold);

  ea2e::Json out = ea2e::score_report_to_json(scores);
  out["consistency"] = ea2e::consistency_to_json(consistency);
  ea2e::write_json_file(cfg.paths.report, out);

  std::printf("head_identification_f1: %.6f\nhead_classification_f1: %.6f\n"
              "coref_identification_f1: %.6f\ncoref_classification_f1: %.6f\n"
              "consistency_summary: %.6f\n",
              scores.head_identification.f1, scores.head_classification.f1,
              scores.coref_identification.f1, scores.coref_classification.f1,
              consistency.summary);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// augment

struct AugmentArgs {
  std::string config;
  std::string corpus;
  std::string assignments;
  std::string out;
  std::size_t window = 0;
};

void add_augment(CLI::App& app, AugmentArgs& a, CLI::App** out) {
  CLI::App* sub = app.add_subcommand(
      "augment", "Tag neighbor arguments into every event's context");
  sub->add_option("--config", a.config, "JSON run configuration file");
  sub->add_option("--corpus", a.corpus, "Input corpus JSONL path");
  sub->add_option("--assignments", a.assignments,
                  "Argument assignments JSONL (prediction rows)");
  sub->add_option("--out", a.out, "Output augmented contexts JSONL path");
  sub->add_option("--window", a.window, "Neighborhood window in tokens");
  *out = sub;
}

int run_augment(const CLI::App* sub, const AugmentArgs& a) {
  ea2e::RunConfig cfg = load_config_or_default(a.config);
  if (sub->count("--corpus")) cfg.paths.corpus = a.corpus;
  if (sub->count("--assignments")) cfg.paths.assignments = a.assignments;
  if (sub->count("--out")) cfg.paths.augmented = a.out;
  std::size_t window =
      sub->count("--window") ? a.window : cfg.inference.window;

  require_path(cfg.paths.corpus, "--corpus", "corpus");
  require_path(cfg.paths.assignments, "--assignments", "assignments");
  require_path(cfg.paths.augmented, "--out", "augmented");
  if (window == 0) {
    throw UsageError("--window must be positive");
  }

  std::vector<ea2e::Document> docs = ea2e::load_corpus(cfg.paths.corpus);
  ea2e::EventAssignments all =
      ea2e::load_predictions(cfg.paths.assignments);

  std::vector<ea2e::AugmentedContext> contexts;
  for (const ea2e::Document& doc : docs) {
    // Events without a row contribute no tags.
    ea2e::AssignmentsMap doc_map;
    for (const ea2e::EventMention& ev : doc.events) {
      auto it = all.find(ev.event_id);
      doc_map[ev.event_id] =
          it == all.end() ? std::vector<ea2e::RoleAssignment>{} : it->second;
    }
    for (const ea2e::EventMention& ev : doc.events) {
      ea2e::Neighborhood nbhd = ea2e::neighbors(doc, ev.event_id, window);
      contexts.push_back(ea2e::augment(doc, ev.event_id, doc_map, nbhd));
    }
  }
  ea2e::write_augmented(cfg.paths.augmented, contexts);
  std::printf("documents: %zu\ncontexts: %zu\n", docs.size(), contexts.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-aware document-level argument extraction toolkit"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  TrainArgs train_args;
  PredictArgs predict_args;
  EvaluateArgs evaluate_args;
  AugmentArgs augment_args;
  CLI::App* synth_cmd = nullptr;
  CLI::App* train_cmd = nullptr;
  CLI::App* predict_cmd = nullptr;
  CLI::App* evaluate_cmd = nullptr;
  CLI::App* augment_cmd = nullptr;
  add_synth(app, synth_args, &synth_cmd);
  add_train(app, train_args, &train_cmd);
  add_predict(app, predict_args, &predict_cmd);
  add_evaluate(app, evaluate_args, &evaluate_cmd);
  add_augment(app, augment_args, &augment_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) return run_synth(synth_cmd, synth_args);
    if (train_cmd->parsed()) return run_train(train_cmd, train_args);
    if (predict_cmd->parsed()) return run_predict(predict_cmd, predict_args);
    if (evaluate_cmd->parsed()) return run_evaluate(evaluate_cmd, evaluate_args);
    if (augment_cmd->parsed()) return run_augment(augment_cmd, augment_args);
    std::fprintf(stderr, "error: no subcommand given\n");
    return kExitUsage;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const ea2e::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
}
