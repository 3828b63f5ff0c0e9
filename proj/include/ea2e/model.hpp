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

// Conditional generator p(y | template, context): a small encoder-decoder
// over learned embeddings, trained with a three-term objective —
// teacher-forced extraction loss on the regular context, the same loss on
// the tag-augmented context, and an alignment term pulling the two output
// distributions together at gold argument positions:
//   total = L_E + alpha * L_E' + beta * L_T.
//
// Decoding is greedy and copy-restricted: only tokens present in the input
// sequence (plus the placeholder, join, and end tokens) can be generated.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "ea2e/augmentation.hpp"
#include "ea2e/autodiff.hpp"
#include "ea2e/common.hpp"
#include "ea2e/corpus.hpp"
#include "ea2e/nn.hpp"
#include "ea2e/ontology.hpp"
#include "ea2e/templating.hpp"
#include "ea2e/tokens.hpp"

namespace ea2e {

// ---------------------------------------------------------------------------
// Vocabulary

class Vocabulary {
 public:
  Vocabulary() { add_specials(); }

  // Reconstructs a vocabulary from an id-ordered token list (checkpoints).
  static Vocabulary from_tokens(const std::vector<std::string>& tokens) {
    Vocabulary v;
    if (tokens.size() < v.tokens_.size() ||
        !std::equal(v.tokens_.begin(), v.tokens_.end(), tokens.begin())) {
      throw ValidationError("vocabulary does not start with the reserved tokens");
    }
    for (std::size_t i = v.tokens_.size(); i < tokens.size(); ++i) {
      v.add(tokens[i]);
    }
    return v;
  }

  // Tokens from all documents, template literals, and role names; reserved
  // tokens first, the rest sorted for a deterministic id assignment.
  static Vocabulary from_corpus(const std::vector<Document>& docs,
                                const Ontology& ontology) {
    std::set<std::string> seen;
    for (const auto& doc : docs) {
      seen.insert(doc.tokens.begin(), doc.tokens.end());
    }
    for (const auto& [type, tpl] : ontology.all()) {
      for (const auto& tok : tpl.tokens) seen.insert(tok.text);
      for (const auto& role : tpl.roles) {
        for (const auto& w : split_whitespace(role)) seen.insert(w);
      }
    }
    Vocabulary v;
    for (const auto& tok : seen) {
      if (!v.contains(tok)) v.add(tok);
    }
    return v;
  }

  bool contains(const std::string& tok) const { return index_.count(tok) != 0; }

  int id(const std::string& tok) const {
    auto it = index_.find(tok);
    return it == index_.end() ? unk_id() : it->second;
  }

  const std::string& token(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
      throw std::logic_error("vocabulary id out of range");
    }
    return tokens_[static_cast<std::size_t>(id)];
  }

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  int start_id() const { return 0; }
  int end_id() const { return 1; }
  int arg_id() const { return 2; }
  int unk_id() const { return 6; }
  int join_id() const { return 7; }

  // Unknown tokens map to the unknown id.
  std::vector<int> encode(const std::vector<std::string>& tokens) const {
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(id(t));
    return ids;
  }

  // Unknown tokens are an error (used for supervision targets).
  std::vector<int> encode_strict(const std::vector<std::string>& tokens) const {
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) {
      auto it = index_.find(t);
      if (it == index_.end()) {
        throw ValidationError(msg("token '", t, "' not in vocabulary"));
      }
      ids.push_back(it->second);
    }
    return ids;
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  void add(const std::string& tok) {
    if (index_.count(tok)) {
      throw ValidationError(msg("duplicate vocabulary token '", tok, "'"));
    }
    index_[tok] = static_cast<int>(tokens_.size());
    tokens_.push_back(tok);
  }

  void add_specials() {
    for (const char* t : {kSeqStart, kSeqEnd, kArgPlaceholder, kTagOpen,
                          kTagClose, kTriggerMark, kUnknown, kFillJoin}) {
      add(t);
    }
  }

  std::vector<std::string> tokens_;
  std::map<std::string, int> index_;
};

// ---------------------------------------------------------------------------
// Configuration

struct ModelConfig {
  std::size_t embedding_dim = 48;
  std::size_t feedforward_dim = 96;
  std::size_t encoder_layers = 2;
  std::size_t decoder_layers = 2;
  std::size_t max_input_len = 320;
  std::size_t max_output_len = 48;
  std::uint64_t init_seed = 1;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;

  void validate() const {
    if (embedding_dim == 0 || feedforward_dim == 0 || max_input_len == 0 ||
        max_output_len == 0) {
      throw ValidationError("model dimensions must be positive");
    }
  }
};

struct TrainingConfig {
  double alpha = 1.0;
  double beta = 0.5;
  double learning_rate = 3e-5;
  std::size_t epochs = 4;
  std::size_t batch_size = 2;
  std::size_t neighborhood_window = kDefaultNeighborWindow;
  std::uint64_t seed = 0;

  friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;

  void validate() const {
    if (alpha < 0 || beta < 0) {
      throw ValidationError("loss weights alpha and beta must be non-negative");
    }
    if (neighborhood_window == 0) {
      throw ValidationError("neighborhood window must be positive");
    }
    if (batch_size == 0) {
      throw ValidationError("batch size must be positive");
    }
  }
};

struct DecodeConfig {
  std::size_t max_len = 0;  // 0: use the model's max_output_len

  friend bool operator==(const DecodeConfig&, const DecodeConfig&) = default;
};

struct TrainingStepReport {
  std::size_t step = 0;
  double loss_E = 0;
  double loss_E_aug = 0;
  double loss_T = 0;
  double loss_total = 0;
};

struct TrainingRunReport {
  std::vector<TrainingStepReport> steps;
  std::size_t instances = 0;
  std::size_t skipped_events = 0;  // event type missing from the ontology
  std::vector<std::string> warnings;
};

struct LossBreakdown {
  double extraction = 0;
  double augmented = 0;
  double alignment = 0;
  double total = 0;
};

// ---------------------------------------------------------------------------
// Greedy decoding over an abstract per-step scorer (separated from the model
// so the copy mask and tie-breaking are testable in isolation).

// Maps a decoder prefix (ids, starting with the sequence-start token) to a
// logit row over the vocabulary.
using StepScorer =
    std::function<Eigen::RowVectorXd(const std::vector<int>& prefix)>;

// Greedy argmax decoding restricted to `allowed` ids; ties break toward the
// lowest id. Stops when `end_id` is produced or `max_len` tokens emitted.
inline std::vector<int> greedy_decode(const StepScorer& score,
                                      const std::vector<char>& allowed,
                                      int start_id, int end_id,
                                      std::size_t max_len) {
  std::vector<int> prefix{start_id};
  std::vector<int> emitted;
  while (emitted.size() < max_len) {
    const Eigen::RowVectorXd logits = score(prefix);
    int best = -1;
    for (int v = 0; v < logits.size(); ++v) {
      if (!allowed[static_cast<std::size_t>(v)]) continue;
      if (best < 0 || logits(v) > logits(best)) best = v;
    }
    if (best < 0 || best == end_id) break;
    emitted.push_back(best);
    prefix.push_back(best);
  }
  return emitted;
}

// ---------------------------------------------------------------------------
// Model

class ExtractorModel {
 public:
  ExtractorModel(Vocabulary vocab, ModelConfig config)
      : vocab_(std::move(vocab)), config_(config) {
    config_.validate();
    build_parameters();
    initialize_parameters();
  }

  const Vocabulary& vocab() const { return vocab_; }
  const ModelConfig& config() const { return config_; }
  ParameterStore& params() { return store_; }
  const ParameterStore& params() const { return store_; }

  // --- losses ---------------------------------------------------------

  // Teacher-forced negative log-likelihood of the filled template (plus the
  // end marker) given the input sequence.
  double extraction_loss(const InputSequence& input,
                         const FilledTemplate& target) const {
    ad::Tape tape;
    Binding bound = bind_frozen(tape);
    const Targets tgt = make_targets(target);
    ad::Var logits = decode(tape, bound, encode(tape, bound, input), tgt.input);
    return tape.scalar(tape.cross_entropy(logits, tgt.output));
  }

  // Sum over gold-argument decoder positions of the Euclidean distance
  // between the output distributions under the two contexts.
  double alignment_loss(const InputSequence& regular,
                        const InputSequence& augmented,
                        const FilledTemplate& target) const {
    check_same_template(regular, augmented);
    ad::Tape tape;
    Binding bound = bind_frozen(tape);
    const Targets tgt = make_targets(target);
    ad::Var logits_reg =
        decode(tape, bound, encode(tape, bound, regular), tgt.input);
    ad::Var logits_aug =
        decode(tape, bound, encode(tape, bound, augmented), tgt.input);
    ad::Var align =
        tape.l2_align(tape.softmax_rows(logits_reg),
                      tape.softmax_rows(logits_aug), tgt.argument_positions);
    return tape.scalar(align);
  }

  static double total_loss(double loss_E, double loss_E_aug, double loss_T,
                           const TrainingConfig& config) {
    config.validate();
    return loss_E + config.alpha * loss_E_aug + config.beta * loss_T;
  }

  // All three losses on one tape; when `with_grad` is set, gradients of the
  // total are accumulated into the parameter store. With alpha = beta = 0 the
  // augmented pass is skipped entirely.
  LossBreakdown instance_losses(const InputSequence& regular,
                                const InputSequence& augmented,
                                const FilledTemplate& target,
                                const TrainingConfig& config, bool with_grad) {
    config.validate();
    check_same_template(regular, augmented);
    ad::Tape tape;
    Binding bound = with_grad ? bind_trainable(tape) : bind_frozen(tape);
    const Targets tgt = make_targets(target);

    ad::Var logits_reg =
        decode(tape, bound, encode(tape, bound, regular), tgt.input);
    ad::Var loss_e = tape.cross_entropy(logits_reg, tgt.output);

    LossBreakdown out;
    out.extraction = tape.scalar(loss_e);
    ad::Var total = loss_e;
    if (config.alpha != 0.0 || config.beta != 0.0) {
      ad::Var logits_aug =
          decode(tape, bound, encode(tape, bound, augmented), tgt.input);
      ad::Var loss_aug = tape.cross_entropy(logits_aug, tgt.output);
      ad::Var loss_align =
          tape.l2_align(tape.softmax_rows(logits_reg),
                        tape.softmax_rows(logits_aug), tgt.argument_positions);
      out.augmented = tape.scalar(loss_aug);
      out.alignment = tape.scalar(loss_align);
      total = tape.add(total, tape.scale(loss_aug, config.alpha));
      total = tape.add(total, tape.scale(loss_align, config.beta));
    }
    out.total = tape.scalar(total);
    if (with_grad) tape.backward(total);
    return out;
  }

  // Convenience: builds the regular and gold-augmented inputs for one event
  // and evaluates instance_losses on them.
  LossBreakdown event_losses(const Document& doc, const EventMention& event,
                             const EventTemplate& tpl,
                             const TrainingConfig& config, bool with_grad) {
    const auto instance = prepare_instance(doc, event, tpl, config);
    return instance_losses(instance.regular, instance.augmented,
                           instance.target, config, with_grad);
  }

  // --- prediction -----------------------------------------------------

  ParseResult predict_result(const InputSequence& input,
                             const EventTemplate& tpl,
                             const DecodeConfig& decode_cfg = {}) const {
    const std::vector<int> input_ids = check_input_len(input);

    // The encoder output is fixed for the whole decode; compute it once.
    ad::Mat memory;
    {
      ad::Tape tape;
      Binding bound = bind_frozen(tape);
      memory = tape.value(encode(tape, bound, input));
    }

    std::vector<char> allowed(static_cast<std::size_t>(vocab_.size()), 0);
    for (int id : input_ids) allowed[static_cast<std::size_t>(id)] = 1;
    allowed[static_cast<std::size_t>(vocab_.arg_id())] = 1;
    allowed[static_cast<std::size_t>(vocab_.join_id())] = 1;
    allowed[static_cast<std::size_t>(vocab_.end_id())] = 1;
    allowed[static_cast<std::size_t>(vocab_.unk_id())] = 0;

    std::size_t max_len = decode_cfg.max_len == 0 ? config_.max_output_len
                                                  : decode_cfg.max_len;
    max_len = std::min(max_len, config_.max_output_len - 1);

    StepScorer scorer = [&](const std::vector<int>& prefix) {
      ad::Tape tape;
      Binding bound = bind_frozen(tape);
      ad::Var logits = decode(tape, bound, tape.input(memory), prefix);
      return Eigen::RowVectorXd(
          tape.value(logits).row(tape.value(logits).rows() - 1));
    };
    const std::vector<int> emitted = greedy_decode(
        scorer, allowed, vocab_.start_id(), vocab_.end_id(), max_len);

    std::vector<std::string> tokens;
    tokens.reserve(emitted.size());
    for (int id : emitted) tokens.push_back(vocab_.token(id));
    return parse_filled(tpl, tokens);
  }

  FilledTemplate predict(const InputSequence& input, const EventTemplate& tpl,
                         const DecodeConfig& decode_cfg = {}) const {
    return predict_result(input, tpl, decode_cfg).filled;
  }

  // --- training -------------------------------------------------------

  TrainingRunReport train(const std::vector<Document>& docs,
                          const Ontology& ontology,
                          const TrainingConfig& config) {
    config.validate();
    TrainingRunReport report;

    struct Instance {
      InputSequence regular;
      InputSequence augmented;
      FilledTemplate target;
    };
    std::vector<Instance> instances;
    for (const auto& doc : docs) {
      for (const auto& event : doc.events) {
        if (!ontology.has(event.event_type)) {
          ++report.skipped_events;
          report.warnings.push_back(
              msg("document '", doc.doc_id, "': event '", event.event_id,
                  "' has unknown type '", event.event_type, "'; skipped"));
          continue;
        }
        const auto& tpl = ontology.get(event.event_type);
        auto prepared = prepare_instance(doc, event, tpl, config);
        instances.push_back(
            {std::move(prepared.regular), std::move(prepared.augmented),
             std::move(prepared.target)});
      }
    }
    report.instances = instances.size();
    if (instances.empty() || config.epochs == 0) return report;

    AdamOptimizer optimizer(&store_, config.learning_rate);
    std::vector<std::size_t> order(instances.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      Rng rng(config.seed + 0x9E3779B97F4A7C15ull * (epoch + 1));
      rng.shuffle(order);
      for (std::size_t begin = 0; begin < order.size();
           begin += config.batch_size) {
        const std::size_t end =
            std::min(begin + config.batch_size, order.size());
        const double inv = 1.0 / static_cast<double>(end - begin);
        store_.zero_grads();
        TrainingStepReport sr;
        sr.step = ++step;
        for (std::size_t i = begin; i < end; ++i) {
          const Instance& inst = instances[order[i]];
          const LossBreakdown losses = instance_losses(
              inst.regular, inst.augmented, inst.target, config, true);
          sr.loss_E += losses.extraction * inv;
          sr.loss_E_aug += losses.augmented * inv;
          sr.loss_T += losses.alignment * inv;
          sr.loss_total += losses.total * inv;
        }
        store_.scale_grads(inv);
        optimizer.step();
        report.steps.push_back(sr);
      }
    }
    return report;
  }

  // --- checkpointing --------------------------------------------------

  Json to_json() const {
    Json j;
    j["format"] = "ea2e_checkpoint";
    j["version"] = 1;
    Json m;
    m["embedding_dim"] = config_.embedding_dim;
    m["feedforward_dim"] = config_.feedforward_dim;
    m["encoder_layers"] = config_.encoder_layers;
    m["decoder_layers"] = config_.decoder_layers;
    m["max_input_len"] = config_.max_input_len;
    m["max_output_len"] = config_.max_output_len;
    m["init_seed"] = config_.init_seed;
    j["model"] = std::move(m);
    j["vocabulary"] = vocab_.tokens();
    Json params = Json::array();
    for (const auto& e : store_.entries()) {
      Json pj;
      pj["name"] = e->name;
      pj["rows"] = e->value.rows();
      pj["cols"] = e->value.cols();
      Json values = Json::array();
      for (Eigen::Index r = 0; r < e->value.rows(); ++r) {
        for (Eigen::Index c = 0; c < e->value.cols(); ++c) {
          values.push_back(e->value(r, c));
        }
      }
      pj["values"] = std::move(values);
      params.push_back(std::move(pj));
    }
    j["parameters"] = std::move(params);
    return j;
  }

  static ExtractorModel from_json(const Json& j) {
    if (!j.contains("format") || j.at("format") != "ea2e_checkpoint") {
      throw ValidationError("not a model checkpoint file");
    }
    if (!j.contains("version") || j.at("version").get<int>() != 1) {
      throw ValidationError("unsupported checkpoint version");
    }
    const Json& m = detail::require_field(j, "model", "checkpoint");
    ModelConfig config;
    config.embedding_dim = detail::size_field(m, "embedding_dim", "checkpoint");
    config.feedforward_dim =
        detail::size_field(m, "feedforward_dim", "checkpoint");
    config.encoder_layers = detail::size_field(m, "encoder_layers", "checkpoint");
    config.decoder_layers = detail::size_field(m, "decoder_layers", "checkpoint");
    config.max_input_len = detail::size_field(m, "max_input_len", "checkpoint");
    config.max_output_len = detail::size_field(m, "max_output_len", "checkpoint");
    config.init_seed = detail::require_field(m, "init_seed", "checkpoint")
                           .get<std::uint64_t>();
    std::vector<std::string> vocab_tokens;
    for (const auto& t : detail::require_field(j, "vocabulary", "checkpoint")) {
      vocab_tokens.push_back(t.get<std::string>());
    }
    ExtractorModel model(Vocabulary::from_tokens(vocab_tokens), config);

    const Json& params = detail::require_field(j, "parameters", "checkpoint");
    if (params.size() != model.store_.entries().size()) {
      throw ValidationError(msg("checkpoint has ", params.size(),
                                " parameter entries; model needs ",
                                model.store_.entries().size()));
    }
    for (const auto& pj : params) {
      const std::string name =
          detail::require_field(pj, "name", "checkpoint parameter")
              .get<std::string>();
      if (!model.store_.has(name)) {
        throw ValidationError(msg("unknown parameter '", name,
                                  "' in checkpoint"));
      }
      ParamEntry& entry = model.store_.entry(name);
      const auto rows = detail::size_field(pj, "rows", "checkpoint parameter");
      const auto cols = detail::size_field(pj, "cols", "checkpoint parameter");
      if (static_cast<Eigen::Index>(rows) != entry.value.rows() ||
          static_cast<Eigen::Index>(cols) != entry.value.cols()) {
        throw ValidationError(msg("parameter '", name, "' has shape ", rows,
                                  "x", cols, "; expected ", entry.value.rows(),
                                  "x", entry.value.cols()));
      }
      const Json& values =
          detail::require_field(pj, "values", "checkpoint parameter");
      if (values.size() != static_cast<std::size_t>(entry.value.size())) {
        throw ValidationError(msg("parameter '", name, "' has ", values.size(),
                                  " values; expected ", entry.value.size()));
      }
      std::size_t k = 0;
      for (Eigen::Index r = 0; r < entry.value.rows(); ++r) {
        for (Eigen::Index c = 0; c < entry.value.cols(); ++c) {
          entry.value(r, c) = values[k++].get<double>();
        }
      }
    }
    return model;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw ValidationError(msg("cannot write checkpoint file '", path, "'"));
    }
    out << to_json().dump() << "\n";
  }

  static ExtractorModel load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
      throw ValidationError(msg("cannot open checkpoint file '", path, "'"));
    }
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      throw ValidationError(msg(path, ": parse failure: ", e.what()));
    }
    try {
      return from_json(j);
    } catch (const ValidationError& e) {
      throw ValidationError(msg(path, ": ", e.what()));
    }
  }

  // Regular/augmented input pair plus supervision target for one event.
  struct PreparedInstance {
    InputSequence regular;
    InputSequence augmented;
    FilledTemplate target;
  };

  PreparedInstance prepare_instance(const Document& doc,
                                    const EventMention& event,
                                    const EventTemplate& tpl,
                                    const TrainingConfig& config) const {
    PreparedInstance out;
    const AugmentedContext regular = regular_context(doc, event.event_id);
    const AugmentedContext augmented =
        augment(doc, event.event_id, gold_assignments(doc),
                neighbors(doc, event.event_id, config.neighborhood_window));
    const std::vector<std::string> template_tokens = tpl.token_strings();
    out.regular = build_input(template_tokens, regular.tokens);
    out.augmented = build_input(template_tokens, augmented.tokens);
    out.target = fill_template(tpl, gold_role_fills(doc, event));
    return out;
  }

 private:
  struct Binding {
    std::map<std::string, ad::Var> vars;
    const ad::Var& operator[](const std::string& name) const {
      auto it = vars.find(name);
      if (it == vars.end()) {
        throw std::logic_error("unbound parameter: " + name);
      }
      return it->second;
    }
  };

  struct Targets {
    std::vector<int> input;               // <s> + filled tokens
    std::vector<int> output;              // filled tokens + </s>
    std::vector<int> argument_positions;  // decoder rows of argument tokens
  };

  void build_parameters() {
    const auto d = static_cast<Eigen::Index>(config_.embedding_dim);
    const auto ff = static_cast<Eigen::Index>(config_.feedforward_dim);
    const auto v = static_cast<Eigen::Index>(vocab_.size());
    store_.create("embedding", v, d);
    store_.create("pos_input", static_cast<Eigen::Index>(config_.max_input_len),
                  d);
    store_.create("pos_output",
                  static_cast<Eigen::Index>(config_.max_output_len), d);
    for (std::size_t i = 0; i < config_.encoder_layers; ++i) {
      const std::string p = msg("enc", i, ".");
      store_.create(p + "mix.wa", d, d);
      store_.create(p + "mix.wb", d, d);
      store_.create(p + "mix.bias", 1, d);
      for (const char* w : {"attn.wq", "attn.wk", "attn.wv", "attn.wo"}) {
        store_.create(p + w, d, d);
      }
      store_.create(p + "ffn.w1", d, ff);
      store_.create(p + "ffn.b1", 1, ff);
      store_.create(p + "ffn.w2", ff, d);
      store_.create(p + "ffn.b2", 1, d);
    }
    for (std::size_t i = 0; i < config_.decoder_layers; ++i) {
      const std::string p = msg("dec", i, ".");
      for (const char* w : {"self.wq", "self.wk", "self.wv", "self.wo",
                            "cross.wq", "cross.wk", "cross.wv", "cross.wo"}) {
        store_.create(p + w, d, d);
      }
      store_.create(p + "ffn.w1", d, ff);
      store_.create(p + "ffn.b1", 1, ff);
      store_.create(p + "ffn.w2", ff, d);
      store_.create(p + "ffn.b2", 1, d);
    }
    store_.create("output_bias", 1, v);
  }

  void initialize_parameters() {
    Rng rng(config_.init_seed);
    for (const auto& e : store_.entries()) {
      if (e->name == "output_bias" || e->name.ends_with(".bias") ||
          e->name.ends_with(".b1") || e->name.ends_with(".b2")) {
        continue;  // biases start at zero
      }
      const double stddev =
          (e->name == "embedding" || e->name.starts_with("pos_"))
              ? 0.1
              : std::sqrt(1.0 / static_cast<double>(e->value.rows()));
      for (Eigen::Index r = 0; r < e->value.rows(); ++r) {
        for (Eigen::Index c = 0; c < e->value.cols(); ++c) {
          e->value(r, c) = stddev * rng.normal();
        }
      }
    }
  }

  Binding bind_frozen(ad::Tape& tape) const {
    Binding b;
    for (const auto& e : store_.entries()) {
      b.vars.emplace(e->name, tape.input(e->value));
    }
    return b;
  }

  Binding bind_trainable(ad::Tape& tape) {
    Binding b;
    for (const auto& e : store_.entries()) {
      b.vars.emplace(e->name, tape.param(e->value, &e->grad));
    }
    return b;
  }

  static std::vector<int> iota_rows(std::size_t n) {
    std::vector<int> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
  }

  std::vector<int> check_input_len(const InputSequence& input) const {
    if (input.tokens.size() > config_.max_input_len) {
      throw ValidationError(msg("input length ", input.tokens.size(),
                                " exceeds maximum ", config_.max_input_len));
    }
    return vocab_.encode(input.tokens);
  }

  Targets make_targets(const FilledTemplate& target) const {
    Targets t;
    const std::vector<int> filled_ids = vocab_.encode_strict(target.tokens);
    if (filled_ids.size() + 1 > config_.max_output_len) {
      throw ValidationError(msg("target length ", filled_ids.size() + 1,
                                " exceeds maximum ", config_.max_output_len));
    }
    t.input.push_back(vocab_.start_id());
    t.input.insert(t.input.end(), filled_ids.begin(), filled_ids.end());
    t.output = filled_ids;
    t.output.push_back(vocab_.end_id());
    for (const auto& range : target.fill_ranges) {
      for (std::size_t i = range.begin; i < range.end; ++i) {
        t.argument_positions.push_back(static_cast<int>(i));
      }
    }
    return t;
  }

  static void check_same_template(const InputSequence& regular,
                                  const InputSequence& augmented) {
    const auto slice = [](const InputSequence& s) {
      return std::vector<std::string>(
          s.tokens.begin() + static_cast<std::ptrdiff_t>(s.template_begin),
          s.tokens.begin() + static_cast<std::ptrdiff_t>(s.template_end));
    };
    if (slice(regular) != slice(augmented)) {
      throw ValidationError(
          "regular and augmented inputs carry different templates");
    }
  }

  // Token + position embeddings for a sequence.
  ad::Var embed(ad::Tape& tape, const Binding& b, const std::vector<int>& ids,
                const std::string& pos_table) const {
    ad::Var tok = tape.gather_rows(b["embedding"], ids);
    ad::Var pos = tape.gather_rows(b[pos_table], iota_rows(ids.size()));
    return tape.add(tok, pos);
  }

  ad::Var attention(ad::Tape& tape, const Binding& b, ad::Var queries,
                    ad::Var memory, const std::string& prefix,
                    bool causal) const {
    const double inv_sqrt_d =
        1.0 / std::sqrt(static_cast<double>(config_.embedding_dim));
    ad::Var q = tape.matmul(queries, b[prefix + ".wq"]);
    ad::Var k = tape.matmul(memory, b[prefix + ".wk"]);
    ad::Var v = tape.matmul(memory, b[prefix + ".wv"]);
    ad::Var scores = tape.scale(tape.matmul_nt(q, k), inv_sqrt_d);
    if (causal) {
      const Eigen::Index n = tape.value(scores).rows();
      ad::Mat mask = ad::Mat::Zero(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) mask(i, j) = -1e9;
      }
      scores = tape.add_const(scores, mask);
    }
    ad::Var mixed = tape.matmul(tape.softmax_rows(scores), v);
    return tape.matmul(mixed, b[prefix + ".wo"]);
  }

  ad::Var feedforward(ad::Tape& tape, const Binding& b, ad::Var x,
                      const std::string& prefix) const {
    ad::Var h = tape.tanh(tape.add_rowvec(tape.matmul(x, b[prefix + ".w1"]),
                                          b[prefix + ".b1"]));
    return tape.add_rowvec(tape.matmul(h, b[prefix + ".w2"]),
                           b[prefix + ".b2"]);
  }

  // Width-2 causal mixing: each position sees itself and its predecessor.
  ad::Var localmix(ad::Tape& tape, const Binding& b, ad::Var x,
                   const std::string& prefix) const {
    ad::Var mixed = tape.add(tape.matmul(x, b[prefix + ".wa"]),
                             tape.matmul(tape.shift_rows_down(x),
                                         b[prefix + ".wb"]));
    return tape.tanh(tape.add_rowvec(mixed, b[prefix + ".bias"]));
  }

  ad::Var encode(ad::Tape& tape, const Binding& b,
                 const InputSequence& input) const {
    return encode_ids(tape, b, check_input_len(input));
  }

  ad::Var encode_ids(ad::Tape& tape, const Binding& b,
                     const std::vector<int>& ids) const {
    ad::Var x = embed(tape, b, ids, "pos_input");
    for (std::size_t i = 0; i < config_.encoder_layers; ++i) {
      const std::string p = msg("enc", i);
      x = tape.add(x, localmix(tape, b, x, p + ".mix"));
      x = tape.add(x, attention(tape, b, x, x, p + ".attn", false));
      x = tape.add(x, feedforward(tape, b, x, p + ".ffn"));
    }
    return x;
  }

  // Decoder logits for every position of `dec_input_ids` (tied output
  // projection: logits = H · embeddingᵀ + output_bias).
  ad::Var decode(ad::Tape& tape, const Binding& b, ad::Var memory,
                 const std::vector<int>& dec_input_ids) const {
    if (dec_input_ids.size() > config_.max_output_len) {
      throw ValidationError(msg("output length ", dec_input_ids.size(),
                                " exceeds maximum ", config_.max_output_len));
    }
    ad::Var x = embed(tape, b, dec_input_ids, "pos_output");
    for (std::size_t i = 0; i < config_.decoder_layers; ++i) {
      const std::string p = msg("dec", i);
      x = tape.add(x, attention(tape, b, x, x, p + ".self", true));
      x = tape.add(x, attention(tape, b, x, memory, p + ".cross", false));
      x = tape.add(x, feedforward(tape, b, x, p + ".ffn"));
    }
    return tape.add_rowvec(tape.matmul_nt(x, b["embedding"]), b["output_bias"]);
  }

  Vocabulary vocab_;
  ModelConfig config_;
  ParameterStore store_;
};

}  // namespace ea2e
