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

// Run configuration: one JSON file covering paths plus the model, training,
// inference, and synthesis settings.  Parsing is strict — unknown sections
// or fields are rejected so typos fail loudly instead of silently falling
// back to defaults.

#pragma once

#include <fstream>
#include <string>

#include "ea2e/common.hpp"
#include "ea2e/corpus.hpp"
#include "ea2e/formats.hpp"
#include "ea2e/inference.hpp"
#include "ea2e/model.hpp"
#include "ea2e/synth.hpp"

namespace ea2e {

struct PathsConfig {
  std::string corpus;
  std::string ontology;
  std::string checkpoint;
  std::string predictions;
  std::string report;
  std::string trace;
  std::string answer_key;
  std::string assignments;  // augment input
  std::string augmented;    // augment output

  friend bool operator==(const PathsConfig&, const PathsConfig&) = default;
};

struct RunConfig {
  PathsConfig paths;
  ModelConfig model;
  TrainingConfig training;
  InferenceConfig inference;
  SynthSpec synth;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

template <typename T>
inline void read_scalar(const Json& v, const char* section, const char* name,
                        T* out) {
  try {
    *out = v.get<T>();
  } catch (const Json::exception&) {
    throw ValidationError(
        msg("config: field '", section, ".", name, "' has the wrong type"));
  }
}

}  // namespace detail

inline Json paths_to_json(const PathsConfig& p) {
  Json j;
  j["corpus"] = p.corpus;
  j["ontology"] = p.ontology;
  j["checkpoint"] = p.checkpoint;
  j["predictions"] = p.predictions;
  j["report"] = p.report;
  j["trace"] = p.trace;
  j["answer_key"] = p.answer_key;
  j["assignments"] = p.assignments;
  j["augmented"] = p.augmented;
  return j;
}

inline Json model_config_to_json(const ModelConfig& m) {
  Json j;
  j["embedding_dim"] = m.embedding_dim;
  j["feedforward_dim"] = m.feedforward_dim;
  j["encoder_layers"] = m.encoder_layers;
  j["decoder_layers"] = m.decoder_layers;
  j["max_input_len"] = m.max_input_len;
  j["max_output_len"] = m.max_output_len;
  j["init_seed"] = m.init_seed;
  return j;
}

inline Json training_config_to_json(const TrainingConfig& t) {
  Json j;
  j["alpha"] = t.alpha;
  j["beta"] = t.beta;
  j["learning_rate"] = t.learning_rate;
  j["epochs"] = t.epochs;
  j["batch_size"] = t.batch_size;
  j["neighborhood_window"] = t.neighborhood_window;
  j["seed"] = t.seed;
  return j;
}

inline Json inference_config_to_json(const InferenceConfig& i) {
  Json j;
  j["max_iterations"] = i.max_iterations;
  j["window"] = i.window;
  j["early_stop_on_fixpoint"] = i.early_stop_on_fixpoint;
  j["decode"] = Json{{"max_len", i.decode.max_len}};
  return j;
}

inline Json synth_spec_to_json(const SynthSpec& s) {
  Json j;
  j["num_docs"] = s.num_docs;
  j["min_events_per_doc"] = s.min_events_per_doc;
  j["max_events_per_doc"] = s.max_events_per_doc;
  j["vocabulary_size"] = s.vocabulary_size;
  j["entity_pool_size"] = s.entity_pool_size;
  Json rules = Json::array();
  for (const Rule& r : s.rules) rules.push_back(rule_to_json(r));
  j["rules"] = std::move(rules);
  j["ambiguity_rate"] = s.ambiguity_rate;
  j["list_size"] = s.list_size;
  j["seed"] = s.seed;
  j["filler_gap"] = s.filler_gap;
  return j;
}

inline Json run_config_to_json(const RunConfig& c) {
  Json j;
  j["paths"] = paths_to_json(c.paths);
  j["model"] = model_config_to_json(c.model);
  j["training"] = training_config_to_json(c.training);
  j["inference"] = inference_config_to_json(c.inference);
  j["synth"] = synth_spec_to_json(c.synth);
  return j;
}

inline PathsConfig paths_from_json(const Json& j) {
  PathsConfig p;
  for (const auto& [key, v] : j.items()) {
    if (key == "corpus") detail::read_scalar(v, "paths", "corpus", &p.corpus);
    else if (key == "ontology") detail::read_scalar(v, "paths", "ontology", &p.ontology);
    else if (key == "checkpoint") detail::read_scalar(v, "paths", "checkpoint", &p.checkpoint);
    else if (key == "predictions") detail::read_scalar(v, "paths", "predictions", &p.predictions);
    else if (key == "report") detail::read_scalar(v, "paths", "report", &p.report);
    else if (key == "trace") detail::read_scalar(v, "paths", "trace", &p.trace);
    else if (key == "answer_key") detail::read_scalar(v, "paths", "answer_key", &p.answer_key);
    else if (key == "assignments") detail::read_scalar(v, "paths", "assignments", &p.assignments);
    else if (key == "augmented") detail::read_scalar(v, "paths", "augmented", &p.augmented);
    else throw ValidationError(msg("config: unknown field 'paths.", key, "'"));
  }
  return p;
}

inline ModelConfig model_config_from_json(const Json& j) {
  ModelConfig m;
  for (const auto& [key, v] : j.items()) {
    if (key == "embedding_dim") detail::read_scalar(v, "model", "embedding_dim", &m.embedding_dim);
    else if (key == "feedforward_dim") detail::read_scalar(v, "model", "feedforward_dim", &m.feedforward_dim);
    else if (key == "encoder_layers") detail::read_scalar(v, "model", "encoder_layers", &m.encoder_layers);
    else if (key == "decoder_layers") detail::read_scalar(v, "model", "decoder_layers", &m.decoder_layers);
    else if (key == "max_input_len") detail::read_scalar(v, "model", "max_input_len", &m.max_input_len);
    else if (key == "max_output_len") detail::read_scalar(v, "model", "max_output_len", &m.max_output_len);
    else if (key == "init_seed") detail::read_scalar(v, "model", "init_seed", &m.init_seed);
    else throw ValidationError(msg("config: unknown field 'model.", key, "'"));
  }
  return m;
}

inline TrainingConfig training_config_from_json(const Json& j) {
  TrainingConfig t;
  for (const auto& [key, v] : j.items()) {
    if (key == "alpha") detail::read_scalar(v, "training", "alpha", &t.alpha);
    else if (key == "beta") detail::read_scalar(v, "training", "beta", &t.beta);
    else if (key == "learning_rate") detail::read_scalar(v, "training", "learning_rate", &t.learning_rate);
    else if (key == "epochs") detail::read_scalar(v, "training", "epochs", &t.epochs);
    else if (key == "batch_size") detail::read_scalar(v, "training", "batch_size", &t.batch_size);
    else if (key == "neighborhood_window") detail::read_scalar(v, "training", "neighborhood_window", &t.neighborhood_window);
    else if (key == "seed") detail::read_scalar(v, "training", "seed", &t.seed);
    else throw ValidationError(msg("config: unknown field 'training.", key, "'"));
  }
  return t;
}

inline InferenceConfig inference_config_from_json(const Json& j) {
  InferenceConfig i;
  for (const auto& [key, v] : j.items()) {
    if (key == "max_iterations") detail::read_scalar(v, "inference", "max_iterations", &i.max_iterations);
    else if (key == "window") detail::read_scalar(v, "inference", "window", &i.window);
    else if (key == "early_stop_on_fixpoint") detail::read_scalar(v, "inference", "early_stop_on_fixpoint", &i.early_stop_on_fixpoint);
    else if (key == "decode") {
      for (const auto& [dkey, dv] : v.items()) {
        if (dkey == "max_len") detail::read_scalar(dv, "inference.decode", "max_len", &i.decode.max_len);
        else throw ValidationError(msg("config: unknown field 'inference.decode.", dkey, "'"));
      }
    } else {
      throw ValidationError(msg("config: unknown field 'inference.", key, "'"));
    }
  }
  return i;
}

inline SynthSpec synth_spec_from_json(const Json& j) {
  SynthSpec s;
  for (const auto& [key, v] : j.items()) {
    if (key == "num_docs") detail::read_scalar(v, "synth", "num_docs", &s.num_docs);
    else if (key == "min_events_per_doc") detail::read_scalar(v, "synth", "min_events_per_doc", &s.min_events_per_doc);
    else if (key == "max_events_per_doc") detail::read_scalar(v, "synth", "max_events_per_doc", &s.max_events_per_doc);
    else if (key == "vocabulary_size") detail::read_scalar(v, "synth", "vocabulary_size", &s.vocabulary_size);
    else if (key == "entity_pool_size") detail::read_scalar(v, "synth", "entity_pool_size", &s.entity_pool_size);
    else if (key == "rules") {
      s.rules.clear();
      for (const Json& rj : v) s.rules.push_back(rule_from_json(rj));
    } else if (key == "ambiguity_rate") {
      detail::read_scalar(v, "synth", "ambiguity_rate", &s.ambiguity_rate);
    } else if (key == "list_size") {
      detail::read_scalar(v, "synth", "list_size", &s.list_size);
    } else if (key == "seed") {
      detail::read_scalar(v, "synth", "seed", &s.seed);
    } else if (key == "filler_gap") {
      detail::read_scalar(v, "synth", "filler_gap", &s.filler_gap);
    } else {
      throw ValidationError(msg("config: unknown field 'synth.", key, "'"));
    }
  }
  return s;
}

inline RunConfig run_config_from_json(const Json& j) {
  RunConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "paths") c.paths = paths_from_json(v);
    else if (key == "model") c.model = model_config_from_json(v);
    else if (key == "training") c.training = training_config_from_json(v);
    else if (key == "inference") c.inference = inference_config_from_json(v);
    else if (key == "synth") c.synth = synth_spec_from_json(v);
    else throw ValidationError(msg("config: unknown section '", key, "'"));
  }
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError(msg("cannot open config file '", path, "'"));
  }
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(msg(path, ": parse failure: ", e.what()));
  }
  if (!j.is_object()) {
    throw ValidationError(msg(path, ": config root must be an object"));
  }
  return run_config_from_json(j);
}

inline void save_run_config(const std::string& path, const RunConfig& c) {
  write_json_file(path, run_config_to_json(c));
}

}  // namespace ea2e
