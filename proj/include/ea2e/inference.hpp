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

// Iterative inference: iteration 1 extracts every event from its regular
// (trigger-marked) context; iteration k > 1 re-extracts from a context
// augmented with the iteration k−1 predictions of neighboring events.
// Updates are synchronous — within an iteration, no event sees another
// event's current-iteration output.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ea2e/augmentation.hpp"
#include "ea2e/common.hpp"
#include "ea2e/corpus.hpp"
#include "ea2e/model.hpp"
#include "ea2e/ontology.hpp"
#include "ea2e/templating.hpp"

namespace ea2e {

struct InferenceConfig {
  std::size_t max_iterations = 3;
  std::size_t window = kDefaultNeighborWindow;
  bool early_stop_on_fixpoint = false;
  DecodeConfig decode;

  friend bool operator==(const InferenceConfig&,
                         const InferenceConfig&) = default;

  void validate() const {
    if (max_iterations < 1) {
      throw ValidationError("max_iterations must be at least 1");
    }
    if (window == 0) {
      throw ValidationError("neighborhood window must be positive");
    }
  }
};

struct EventPrediction {
  std::string event_id;
  std::vector<std::string> output_tokens;  // raw generated sequence
  std::vector<RoleAssignment> arguments;   // grounded, document coordinates
  bool clean = true;
  std::vector<std::string> diagnostics;

  friend bool operator==(const EventPrediction&,
                         const EventPrediction&) = default;
};

struct IterationRecord {
  std::map<std::string, std::vector<RoleAssignment>> assignments;
  std::map<std::string, std::vector<std::string>> contexts;
  std::map<std::string, EventPrediction> predictions;

  friend bool operator==(const IterationRecord&,
                         const IterationRecord&) = default;
};

struct IterationTrace {
  std::string doc_id;
  std::vector<IterationRecord> iterations;  // index i holds iteration i+1
  std::optional<std::size_t> fixpoint_iteration;  // first k with y^k = y^{k−1}
  std::vector<std::string> skipped_events;

  friend bool operator==(const IterationTrace&, const IterationTrace&) = default;

  const IterationRecord& final_record() const {
    if (iterations.empty()) {
      throw ValidationError(msg("no iterations recorded for document '",
                                doc_id, "'"));
    }
    return iterations.back();
  }
};

// True iff both maps cover the same event ids and every event's assignments
// agree as (role, span) sets, regardless of list order.
inline bool fixpoint_check(
    const std::map<std::string, std::vector<RoleAssignment>>& prev,
    const std::map<std::string, std::vector<RoleAssignment>>& curr) {
  if (prev.size() != curr.size()) {
    throw ValidationError("fixpoint_check: event id sets differ");
  }
  for (const auto& [event_id, prev_args] : prev) {
    auto it = curr.find(event_id);
    if (it == curr.end()) {
      throw ValidationError(
          msg("fixpoint_check: event '", event_id, "' missing from one side"));
    }
    auto key_set = [](const std::vector<RoleAssignment>& args) {
      std::vector<std::pair<std::string, Span>> keys;
      keys.reserve(args.size());
      for (const auto& a : args) keys.emplace_back(a.role, a.span);
      std::sort(keys.begin(), keys.end());
      return keys;
    };
    if (key_set(prev_args) != key_set(it->second)) return false;
  }
  return true;
}

// Produces grounded argument predictions for one event from its context.
class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual EventPrediction extract(const Document& doc,
                                  const EventMention& event,
                                  const AugmentedContext& ctx,
                                  const EventTemplate& tpl) = 0;
};

// Extraction through the trained conditional generator: decode a filled
// template, then ground each fill at its earliest context occurrence that
// maps cleanly back to document coordinates (occurrences straddling inserted
// marker tokens are passed over).
class ModelExtractor : public Extractor {
 public:
  explicit ModelExtractor(const ExtractorModel* model,
                          DecodeConfig decode = {})
      : model_(model), decode_(decode) {}

  EventPrediction extract(const Document& doc, const EventMention& event,
                          const AugmentedContext& ctx,
                          const EventTemplate& tpl) override {
    (void)doc;
    EventPrediction pred;
    pred.event_id = event.event_id;
    const InputSequence input = build_input(tpl.token_strings(), ctx.tokens);
    const ParseResult parsed = model_->predict_result(input, tpl, decode_);
    pred.output_tokens = parsed.filled.tokens;
    pred.clean = parsed.clean;
    pred.diagnostics = parsed.diagnostics;

    std::set<std::pair<std::string, Span>> seen;
    for (const auto& range : parsed.filled.fill_ranges) {
      const std::vector<std::string> fill(
          parsed.filled.tokens.begin() +
              static_cast<std::ptrdiff_t>(range.begin),
          parsed.filled.tokens.begin() + static_cast<std::ptrdiff_t>(range.end));
      std::optional<Span> grounded;
      for (std::size_t pos : find_occurrences(ctx.tokens, fill)) {
        if (auto span = ctx.to_document_span(pos, pos + fill.size())) {
          grounded = span;
          break;
        }
      }
      if (!grounded) {
        pred.clean = false;
        pred.diagnostics.push_back(msg("fill '", join_tokens(fill, " "),
                                       "' for role '", range.role,
                                       "' not grounded in document"));
        continue;
      }
      if (seen.insert({range.role, *grounded}).second) {
        pred.arguments.push_back({range.role, *grounded, std::nullopt});
      }
    }
    std::sort(pred.arguments.begin(), pred.arguments.end());
    return pred;
  }

 private:
  const ExtractorModel* model_;
  DecodeConfig decode_;
};

namespace detail {

struct EligibleEvents {
  std::vector<const EventMention*> events;
  std::vector<std::string> skipped;
};

inline EligibleEvents eligible_events(const Document& doc,
                                      const Ontology& ontology) {
  EligibleEvents out;
  for (const auto& event : doc.events) {
    if (ontology.has(event.event_type)) {
      out.events.push_back(&event);
    } else {
      out.skipped.push_back(event.event_id);
    }
  }
  return out;
}

}  // namespace detail

// Direct per-event prediction from regular contexts, with no iteration
// machinery — the reference the K=1 pipeline must match bitwise.
inline IterationRecord single_shot(const Document& doc, const Ontology& ontology,
                                   Extractor& extractor) {
  IterationRecord rec;
  for (const EventMention* event : detail::eligible_events(doc, ontology).events) {
    const AugmentedContext ctx = regular_context(doc, event->event_id);
    EventPrediction pred =
        extractor.extract(doc, *event, ctx, ontology.get(event->event_type));
    rec.assignments[event->event_id] = pred.arguments;
    rec.contexts[event->event_id] = ctx.tokens;
    rec.predictions[event->event_id] = std::move(pred);
  }
  return rec;
}

// Runs up to max_iterations synchronous refinement rounds over one document.
inline IterationTrace infer_document(const Document& doc,
                                     const Ontology& ontology,
                                     Extractor& extractor,
                                     const InferenceConfig& config) {
  config.validate();
  IterationTrace trace;
  trace.doc_id = doc.doc_id;
  const auto eligible = detail::eligible_events(doc, ontology);
  trace.skipped_events = eligible.skipped;

  // Assignments snapshot from the previous iteration; skipped events
  // contribute empty assignment lists when they appear as neighbors.
  AssignmentsMap previous;
  for (const auto& event : doc.events) previous[event.event_id] = {};

  for (std::size_t k = 1; k <= config.max_iterations; ++k) {
    IterationRecord rec;
    for (const EventMention* event : eligible.events) {
      Neighborhood nb;
      nb.target_event = event->event_id;
      nb.window = config.window;
      if (k > 1) nb = neighbors(doc, event->event_id, config.window);
      const AugmentedContext ctx = augment(doc, event->event_id, previous, nb);
      EventPrediction pred =
          extractor.extract(doc, *event, ctx, ontology.get(event->event_type));
      rec.assignments[event->event_id] = pred.arguments;
      rec.contexts[event->event_id] = ctx.tokens;
      rec.predictions[event->event_id] = std::move(pred);
    }
    bool at_fixpoint = false;
    if (!trace.iterations.empty()) {
      at_fixpoint =
          fixpoint_check(trace.iterations.back().assignments, rec.assignments);
    }
    for (const auto& [event_id, args] : rec.assignments) {
      previous[event_id] = args;
    }
    trace.iterations.push_back(std::move(rec));
    if (at_fixpoint && !trace.fixpoint_iteration) {
      trace.fixpoint_iteration = k;
    }
    if (at_fixpoint && config.early_stop_on_fixpoint) break;
  }
  return trace;
}

inline IterationTrace infer_document(const Document& doc,
                                     const Ontology& ontology,
                                     const ExtractorModel& model,
                                     const InferenceConfig& config) {
  ModelExtractor extractor(&model, config.decode);
  return infer_document(doc, ontology, extractor, config);
}

// Convenience over a corpus: one trace per document, in corpus order.
inline std::vector<IterationTrace> infer_corpus(
    const std::vector<Document>& docs, const Ontology& ontology,
    Extractor& extractor, const InferenceConfig& config) {
  std::vector<IterationTrace> traces;
  traces.reserve(docs.size());
  for (const auto& doc : docs) {
    traces.push_back(infer_document(doc, ontology, extractor, config));
  }
  return traces;
}

// Final-iteration assignments of every trace, keyed by event id.
inline std::map<std::string, std::vector<RoleAssignment>> final_assignments(
    const std::vector<IterationTrace>& traces) {
  std::map<std::string, std::vector<RoleAssignment>> out;
  for (const auto& trace : traces) {
    for (const auto& [event_id, args] : trace.final_record().assignments) {
      if (!out.emplace(event_id, args).second) {
        throw ValidationError(
            msg("event id '", event_id, "' appears in multiple documents"));
      }
    }
  }
  return out;
}

}  // namespace ea2e
