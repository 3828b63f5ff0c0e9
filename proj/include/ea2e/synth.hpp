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

// Synthetic corpus generation with planted cross-event argument rules, plus
// a scripted oracle extractor that reads the generated documents the way the
// model is meant to: clause patterns for explicit slots, neighbor tags for
// ambiguous ones.
//
// Documents are built from units of one to three clauses.  A rule such as
// Attacker@assault -> Detainee@capture makes the two events share an entity;
// when a unit is flagged ambiguous, the shared slot is rendered as an
// "either A or B [or C]" candidate list whose resolution requires the rule
// plus a neighbor tag.  Each distractor candidate comes from a decoy
// sentence that mirrors the source clause's shape with fresh names but is
// not annotated as an event, so all candidates occupy identical surface
// positions and only the event annotations separate them.  The real clause
// takes a uniformly random position among its decoys, and candidate token
// frequencies are equalized with filler mention sentences, so neither
// position statistics nor occurrence counts reveal the answer.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ea2e/augmentation.hpp"
#include "ea2e/common.hpp"
#include "ea2e/corpus.hpp"
#include "ea2e/inference.hpp"
#include "ea2e/ontology.hpp"
#include "ea2e/templating.hpp"

namespace ea2e {

// Implication planted in the corpus: the entity filling source_role of a
// source_type event also fills target_role of a nearby target_type event.
struct Rule {
  std::string source_type;
  std::string source_role;
  std::string target_type;
  std::string target_role;

  friend bool operator==(const Rule&, const Rule&) = default;
  friend auto operator<=>(const Rule&, const Rule&) = default;

  std::string describe() const {
    return msg(source_role, "@", source_type, " -> ", target_role, "@",
               target_type);
  }
};

inline std::vector<Rule> default_rules() {
  return {{"assault", "Attacker", "capture", "Detainee"},
          {"capture", "Detainee", "accuse", "Defendant"}};
}

// The fixed three-type ontology every generated corpus uses.
inline Ontology synthetic_ontology() {
  Ontology onto;
  onto.add(parse_template("assault", "<arg> attacked <arg> at <arg>",
                          {"Attacker", "Target", "Place"}));
  onto.add(parse_template("capture", "<arg> arrested <arg> at <arg>",
                          {"Captor", "Detainee", "Place"}));
  onto.add(parse_template("accuse", "<arg> charged <arg> at <arg>",
                          {"Prosecutor", "Defendant", "Place"}));
  return onto;
}

struct SynthSpec {
  std::size_t num_docs = 200;
  std::size_t min_events_per_doc = 1;
  std::size_t max_events_per_doc = 3;
  std::size_t vocabulary_size = 30;   // filler word pool
  std::size_t entity_pool_size = 36;  // person + place name pool
  std::vector<Rule> rules = default_rules();
  double ambiguity_rate = 0.0;  // fraction of events underdetermined locally
  std::size_t list_size = 2;    // candidates per planted list in pair units
  std::uint64_t seed = 1;
  std::size_t filler_gap = kDefaultNeighborWindow;  // tokens between units

  friend bool operator==(const SynthSpec&, const SynthSpec&) = default;
};

// Answer-key entry for one role of one event.
struct RoleKey {
  bool requires_neighbor = false;
  std::vector<std::string> candidates;  // list values when ambiguous
  std::optional<Rule> via_rule;         // rule that planted this slot

  friend bool operator==(const RoleKey&, const RoleKey&) = default;
};

struct EventKey {
  std::string event_id;
  std::string doc_id;
  std::string event_type;
  std::string unit_id;
  std::string unit_kind;  // "singleton" | "pair" | "chain"
  bool requires_neighbor = false;
  std::map<std::string, RoleKey> roles;

  friend bool operator==(const EventKey&, const EventKey&) = default;
};

struct AnswerKey {
  double ambiguity_rate_target = 0.0;
  double ambiguity_rate_realized = 0.0;
  std::uint64_t seed = 0;
  std::size_t total_events = 0;
  std::size_t flagged_events = 0;
  std::vector<Rule> rules;
  std::map<std::string, EventKey> events;  // by event id

  friend bool operator==(const AnswerKey&, const AnswerKey&) = default;
};

struct SynthResult {
  std::vector<Document> documents;
  Ontology ontology;
  AnswerKey key;
};

namespace synth_detail {

// Clause grammar per event type: the verb and which role sits where.
struct TypeGrammar {
  std::string verb;
  std::string subject_role;
  std::string object_role;
  std::string place_role;
};

inline const std::map<std::string, TypeGrammar>& grammar_table() {
  static const std::map<std::string, TypeGrammar> table = {
      {"assault", {"attacked", "Attacker", "Target", "Place"}},
      {"capture", {"arrested", "Captor", "Detainee", "Place"}},
      {"accuse", {"charged", "Prosecutor", "Defendant", "Place"}},
  };
  return table;
}

enum class RoleCategory { kPerson, kPlace };

inline std::optional<RoleCategory> role_category(const std::string& type,
                                                 const std::string& role) {
  auto it = grammar_table().find(type);
  if (it == grammar_table().end()) return std::nullopt;
  const TypeGrammar& g = it->second;
  if (role == g.subject_role || role == g.object_role) {
    return RoleCategory::kPerson;
  }
  if (role == g.place_role) return RoleCategory::kPlace;
  return std::nullopt;
}

// Name pools.  Entities are 4-letter CVCV words and filler words 6-letter
// CVCVCV words, so the pools can never collide with each other or with the
// fixed function words of the clause grammar.
inline std::string syllable_word(Rng& rng, std::size_t syllables) {
  static const std::string consonants = "bdfgklmnprst";
  static const std::string vowels = "aeiou";
  std::string word;
  for (std::size_t s = 0; s < syllables; ++s) {
    word.push_back(consonants[rng.below(consonants.size())]);
    word.push_back(vowels[rng.below(vowels.size())]);
  }
  return word;
}

inline std::vector<std::string> make_pool(Rng& rng, std::size_t count,
                                          std::size_t syllables) {
  std::vector<std::string> pool;
  std::set<std::string> seen;
  while (pool.size() < count) {
    std::string word = syllable_word(rng, syllables);
    if (seen.insert(word).second) pool.push_back(word);
  }
  return pool;
}

// A noun phrase: either one entity or an "either A or B [or C]" candidate
// list.
struct NounPhrase {
  std::string entity;                    // the correct filler
  std::vector<std::string> candidates;   // non-empty iff ambiguous

  bool ambiguous() const { return !candidates.empty(); }

  std::vector<std::string> tokens() const {
    if (!ambiguous()) return {entity};
    std::vector<std::string> out = {"either", candidates[0]};
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      out.push_back("or");
      out.push_back(candidates[i]);
    }
    return out;
  }
};

struct EventDraft {
  std::string event_type;
  int rendering = 0;  // 0 active, 1 passive, 2 fronted
  NounPhrase subject;
  NounPhrase object;
  std::string place;
  std::map<std::string, RoleKey> role_keys;
  bool requires_neighbor = false;
};

// A decoy sentence rendered like an event clause but never annotated as an
// event.  The decoys mirroring one event form a group with it; the group's
// sentences are emitted contiguously with the real clause at a uniformly
// random slot, so no position statistic separates it from its decoys.
struct DecoyDraft {
  EventDraft clause;
  std::size_t anchor = 0;  // index into UnitDraft::events of the mirrored event
  std::size_t slot = 0;    // emission slot within the anchor's group
};

struct UnitDraft {
  std::string kind;
  std::vector<EventDraft> events;
  std::vector<DecoyDraft> decoys;
  std::map<std::size_t, std::size_t> event_slot;  // anchor -> real clause slot
  std::vector<std::string> mention_entities;      // frequency equalizers
};

// Renders one clause and reports where the trigger verb landed.
inline std::vector<std::string> render_clause(const EventDraft& ev,
                                              std::size_t* trigger_offset) {
  const TypeGrammar& g = grammar_table().at(ev.event_type);
  std::vector<std::string> subject = ev.subject.tokens();
  std::vector<std::string> object = ev.object.tokens();
  std::vector<std::string> out;
  auto append = [&out](const std::vector<std::string>& part) {
    out.insert(out.end(), part.begin(), part.end());
  };
  switch (ev.rendering) {
    case 1:  // passive: O was V by S at P .
      append(object);
      out.push_back("was");
      *trigger_offset = out.size();
      out.push_back(g.verb);
      out.push_back("by");
      append(subject);
      out.insert(out.end(), {"at", ev.place, "."});
      break;
    case 2:  // fronted: at P , S V O .
      out.insert(out.end(), {"at", ev.place, ","});
      append(subject);
      *trigger_offset = out.size();
      out.push_back(g.verb);
      append(object);
      out.push_back(".");
      break;
    default:  // active: S V O at P .
      append(subject);
      *trigger_offset = out.size();
      out.push_back(g.verb);
      append(object);
      out.insert(out.end(), {"at", ev.place, "."});
      break;
  }
  return out;
}

// Pulls the next fresh entity from a per-document shuffled pool.
class EntityWell {
 public:
  EntityWell(std::vector<std::string> names, std::string label)
      : names_(std::move(names)), label_(std::move(label)) {}

  const std::string& draw() {
    if (next_ >= names_.size()) {
      throw ValidationError(msg("entity pool exhausted: document needs more ",
                                label_, " names than the pool holds"));
    }
    return names_[next_++];
  }

 private:
  std::vector<std::string> names_;
  std::string label_;
  std::size_t next_ = 0;
};

struct RulePlan {
  Rule rule;
  bool flagged = false;  // render the target slot as a candidate list
};

// Chain recipe: two rules where the first's target is the second's source.
inline std::vector<std::pair<Rule, Rule>> composable_pairs(
    const std::vector<Rule>& rules) {
  std::vector<std::pair<Rule, Rule>> pairs;
  for (const Rule& a : rules) {
    for (const Rule& b : rules) {
      if (a.target_type != b.source_type || a.target_role != b.source_role) {
        continue;
      }
      // Three pairwise-distinct event types keep tag-based resolution and
      // frequency equalization unambiguous inside one unit.
      if (a.source_type == a.target_type || a.source_type == b.target_type ||
          a.target_type == b.target_type) {
        continue;
      }
      pairs.emplace_back(a, b);
    }
  }
  return pairs;
}

inline void check_rule(const Rule& rule, const Ontology& onto) {
  for (const auto& [type, role] :
       {std::pair{rule.source_type, rule.source_role},
        std::pair{rule.target_type, rule.target_role}}) {
    if (!onto.has(type)) {
      throw ValidationError(
          msg("rule ", rule.describe(), ": unknown event type '", type, "'"));
    }
    const auto& roles = onto.get(type).roles;
    if (std::find(roles.begin(), roles.end(), role) == roles.end()) {
      throw ValidationError(msg("rule ", rule.describe(), ": type '", type,
                                "' has no role '", role, "'"));
    }
  }
  if (rule.source_type == rule.target_type &&
      rule.source_role == rule.target_role) {
    throw ValidationError(
        msg("rule ", rule.describe(), " maps a slot to itself"));
  }
  auto src_cat = role_category(rule.source_type, rule.source_role);
  auto tgt_cat = role_category(rule.target_type, rule.target_role);
  if (!src_cat || !tgt_cat || *src_cat != *tgt_cat) {
    throw ValidationError(msg("rule ", rule.describe(),
                              ": source and target roles have different "
                              "categories"));
  }
  if (*src_cat != RoleCategory::kPerson) {
    throw ValidationError(msg(
        "rule ", rule.describe(),
        ": only person roles can host a planted candidate list"));
  }
}

}  // namespace synth_detail

inline void validate_spec(const SynthSpec& spec) {
  if (spec.num_docs == 0) {
    throw ValidationError("num_docs must be positive");
  }
  if (spec.min_events_per_doc == 0 ||
      spec.min_events_per_doc > spec.max_events_per_doc) {
    throw ValidationError(
        msg("events_per_doc range [", spec.min_events_per_doc, ", ",
            spec.max_events_per_doc, "] is invalid"));
  }
  if (spec.vocabulary_size < 5) {
    throw ValidationError("vocabulary_size must be at least 5");
  }
  if (spec.ambiguity_rate < 0.0 || spec.ambiguity_rate > 1.0) {
    throw ValidationError(
        msg("ambiguity_rate ", spec.ambiguity_rate, " outside [0, 1]"));
  }
  if (spec.list_size < 2 || spec.list_size > 4) {
    throw ValidationError(msg("list_size ", spec.list_size,
                              " outside the supported range [2, 4]"));
  }
  if (spec.filler_gap == 0) {
    throw ValidationError("filler_gap must be positive");
  }

  Ontology onto = synthetic_ontology();
  for (const Rule& rule : spec.rules) {
    synth_detail::check_rule(rule, onto);
  }
  std::set<Rule> unique_rules(spec.rules.begin(), spec.rules.end());
  if (unique_rules.size() != spec.rules.size()) {
    throw ValidationError("rule set contains duplicates");
  }

  std::size_t place_pool = std::max<std::size_t>(1, spec.entity_pool_size / 3);
  std::size_t person_pool = spec.entity_pool_size - place_pool;
  // Flagged slots each add decoy sentences with two fresh persons and one
  // fresh place apiece, so an ambiguous corpus needs deeper pools.
  std::size_t person_need =
      spec.ambiguity_rate > 0.0
          ? (1 + spec.list_size) * spec.max_events_per_doc
          : 2 * spec.max_events_per_doc;
  std::size_t place_need = spec.ambiguity_rate > 0.0
                               ? spec.list_size * spec.max_events_per_doc
                               : spec.max_events_per_doc;
  if (person_pool < person_need || place_pool < place_need) {
    throw ValidationError(msg(
        "entity_pool_size ", spec.entity_pool_size, " too small for up to ",
        spec.max_events_per_doc, " events per document"));
  }

  double max_rate = 0.0;
  if (!spec.rules.empty() && spec.max_events_per_doc >= 2) {
    max_rate = 0.5;
    if (spec.max_events_per_doc >= 3 &&
        !synth_detail::composable_pairs(spec.rules).empty()) {
      max_rate = 2.0 / 3.0;
    }
  }
  if (spec.ambiguity_rate > max_rate + 1e-9) {
    throw ValidationError(msg(
        "ambiguity_rate ", spec.ambiguity_rate, " exceeds the maximum ",
        max_rate, " achievable with the configured rules and events_per_doc"));
  }
}

namespace synth_detail {

// Greedy corpus-level steering: pick the unit kind whose achievable flagged
// fraction bracket comes closest to the target rate, then the flag count
// that minimizes the running error (ties flag more slots, which yields the
// deepest propagation chains).
struct RateSteering {
  double target = 0.0;
  std::size_t flagged = 0;
  std::size_t events = 0;

  double interval_distance(std::size_t unit_events,
                           std::size_t max_flags) const {
    double total = static_cast<double>(events + unit_events);
    double lo = static_cast<double>(flagged) / total;
    double hi = static_cast<double>(flagged + max_flags) / total;
    if (target < lo) return lo - target;
    if (target > hi) return target - hi;
    return 0.0;
  }

  std::size_t choose_flags(std::size_t unit_events, std::size_t max_flags) {
    double total = static_cast<double>(events + unit_events);
    std::size_t best = 0;
    double best_err = 0.0;
    for (std::size_t f = 0; f <= max_flags; ++f) {
      double err =
          std::abs(static_cast<double>(flagged + f) - target * total);
      if (f == 0 || err <= best_err + 1e-12) {  // ties flag more slots
        best = f;
        best_err = std::min(err, best_err);
        if (f == 0) best_err = err;
      }
    }
    flagged += best;
    events += unit_events;
    return best;
  }
};

}  // namespace synth_detail

inline SynthResult generate(const SynthSpec& spec) {
  validate_spec(spec);
  using namespace synth_detail;

  SynthResult result;
  result.ontology = synthetic_ontology();
  result.key.ambiguity_rate_target = spec.ambiguity_rate;
  result.key.seed = spec.seed;
  result.key.rules = spec.rules;

  Rng rng(spec.seed);
  std::size_t place_pool_size =
      std::max<std::size_t>(1, spec.entity_pool_size / 3);
  std::size_t person_pool_size = spec.entity_pool_size - place_pool_size;
  std::vector<std::string> person_pool = make_pool(rng, person_pool_size, 2);
  std::vector<std::string> place_pool = make_pool(rng, place_pool_size, 2);
  // Persons and places share the CVCV shape, so dedup across the two pools.
  {
    std::set<std::string> taken(person_pool.begin(), person_pool.end());
    for (auto& name : place_pool) {
      while (taken.count(name)) name = syllable_word(rng, 2);
      taken.insert(name);
    }
  }
  std::vector<std::string> filler_pool =
      make_pool(rng, spec.vocabulary_size, 3);

  std::vector<std::pair<Rule, Rule>> chains = composable_pairs(spec.rules);
  RateSteering steering{spec.ambiguity_rate, 0, 0};

  for (std::size_t d = 0; d < spec.num_docs; ++d) {
    std::string doc_id = msg("d", d);
    std::size_t target_events =
        rng.range(spec.min_events_per_doc, spec.max_events_per_doc);

    // Per-document entity draws come from freshly shuffled pool copies, so
    // every entity is unique within the document.
    std::vector<std::string> persons = person_pool;
    std::vector<std::string> places = place_pool;
    rng.shuffle(persons);
    rng.shuffle(places);
    EntityWell person_well(std::move(persons), "person");
    EntityWell place_well(std::move(places), "place");

    // Choose unit kinds and ambiguity flags.
    std::vector<UnitDraft> units;
    std::size_t remaining = target_events;
    while (remaining > 0) {
      struct KindOption {
        const char* kind;
        std::size_t events;
        std::size_t max_flags;
      };
      std::vector<KindOption> options = {{"singleton", 1, 0}};
      if (remaining >= 2 && !spec.rules.empty()) {
        options.push_back({"pair", 2, 1});
      }
      if (remaining >= 3 && !chains.empty()) {
        options.push_back({"chain", 3, 2});
      }
      double best_dist = 0.0;
      std::vector<std::size_t> best_idx;
      for (std::size_t i = 0; i < options.size(); ++i) {
        double dist =
            steering.interval_distance(options[i].events, options[i].max_flags);
        if (best_idx.empty() || dist < best_dist - 1e-12) {
          best_dist = dist;
          best_idx = {i};
        } else if (dist <= best_dist + 1e-12) {
          best_idx.push_back(i);
        }
      }
      const KindOption& pick = options[best_idx[rng.below(best_idx.size())]];
      std::size_t flags = steering.choose_flags(pick.events, pick.max_flags);

      UnitDraft unit;
      unit.kind = pick.kind;
      if (unit.kind == "singleton") {
        static const std::vector<std::string> types = {"assault", "capture",
                                                       "accuse"};
        EventDraft ev;
        ev.event_type = types[rng.below(types.size())];
        const TypeGrammar& g = grammar_table().at(ev.event_type);
        ev.subject.entity = person_well.draw();
        ev.object.entity = person_well.draw();
        ev.place = place_well.draw();
        ev.role_keys[g.subject_role] = RoleKey{};
        ev.role_keys[g.object_role] = RoleKey{};
        ev.role_keys[g.place_role] = RoleKey{};
        unit.events.push_back(std::move(ev));
      } else {
        std::vector<RulePlan> plan;
        if (unit.kind == "pair") {
          plan.push_back({spec.rules[rng.below(spec.rules.size())], flags > 0});
        } else {
          const auto& [first, second] = chains[rng.below(chains.size())];
          plan.push_back({first, flags > 0});
          plan.push_back({second, flags > 1});
        }

        // Source event of the first rule, fully explicit.
        {
          EventDraft ev;
          ev.event_type = plan[0].rule.source_type;
          const TypeGrammar& g = grammar_table().at(ev.event_type);
          ev.subject.entity = person_well.draw();
          ev.object.entity = person_well.draw();
          ev.place = place_well.draw();
          ev.role_keys[g.subject_role] = RoleKey{};
          ev.role_keys[g.object_role] = RoleKey{};
          ev.role_keys[g.place_role] = RoleKey{};
          unit.events.push_back(std::move(ev));
        }

        // Each rule appends its target event, sharing the rule entity.
        for (const RulePlan& step : plan) {
          const std::size_t source_index = unit.events.size() - 1;
          const EventDraft& source = unit.events[source_index];
          const TypeGrammar& sg = grammar_table().at(step.rule.source_type);
          const std::string& shared =
              step.rule.source_role == sg.subject_role ? source.subject.entity
                                                       : source.object.entity;

          EventDraft ev;
          ev.event_type = step.rule.target_type;
          const TypeGrammar& g = grammar_table().at(ev.event_type);
          ev.place = place_well.draw();
          ev.role_keys[g.place_role] = RoleKey{};

          NounPhrase planted;
          planted.entity = shared;
          RoleKey planted_key;
          planted_key.via_rule = step.rule;
          if (step.flagged) {
            // Every distractor is a decoy clause's entity in the same
            // position the rule's source argument occupies, so surface
            // patterns cannot separate the candidates.  Chains keep
            // pairwise lists so a three-event unit's triggers stay inside
            // the default neighbor window despite the extra sentences.
            const std::size_t list_size =
                unit.kind == "chain" ? 2 : spec.list_size;
            const std::size_t source_slot = rng.below(list_size);
            unit.event_slot[source_index] = source_slot;
            planted.candidates = {shared};
            for (std::size_t s = 0; s < list_size; ++s) {
              if (s == source_slot) continue;
              DecoyDraft decoy;
              decoy.clause.event_type = step.rule.source_type;
              decoy.clause.subject.entity = person_well.draw();
              decoy.clause.object.entity = person_well.draw();
              decoy.clause.place = place_well.draw();
              decoy.anchor = source_index;
              decoy.slot = s;
              planted.candidates.push_back(
                  step.rule.source_role == sg.subject_role
                      ? decoy.clause.subject.entity
                      : decoy.clause.object.entity);
              unit.decoys.push_back(std::move(decoy));
            }
            rng.shuffle(planted.candidates);
            planted_key.requires_neighbor = true;
            planted_key.candidates = planted.candidates;
            ev.requires_neighbor = true;
          }

          if (step.rule.target_role == g.subject_role) {
            ev.subject = planted;
            ev.object.entity = person_well.draw();
            ev.role_keys[g.subject_role] = planted_key;
            ev.role_keys[g.object_role] = RoleKey{};
          } else {
            ev.object = planted;
            ev.subject.entity = person_well.draw();
            ev.role_keys[g.object_role] = planted_key;
            ev.role_keys[g.subject_role] = RoleKey{};
          }
          unit.events.push_back(std::move(ev));
        }
      }

      for (EventDraft& ev : unit.events) {
        ev.rendering = static_cast<int>(rng.below(3));
      }
      for (DecoyDraft& d : unit.decoys) {
        d.clause.rendering = static_cast<int>(rng.below(3));
      }
      remaining -= unit.events.size();
      units.push_back(std::move(unit));
    }

    // Frequency equalization: every candidate of every list must occur in
    // the unit as often as its list's most frequent candidate.
    for (UnitDraft& unit : units) {
      auto occurrence_counts = [&unit]() {
        std::map<std::string, std::size_t> counts;
        for (const EventDraft& ev : unit.events) {
          std::size_t trig = 0;
          for (const std::string& tok : render_clause(ev, &trig)) {
            ++counts[tok];
          }
        }
        for (const DecoyDraft& d : unit.decoys) {
          std::size_t trig = 0;
          for (const std::string& tok : render_clause(d.clause, &trig)) {
            ++counts[tok];
          }
        }
        for (const std::string& name : unit.mention_entities) ++counts[name];
        return counts;
      };
      for (int pass = 0; pass < 8; ++pass) {
        auto counts = occurrence_counts();
        bool balanced = true;
        for (const EventDraft& ev : unit.events) {
          for (const NounPhrase* np : {&ev.subject, &ev.object}) {
            if (!np->ambiguous()) continue;
            std::size_t top = 0;
            for (const std::string& c : np->candidates) {
              top = std::max(top, counts[c]);
            }
            for (const std::string& c : np->candidates) {
              for (std::size_t n = counts[c]; n < top; ++n) {
                unit.mention_entities.push_back(c);
                balanced = false;
              }
            }
          }
        }
        if (balanced) break;
      }
    }

    // Assemble the document.
    Document doc;
    doc.doc_id = doc_id;
    std::size_t event_index = 0;
    struct PlacedEvent {
      EventDraft draft;
      std::size_t trigger_pos;
      std::string event_id;
      std::string unit_id;
      std::string unit_kind;
    };
    std::vector<PlacedEvent> placed;

    auto emit_filler = [&](std::size_t at_least) {
      std::size_t emitted = 0;
      while (emitted < at_least) {
        std::size_t sentence = 5 + rng.below(5);
        for (std::size_t i = 0; i < sentence; ++i) {
          doc.tokens.push_back(filler_pool[rng.below(filler_pool.size())]);
        }
        doc.tokens.push_back(".");
        emitted += sentence + 1;
      }
    };

    std::set<std::string> doc_entities;
    for (std::size_t u = 0; u < units.size(); ++u) {
      if (u > 0) emit_filler(spec.filler_gap);
      const UnitDraft& unit = units[u];
      std::string unit_id = msg(doc_id, "-u", u);
      auto emit_decoy = [&](const DecoyDraft& d) {
        std::size_t trig = 0;
        std::vector<std::string> clause = render_clause(d.clause, &trig);
        doc.tokens.insert(doc.tokens.end(), clause.begin(), clause.end());
        for (const std::string& value :
             {d.clause.subject.entity, d.clause.object.entity,
              d.clause.place}) {
          doc_entities.insert(value);
        }
      };
      for (std::size_t e = 0; e < unit.events.size(); ++e) {
        // The event's group: its decoys in slot order with the real clause
        // at its drawn slot.
        std::vector<const DecoyDraft*> group;
        for (const DecoyDraft& d : unit.decoys) {
          if (d.anchor == e) group.push_back(&d);
        }
        const auto slot_it = unit.event_slot.find(e);
        const std::size_t real_slot =
            slot_it == unit.event_slot.end() ? 0 : slot_it->second;
        std::size_t next_decoy = 0;
        for (std::size_t slot = 0; slot <= group.size(); ++slot) {
          if (slot == real_slot) {
            const EventDraft& ev = unit.events[e];
            std::size_t trig = 0;
            std::vector<std::string> clause = render_clause(ev, &trig);
            std::size_t base = doc.tokens.size();
            doc.tokens.insert(doc.tokens.end(), clause.begin(), clause.end());
            placed.push_back({ev, base + trig,
                              msg(doc_id, "-e", event_index++), unit_id,
                              unit.kind});
          } else {
            emit_decoy(*group[next_decoy++]);
          }
        }
      }
      for (const std::string& name : unit.mention_entities) {
        doc.tokens.insert(doc.tokens.end(), {name, "paused", "."});
      }
    }

    // Gold arguments ground at the entity's earliest occurrence, matching
    // the leftmost-match convention used when predictions are grounded.
    auto earliest = [&doc](const std::string& token) {
      for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
        if (doc.tokens[i] == token) return i;
      }
      throw ValidationError(msg("entity '", token, "' missing from document"));
    };

    for (const PlacedEvent& pe : placed) {
      const TypeGrammar& g = grammar_table().at(pe.draft.event_type);
      EventMention event;
      event.event_id = pe.event_id;
      event.event_type = pe.draft.event_type;
      event.trigger = Span{pe.trigger_pos, pe.trigger_pos + 1, std::nullopt};

      for (const auto& [role, value] :
           {std::pair{g.subject_role, pe.draft.subject.entity},
            std::pair{g.object_role, pe.draft.object.entity},
            std::pair{g.place_role, pe.draft.place}}) {
        std::size_t pos = earliest(value);
        RoleAssignment arg;
        arg.role = role;
        arg.span = Span{pos, pos + 1, std::nullopt};
        arg.entity_id = msg("c-", value);
        event.gold_args.push_back(std::move(arg));
        doc_entities.insert(value);
      }
      std::sort(event.gold_args.begin(), event.gold_args.end());
      doc.events.push_back(std::move(event));

      EventKey key_entry;
      key_entry.event_id = pe.event_id;
      key_entry.doc_id = doc_id;
      key_entry.event_type = pe.draft.event_type;
      key_entry.unit_id = pe.unit_id;
      key_entry.unit_kind = pe.unit_kind;
      key_entry.requires_neighbor = pe.draft.requires_neighbor;
      key_entry.roles = pe.draft.role_keys;
      result.key.events.emplace(pe.event_id, std::move(key_entry));

      result.key.total_events += 1;
      if (pe.draft.requires_neighbor) result.key.flagged_events += 1;
    }

    // One cluster per entity covering all of its occurrences, equalizer
    // mentions included.
    for (const std::string& value : doc_entities) {
      EntityCluster cluster;
      cluster.entity_id = msg("c-", value);
      for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
        if (doc.tokens[i] == value) {
          cluster.member_spans.push_back(Span{i, i + 1, std::nullopt});
        }
      }
      doc.clusters.push_back(std::move(cluster));
    }

    validate_document(doc);
    result.documents.push_back(std::move(doc));
  }

  result.key.ambiguity_rate_realized =
      result.key.total_events == 0
          ? 0.0
          : static_cast<double>(result.key.flagged_events) /
                static_cast<double>(result.key.total_events);
  return result;
}

// Scripted reader for the generated corpus.  Explicit slots are parsed from
// the clause around the event trigger; an "either A or B" slot is resolved
// only when a neighbor tag supplies the rule's source argument, and is left
// unanswered otherwise.  Spans are grounded at the entity's earliest
// occurrence, the same convention the corpus and the model-based extractor
// use.
class OracleExtractor : public Extractor {
 public:
  explicit OracleExtractor(std::vector<Rule> rules)
      : rules_(std::move(rules)) {}

  EventPrediction extract(const Document& doc, const EventMention& event,
                          const AugmentedContext& ctx,
                          const EventTemplate& tpl) override {
    EventPrediction pred;
    pred.event_id = event.event_id;

    auto grammar_it = synth_detail::grammar_table().find(event.event_type);
    if (grammar_it == synth_detail::grammar_table().end()) {
      pred.clean = false;
      pred.diagnostics.push_back(
          msg("no clause grammar for event type '", event.event_type, "'"));
      return pred;
    }
    const synth_detail::TypeGrammar& g = grammar_it->second;

    Clause clause = parse_clause(doc, event.trigger.start, g);
    RoleFills fills;
    for (const auto& [role, np] :
         {std::pair{g.subject_role, clause.subject},
          std::pair{g.object_role, clause.object},
          std::pair{g.place_role, clause.place}}) {
      if (!np.has_value()) {
        pred.clean = false;
        pred.diagnostics.push_back(
            msg("role '", role, "': clause pattern not recognized"));
        continue;
      }
      std::optional<std::string> value;
      if (np->candidates.empty()) {
        value = np->entity;
      } else {
        value = resolve(doc, event, ctx, role, np->candidates);
        if (!value) {
          pred.diagnostics.push_back(
              msg("role '", role, "': candidate list unresolved without a "
                  "neighbor tag"));
        }
      }
      if (!value) continue;
      std::optional<std::size_t> pos = earliest(doc, *value);
      if (!pos) continue;
      RoleAssignment arg;
      arg.role = role;
      arg.span = Span{*pos, *pos + 1, std::nullopt};
      pred.arguments.push_back(std::move(arg));
      fills[role].push_back({*value});
    }

    std::sort(pred.arguments.begin(), pred.arguments.end());
    pred.output_tokens = fill_template(tpl, fills).tokens;
    return pred;
  }

 private:
  struct Clause {
    std::optional<synth_detail::NounPhrase> subject;
    std::optional<synth_detail::NounPhrase> object;
    std::optional<synth_detail::NounPhrase> place;
  };

  static std::optional<std::size_t> earliest(const Document& doc,
                                             const std::string& token) {
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      if (doc.tokens[i] == token) return i;
    }
    return std::nullopt;
  }

  static std::optional<synth_detail::NounPhrase> parse_np(
      const std::vector<std::string>& tokens, std::size_t begin,
      std::size_t end) {
    if (end <= begin || end > tokens.size()) return std::nullopt;
    std::size_t len = end - begin;
    if (len == 1) {
      synth_detail::NounPhrase np;
      np.entity = tokens[begin];
      return np;
    }
    // either c0 or c1 [or c2 ...]
    if (len >= 4 && len % 2 == 0 && tokens[begin] == "either") {
      synth_detail::NounPhrase np;
      for (std::size_t i = begin + 1; i < end; i += 2) {
        np.candidates.push_back(tokens[i]);
        if (i + 1 < end && tokens[i + 1] != "or") return std::nullopt;
      }
      return np;
    }
    return std::nullopt;
  }

  static Clause parse_clause(const Document& doc, std::size_t trigger,
                             const synth_detail::TypeGrammar& g) {
    Clause clause;
    const std::vector<std::string>& toks = doc.tokens;
    if (trigger >= toks.size() || toks[trigger] != g.verb) return clause;

    // Sentence bounds: from just past the previous period to the next one.
    std::size_t start = trigger;
    while (start > 0 && toks[start - 1] != ".") --start;
    std::size_t end = trigger;
    while (end < toks.size() && toks[end] != ".") ++end;
    if (end >= toks.size()) return clause;  // clause never closed

    auto np = [&](std::size_t b, std::size_t e) { return parse_np(toks, b, e); };
    auto single = [&](std::size_t i) -> std::optional<synth_detail::NounPhrase> {
      return i < toks.size() ? np(i, i + 1) : std::nullopt;
    };

    if (trigger > start && toks[trigger - 1] == "was") {
      // O was V by S at P .
      if (trigger + 1 >= end || toks[trigger + 1] != "by") return clause;
      std::size_t at = trigger + 2;
      while (at < end && toks[at] != "at") ++at;
      if (at + 2 != end) return clause;
      clause.object = np(start, trigger - 1);
      clause.subject = np(trigger + 2, at);
      clause.place = single(at + 1);
    } else if (end - start >= 3 && toks[start] == "at" &&
               toks[start + 2] == ",") {
      // at P , S V O .
      clause.place = single(start + 1);
      clause.subject = np(start + 3, trigger);
      clause.object = np(trigger + 1, end);
    } else {
      // S V O at P .
      std::size_t at = trigger + 1;
      while (at < end && toks[at] != "at") ++at;
      if (at + 2 != end) return clause;
      clause.subject = np(start, trigger);
      clause.object = np(trigger + 1, at);
      clause.place = single(at + 1);
    }
    return clause;
  }

  // A candidate list resolves when exactly one candidate value is supported
  // by a tagged neighbor argument of a rule targeting this slot.
  std::optional<std::string> resolve(
      const Document& doc, const EventMention& event,
      const AugmentedContext& ctx, const std::string& role,
      const std::vector<std::string>& candidates) const {
    std::set<std::string> supported;
    for (const Rule& rule : rules_) {
      if (rule.target_type != event.event_type || rule.target_role != role) {
        continue;
      }
      for (const auto& [tag_role, span] : ctx.tagged_roles) {
        if (tag_role != rule.source_role) continue;
        if (span.start >= doc.tokens.size()) continue;
        const std::string& value = doc.tokens[span.start];
        if (std::find(candidates.begin(), candidates.end(), value) !=
            candidates.end()) {
          supported.insert(value);
        }
      }
    }
    if (supported.size() == 1) return *supported.begin();
    return std::nullopt;
  }

  std::vector<Rule> rules_;
};

}  // namespace ea2e
