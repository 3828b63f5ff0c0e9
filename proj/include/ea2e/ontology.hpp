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

// Event ontology: per-type unfilled templates with <arg> placeholders, each
// placeholder bound positionally to a role name.
//
// Ontology file format: a single JSON object mapping event type to
//   {"template": "<arg> attacked <arg> ...", "roles": ["Attacker", ...]}
// where the number of <arg> occurrences equals the number of roles.

#pragma once

#include <cstddef>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ea2e/common.hpp"
#include "ea2e/corpus.hpp"
#include "ea2e/tokens.hpp"

namespace ea2e {

// One whitespace token of an unfilled template: either a literal word or an
// <arg> placeholder carrying the role it stands for.
struct TemplateToken {
  std::string text;
  bool is_placeholder = false;
  std::string role;  // set iff is_placeholder

  friend bool operator==(const TemplateToken&, const TemplateToken&) = default;
};

struct EventTemplate {
  std::string event_type;
  std::vector<TemplateToken> tokens;
  std::vector<std::string> roles;  // placeholder roles in template order

  friend bool operator==(const EventTemplate&, const EventTemplate&) = default;

  std::size_t placeholder_count() const { return roles.size(); }

  // Placeholder position (index into tokens) of each role, template order.
  std::vector<std::size_t> placeholder_positions() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i].is_placeholder) out.push_back(i);
    }
    return out;
  }

  std::vector<std::string> token_strings() const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.text);
    return out;
  }
};

// Parses a raw template string against its role list. Whitespace-tokenizes,
// marks each <arg> as a placeholder, and binds roles positionally.
inline EventTemplate parse_template(const std::string& event_type,
                                    const std::string& raw,
                                    const std::vector<std::string>& roles) {
  EventTemplate tpl;
  tpl.event_type = event_type;
  tpl.roles = roles;
  std::set<std::string> unique_roles(roles.begin(), roles.end());
  if (unique_roles.size() != roles.size()) {
    throw ValidationError(
        msg("template for '", event_type, "' declares a role twice"));
  }
  std::size_t next_role = 0;
  for (auto& word : split_whitespace(raw)) {
    TemplateToken tok;
    tok.text = word;
    if (word == kArgPlaceholder) {
      tok.is_placeholder = true;
      if (next_role >= roles.size()) {
        throw ValidationError(msg("template for '", event_type, "' has more '",
                                  kArgPlaceholder, "' placeholders than roles (",
                                  roles.size(), ")"));
      }
      tok.role = roles[next_role++];
    }
    tpl.tokens.push_back(std::move(tok));
  }
  if (next_role != roles.size()) {
    throw ValidationError(msg("template for '", event_type, "' has ", next_role,
                              " placeholders but ", roles.size(), " roles"));
  }
  if (tpl.tokens.empty()) {
    throw ValidationError(msg("template for '", event_type, "' is empty"));
  }
  return tpl;
}

// Inverse of parse_template up to whitespace normalization.
inline std::string render_template(const EventTemplate& tpl) {
  return join_tokens(tpl.token_strings(), " ");
}

class Ontology {
 public:
  Ontology() = default;

  void add(EventTemplate tpl) {
    if (templates_.count(tpl.event_type)) {
      throw ValidationError(
          msg("duplicate event type '", tpl.event_type, "' in ontology"));
    }
    templates_.emplace(tpl.event_type, std::move(tpl));
  }

  bool has(const std::string& event_type) const {
    return templates_.count(event_type) != 0;
  }

  const EventTemplate& get(const std::string& event_type) const {
    auto it = templates_.find(event_type);
    if (it == templates_.end()) {
      throw ValidationError(msg("unknown event type '", event_type, "'"));
    }
    return it->second;
  }

  const std::map<std::string, EventTemplate>& all() const { return templates_; }
  std::size_t size() const { return templates_.size(); }

 private:
  std::map<std::string, EventTemplate> templates_;
};

inline Ontology ontology_from_json(const Json& j) {
  if (!j.is_object()) {
    throw ValidationError("ontology root must be a JSON object");
  }
  Ontology onto;
  for (const auto& [event_type, spec] : j.items()) {
    const Json& raw = detail::require_field(spec, "template", "ontology entry");
    const Json& roles_j = detail::require_field(spec, "roles", "ontology entry");
    std::vector<std::string> roles;
    for (const auto& r : roles_j) roles.push_back(r.get<std::string>());
    onto.add(parse_template(event_type, raw.get<std::string>(), roles));
  }
  return onto;
}

inline Json ontology_to_json(const Ontology& onto) {
  Json j = Json::object();
  for (const auto& [event_type, tpl] : onto.all()) {
    Json spec;
    spec["template"] = render_template(tpl);
    spec["roles"] = tpl.roles;
    j[event_type] = std::move(spec);
  }
  return j;
}

// Loads an ontology file, rejecting duplicate event-type keys (which the JSON
// parser would otherwise silently collapse, keeping only the last value).
inline Ontology load_ontology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(msg("cannot open ontology file '", path, "'"));
  std::vector<std::string> keys;
  Json::parser_callback_t cb = [&](int depth, Json::parse_event_t event,
                                   Json& parsed) {
    if (depth == 1 && event == Json::parse_event_t::key) {
      keys.push_back(parsed.get<std::string>());
    }
    return true;
  };
  Json j;
  try {
    j = Json::parse(in, cb);
  } catch (const Json::exception& e) {
    throw ValidationError(msg(path, ": parse failure: ", e.what()));
  }
  std::set<std::string> seen;
  for (const auto& k : keys) {
    if (!seen.insert(k).second) {
      throw ValidationError(
          msg(path, ": duplicate event type '", k, "' in ontology"));
    }
  }
  try {
    return ontology_from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError(msg(path, ": ", e.what()));
  }
}

inline void save_ontology(const std::string& path, const Ontology& onto) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(msg("cannot write ontology file '", path, "'"));
  out << ontology_to_json(onto).dump(2) << "\n";
}

}  // namespace ea2e
