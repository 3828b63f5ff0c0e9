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

// Data model for documents, event mentions, argument spans, and entity
// coreference clusters, plus JSONL ingestion/serialization.
//
// Corpus format: one JSON object per line,
//   {"doc_id": ..., "tokens": [...],
//    "events": [{"event_id", "event_type",
//                "trigger": {"start","end","head"?},
//                "arguments": [{"role","start","end","head"?,"entity_id"?}]}],
//    "clusters": [{"entity_id", "spans": [{"start","end","head"?}]}]}
// Spans are half-open token intervals [start, end).

#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ea2e/common.hpp"

namespace ea2e {

using Json = nlohmann::ordered_json;

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::optional<std::size_t> head;

  std::size_t length() const { return end - start; }
  friend bool operator==(const Span&, const Span&) = default;
  friend bool operator<(const Span& a, const Span& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end < b.end;
    return a.head < b.head;
  }
};

struct RoleAssignment {
  std::string role;
  Span span;
  std::optional<std::string> entity_id;

  friend bool operator==(const RoleAssignment&, const RoleAssignment&) = default;
  friend bool operator<(const RoleAssignment& a, const RoleAssignment& b) {
    if (a.role != b.role) return a.role < b.role;
    if (!(a.span == b.span)) return a.span < b.span;
    return a.entity_id < b.entity_id;
  }
};

struct EventMention {
  std::string event_id;
  std::string event_type;
  Span trigger;
  std::vector<RoleAssignment> gold_args;  // may be empty at predict time

  friend bool operator==(const EventMention&, const EventMention&) = default;
};

struct EntityCluster {
  std::string entity_id;
  std::vector<Span> member_spans;

  friend bool operator==(const EntityCluster&, const EntityCluster&) = default;
};

struct Document {
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<EventMention> events;
  std::vector<EntityCluster> clusters;

  friend bool operator==(const Document&, const Document&) = default;

  const EventMention& event_by_id(const std::string& event_id) const {
    for (const auto& ev : events) {
      if (ev.event_id == event_id) return ev;
    }
    throw ValidationError(
        msg("unknown event id '", event_id, "' in document '", doc_id, "'"));
  }

  bool has_event(const std::string& event_id) const {
    return std::any_of(events.begin(), events.end(), [&](const EventMention& e) {
      return e.event_id == event_id;
    });
  }

  const EntityCluster* cluster_by_id(const std::string& entity_id) const {
    for (const auto& c : clusters) {
      if (c.entity_id == entity_id) return &c;
    }
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline void check_span(const Span& s, std::size_t n_tokens,
                       const std::string& what,
                       std::vector<std::string>* problems) {
  if (s.start >= s.end) {
    problems->push_back(msg(what, ": empty span [", s.start, ", ", s.end, ")"));
    return;
  }
  if (s.end > n_tokens) {
    problems->push_back(msg(what, ": span out of bounds [", s.start, ", ", s.end,
                            ") with ", n_tokens, " tokens"));
  }
  if (s.head && (*s.head < s.start || *s.head >= s.end)) {
    problems->push_back(
        msg(what, ": head ", *s.head, " outside [", s.start, ", ", s.end, ")"));
  }
}

}  // namespace detail

// Returns every violated invariant; empty means the document is valid.
inline std::vector<std::string> document_problems(const Document& doc) {
  std::vector<std::string> problems;
  const std::size_t n = doc.tokens.size();

  std::set<std::string> event_ids;
  for (const auto& ev : doc.events) {
    if (!event_ids.insert(ev.event_id).second) {
      problems.push_back(msg("duplicate event id '", ev.event_id, "'"));
    }
    detail::check_span(ev.trigger, n, msg("event '", ev.event_id, "' trigger"),
                       &problems);
    std::set<std::pair<std::string, Span>> seen;
    for (const auto& a : ev.gold_args) {
      detail::check_span(a.span, n,
                         msg("event '", ev.event_id, "' argument '", a.role, "'"),
                         &problems);
      if (!seen.insert({a.role, a.span}).second) {
        problems.push_back(msg("event '", ev.event_id,
                               "' has two arguments with identical role '",
                               a.role, "' and span"));
      }
    }
  }

  std::set<std::string> cluster_ids;
  for (const auto& c : doc.clusters) {
    if (!cluster_ids.insert(c.entity_id).second) {
      problems.push_back(msg("duplicate cluster id '", c.entity_id, "'"));
    }
    std::set<Span> members;
    for (const auto& s : c.member_spans) {
      detail::check_span(s, n, msg("cluster '", c.entity_id, "' span"),
                         &problems);
      if (!members.insert(s).second) {
        problems.push_back(
            msg("cluster '", c.entity_id, "' has duplicate member spans"));
      }
    }
  }

  for (const auto& ev : doc.events) {
    for (const auto& a : ev.gold_args) {
      if (a.entity_id && cluster_ids.count(*a.entity_id) == 0) {
        problems.push_back(msg("event '", ev.event_id, "' argument '", a.role,
                               "' references unknown cluster '", *a.entity_id,
                               "'"));
      }
    }
  }
  return problems;
}

inline void validate_document(const Document& doc) {
  const auto problems = document_problems(doc);
  if (!problems.empty()) {
    throw ValidationError(msg("document '", doc.doc_id, "': ",
                              join_tokens(problems, "; ")));
  }
}

// ---------------------------------------------------------------------------
// JSON (de)serialization

namespace detail {

inline const Json& require_field(const Json& j, const char* name,
                                 const char* where) {
  if (!j.contains(name)) {
    throw ValidationError(msg(where, ": missing field '", name, "'"));
  }
  return j.at(name);
}

inline std::size_t size_field(const Json& j, const char* name,
                              const char* where) {
  const Json& v = require_field(j, name, where);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ValidationError(msg(where, ": field '", name,
                              "' must be a non-negative integer"));
  }
  return v.get<std::size_t>();
}

inline Span span_from_json(const Json& j, const char* where) {
  Span s;
  s.start = size_field(j, "start", where);
  s.end = size_field(j, "end", where);
  if (j.contains("head") && !j.at("head").is_null()) {
    s.head = size_field(j, "head", where);
  }
  return s;
}

inline Json span_to_json(const Span& s) {
  Json j;
  j["start"] = s.start;
  j["end"] = s.end;
  if (s.head) j["head"] = *s.head;
  return j;
}

}  // namespace detail

inline Document document_from_json(const Json& j) {
  Document doc;
  doc.doc_id = detail::require_field(j, "doc_id", "document").get<std::string>();
  for (const auto& t : detail::require_field(j, "tokens", "document")) {
    doc.tokens.push_back(t.get<std::string>());
  }
  if (j.contains("events")) {
    for (const auto& ej : j.at("events")) {
      EventMention ev;
      ev.event_id =
          detail::require_field(ej, "event_id", "event").get<std::string>();
      ev.event_type =
          detail::require_field(ej, "event_type", "event").get<std::string>();
      ev.trigger = detail::span_from_json(
          detail::require_field(ej, "trigger", "event"), "trigger");
      if (ej.contains("arguments")) {
        for (const auto& aj : ej.at("arguments")) {
          RoleAssignment a;
          a.role =
              detail::require_field(aj, "role", "argument").get<std::string>();
          a.span = detail::span_from_json(aj, "argument");
          if (aj.contains("entity_id") && !aj.at("entity_id").is_null()) {
            a.entity_id = aj.at("entity_id").get<std::string>();
          }
          ev.gold_args.push_back(std::move(a));
        }
      }
      doc.events.push_back(std::move(ev));
    }
  }
  if (j.contains("clusters")) {
    for (const auto& cj : j.at("clusters")) {
      EntityCluster c;
      c.entity_id =
          detail::require_field(cj, "entity_id", "cluster").get<std::string>();
      for (const auto& sj : detail::require_field(cj, "spans", "cluster")) {
        c.member_spans.push_back(detail::span_from_json(sj, "cluster span"));
      }
      doc.clusters.push_back(std::move(c));
    }
  }
  return doc;
}

inline Json document_to_json(const Document& doc) {
  Json j;
  j["doc_id"] = doc.doc_id;
  j["tokens"] = doc.tokens;
  Json events = Json::array();
  for (const auto& ev : doc.events) {
    Json ej;
    ej["event_id"] = ev.event_id;
    ej["event_type"] = ev.event_type;
    ej["trigger"] = detail::span_to_json(ev.trigger);
    Json args = Json::array();
    for (const auto& a : ev.gold_args) {
      Json aj;
      aj["role"] = a.role;
      aj["start"] = a.span.start;
      aj["end"] = a.span.end;
      if (a.span.head) aj["head"] = *a.span.head;
      if (a.entity_id) aj["entity_id"] = *a.entity_id;
      args.push_back(std::move(aj));
    }
    ej["arguments"] = std::move(args);
    events.push_back(std::move(ej));
  }
  j["events"] = std::move(events);
  Json clusters = Json::array();
  for (const auto& c : doc.clusters) {
    Json cj;
    cj["entity_id"] = c.entity_id;
    Json spans = Json::array();
    for (const auto& s : c.member_spans) spans.push_back(detail::span_to_json(s));
    cj["spans"] = std::move(spans);
    clusters.push_back(std::move(cj));
  }
  j["clusters"] = std::move(clusters);
  return j;
}

// ---------------------------------------------------------------------------
// File I/O

// Loads and validates a JSONL corpus. Errors name the offending line.
inline std::vector<Document> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(msg("cannot open corpus file '", path, "'"));
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw ValidationError(msg(path, ":", line_no, ": parse failure: ", e.what()));
    }
    Document doc;
    try {
      doc = document_from_json(j);
      validate_document(doc);
    } catch (const ValidationError& e) {
      throw ValidationError(msg(path, ":", line_no, ": ", e.what()));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

inline void write_corpus(const std::string& path,
                         const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(msg("cannot write corpus file '", path, "'"));
  for (const auto& doc : docs) {
    out << document_to_json(doc).dump() << "\n";
  }
}

// ---------------------------------------------------------------------------
// Trigger distance

// Token distance between two events, measured between trigger start indices.
inline std::size_t token_distance(const Document& doc, const std::string& a,
                                  const std::string& b) {
  const auto sa = doc.event_by_id(a).trigger.start;
  const auto sb = doc.event_by_id(b).trigger.start;
  return sa > sb ? sa - sb : sb - sa;
}

inline std::vector<std::string> span_tokens(const Document& doc, const Span& s) {
  if (s.end > doc.tokens.size() || s.start >= s.end) {
    throw ValidationError(msg("document '", doc.doc_id,
                              "': span out of bounds [", s.start, ", ", s.end,
                              ")"));
  }
  return {doc.tokens.begin() + static_cast<std::ptrdiff_t>(s.start),
          doc.tokens.begin() + static_cast<std::ptrdiff_t>(s.end)};
}

}  // namespace ea2e
