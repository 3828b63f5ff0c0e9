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

#include "ea2e/ontology.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "support/tempfile.hpp"

using namespace ea2e;
using ea2e_test::TempFile;

namespace {

const std::string kDetonateTemplate =
    "<arg> detonated or exploded <arg> explosive device using <arg> to attack "
    "<arg> target at <arg> place";
const std::vector<std::string> kDetonateRoles{
    "Attacker", "ExplosiveDevice", "Instrument", "Target", "Place"};

}  // namespace

TEST_CASE("a five-slot template binds five roles positionally") {
  const EventTemplate tpl =
      parse_template("detonate", kDetonateTemplate, kDetonateRoles);
  CHECK(tpl.placeholder_count() == 5);
  REQUIRE(tpl.placeholder_positions().size() == 5);
  std::size_t slot = 0;
  for (const auto& tok : tpl.tokens) {
    if (tok.is_placeholder) {
      CHECK(tok.text == kArgPlaceholder);
      CHECK(tok.role == kDetonateRoles[slot++]);
    } else {
      CHECK(tok.role.empty());
    }
  }
  CHECK(slot == 5);
}

TEST_CASE("a template with no slots and no roles is valid") {
  const EventTemplate tpl = parse_template("noise", "nothing happened", {});
  CHECK(tpl.placeholder_count() == 0);
  CHECK(tpl.tokens.size() == 2);
}

TEST_CASE("three slots against two roles is an error") {
  CHECK_THROWS_AS(
      parse_template("bad", "<arg> hit <arg> with <arg>", {"A", "B"}),
      ValidationError);
}

TEST_CASE("two slots against three roles is an error") {
  CHECK_THROWS_AS(parse_template("bad", "<arg> hit <arg>", {"A", "B", "C"}),
                  ValidationError);
}

TEST_CASE("a repeated role name is an error") {
  CHECK_THROWS_AS(parse_template("bad", "<arg> hit <arg>", {"A", "A"}),
                  ValidationError);
}

TEST_CASE("an empty template string is an error") {
  CHECK_THROWS_AS(parse_template("bad", "   ", {}), ValidationError);
}

TEST_CASE("rendering then re-parsing reproduces the template") {
  const EventTemplate tpl =
      parse_template("detonate", kDetonateTemplate, kDetonateRoles);
  const EventTemplate again =
      parse_template("detonate", render_template(tpl), tpl.roles);
  CHECK(again == tpl);
}

TEST_CASE("render/re-parse round trip holds for every built-in template") {
  Ontology onto;
  onto.add(parse_template("assault", "<arg> attacked <arg> at <arg>",
                          {"Attacker", "Target", "Place"}));
  onto.add(parse_template("detonate", kDetonateTemplate, kDetonateRoles));
  onto.add(parse_template("noise", "nothing happened", {}));
  for (const auto& [type, tpl] : onto.all()) {
    CHECK(parse_template(type, render_template(tpl), tpl.roles) == tpl);
  }
}

TEST_CASE("ontology JSON files load with slots bound in order") {
  TempFile f("onto");
  f.write(R"({
    "assault": {"template": "<arg> attacked <arg> at <arg>",
                "roles": ["Attacker", "Target", "Place"]},
    "detonate": {"template": ")" +
          kDetonateTemplate + R"(",
                 "roles": ["Attacker", "ExplosiveDevice", "Instrument",
                           "Target", "Place"]}
  })");
  const Ontology onto = load_ontology(f.path);
  CHECK(onto.size() == 2);
  CHECK(onto.get("assault").roles ==
        std::vector<std::string>{"Attacker", "Target", "Place"});
  CHECK(onto.get("detonate").placeholder_count() == 5);
  CHECK(onto.has("assault"));
  CHECK(!onto.has("unknown"));
  CHECK_THROWS_AS(onto.get("unknown"), ValidationError);
}

TEST_CASE("a duplicate event type key in an ontology file is an error") {
  TempFile f("onto-dup");
  f.write(R"({
    "assault": {"template": "<arg> attacked <arg>", "roles": ["A", "B"]},
    "assault": {"template": "<arg> struck <arg>", "roles": ["A", "B"]}
  })");
  try {
    load_ontology(f.path);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("duplicate event type") !=
          std::string::npos);
  }
}

TEST_CASE("adding the same event type twice is an error") {
  Ontology onto;
  onto.add(parse_template("assault", "<arg> attacked <arg>", {"A", "B"}));
  CHECK_THROWS_AS(
      onto.add(parse_template("assault", "<arg> struck <arg>", {"A", "B"})),
      ValidationError);
}

TEST_CASE("a slot/role count mismatch in an ontology file is an error") {
  TempFile f("onto-mismatch");
  f.write(R"({"bad": {"template": "<arg> hit <arg> with <arg>",
                      "roles": ["A", "B"]}})");
  CHECK_THROWS_AS(load_ontology(f.path), ValidationError);
}

TEST_CASE("ontology save/load round trip preserves every template") {
  Ontology onto;
  onto.add(parse_template("assault", "<arg> attacked <arg> at <arg>",
                          {"Attacker", "Target", "Place"}));
  onto.add(parse_template("detonate", kDetonateTemplate, kDetonateRoles));
  TempFile f("onto-roundtrip");
  save_ontology(f.path, onto);
  const Ontology again = load_ontology(f.path);
  REQUIRE(again.size() == onto.size());
  for (const auto& [type, tpl] : onto.all()) CHECK(again.get(type) == tpl);
}

TEST_CASE("a malformed ontology file names the path in its error") {
  TempFile f("onto-bad");
  f.write("{not json");
  try {
    load_ontology(f.path);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find(f.path) != std::string::npos);
  }
}
