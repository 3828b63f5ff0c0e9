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

#include "ea2e/templating.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "ea2e/common.hpp"
#include "ea2e/ontology.hpp"

using namespace ea2e;

namespace {

EventTemplate detonate_template() {
  return parse_template(
      "detonate",
      "<arg> detonated or exploded <arg> explosive device using <arg> to "
      "attack <arg> target at <arg> place",
      {"Attacker", "ExplosiveDevice", "Instrument", "Target", "Place"});
}

EventTemplate assault_template() {
  return parse_template("assault", "<arg> attacked <arg> at <arg>",
                        {"Attacker", "Target", "Place"});
}

}  // namespace

TEST_CASE("build_input produces the fixed marker layout") {
  const std::vector<std::string> tpl{"a", "hit", "b"};
  const std::vector<std::string> ctx{"w1", "w2", "w3", "w4"};
  const InputSequence seq = build_input(tpl, ctx);
  CHECK(seq.tokens.size() == 3 + 4 + 4);
  CHECK(seq.tokens ==
        std::vector<std::string>{"<s>", "a", "hit", "b", "</s>", "</s>", "w1",
                                 "w2", "w3", "w4", "</s>"});
  CHECK(seq.template_begin == 1);
  CHECK(seq.template_end == 4);
  CHECK(seq.context_begin == 6);
  CHECK(seq.context_end == 10);
}

TEST_CASE("build_input starts with the marker then the template tokens") {
  const EventTemplate tpl = detonate_template();
  const InputSequence seq =
      build_input(tpl.token_strings(), {"ctx", "tokens"});
  REQUIRE(seq.tokens.size() > 5);
  CHECK(seq.tokens[0] == "<s>");
  CHECK(seq.tokens[1] == "<arg>");
  CHECK(seq.tokens[2] == "detonated");
  CHECK(seq.tokens[3] == "or");
  CHECK(seq.tokens[4] == "exploded");
}

TEST_CASE("build_input accepts a zero-slot template") {
  const InputSequence seq = build_input({"nothing", "happened"}, {"ctx"});
  CHECK(seq.tokens == std::vector<std::string>{"<s>", "nothing", "happened",
                                               "</s>", "</s>", "ctx", "</s>"});
}

TEST_CASE("fill_template substitutes one role and keeps the rest open") {
  const EventTemplate tpl = detonate_template();
  RoleFills fills;
  fills["Attacker"] = {{"Ahmad", "Khan", "Rahami"}};
  const FilledTemplate out = fill_template(tpl, fills);
  CHECK(join_tokens(out.tokens, " ") ==
        "Ahmad Khan Rahami detonated or exploded <arg> explosive device using "
        "<arg> to attack <arg> target at <arg> place");
  REQUIRE(out.fill_ranges.size() == 1);
  CHECK(out.fill_ranges[0] == FillRange{"Attacker", 0, 3});
  CHECK(out.slot_fills.at("Attacker") ==
        std::vector<std::vector<std::string>>{{"Ahmad", "Khan", "Rahami"}});
  CHECK(is_unfilled(out.slot_fills.at("Target")));
}

TEST_CASE("fill_template with no assignments leaves the template unchanged") {
  const EventTemplate tpl = assault_template();
  const FilledTemplate out = fill_template(tpl, {});
  CHECK(out.tokens == tpl.token_strings());
  CHECK(out.fill_ranges.empty());
  for (const auto& role : tpl.roles) {
    CHECK(is_unfilled(out.slot_fills.at(role)));
  }
}

TEST_CASE("two fills for one role are joined with the join token") {
  const EventTemplate tpl = assault_template();
  RoleFills fills;
  fills["Target"] = {{"Cole"}, {"port"}};
  const FilledTemplate out = fill_template(tpl, fills);
  CHECK(join_tokens(out.tokens, " ") == "<arg> attacked Cole and port at <arg>");
  REQUIRE(out.fill_ranges.size() == 2);
  CHECK(out.fill_ranges[0] == FillRange{"Target", 2, 3});
  CHECK(out.fill_ranges[1] == FillRange{"Target", 4, 5});
}

TEST_CASE("fill_template rejects a role missing from the template") {
  const EventTemplate tpl = assault_template();
  RoleFills fills;
  fills["Pilot"] = {{"someone"}};
  CHECK_THROWS_AS(fill_template(tpl, fills), ValidationError);
}

TEST_CASE("fill_template rejects an empty fill") {
  const EventTemplate tpl = assault_template();
  RoleFills fills;
  fills["Target"] = {{}};
  CHECK_THROWS_AS(fill_template(tpl, fills), ValidationError);
}

TEST_CASE("filled length follows the counting identity") {
  const EventTemplate tpl = assault_template();
  RoleFills fills;
  fills["Attacker"] = {{"the", "squad"}};
  fills["Target"] = {{"Cole"}, {"port"}};
  const FilledTemplate out = fill_template(tpl, fills);
  // template length − filled slots + Σ fill lengths + join tokens.
  const std::size_t expected = tpl.tokens.size() - 2 + (2 + 1 + 1) + 1;
  CHECK(out.tokens.size() == expected);
}

TEST_CASE("gold_role_fills orders fills by span position") {
  Document doc;
  doc.doc_id = "d";
  doc.tokens = {"port", "x", "Cole", "y"};
  EventMention ev;
  ev.event_id = "e";
  ev.event_type = "assault";
  ev.trigger = {1, 2, std::nullopt};
  ev.gold_args = {{"Target", Span{2, 3, std::nullopt}, std::nullopt},
                  {"Target", Span{0, 1, std::nullopt}, std::nullopt}};
  doc.events.push_back(ev);
  const RoleFills fills = gold_role_fills(doc, ev);
  CHECK(fills.at("Target") ==
        std::vector<std::vector<std::string>>{{"port"}, {"Cole"}});
}

TEST_CASE("parse_filled inverts fill_template on unique fills") {
  const EventTemplate tpl = detonate_template();
  RoleFills fills;
  fills["Attacker"] = {{"Ahmad", "Khan", "Rahami"}};
  fills["Place"] = {{"Manhattan"}};
  const FilledTemplate filled = fill_template(tpl, fills);
  const ParseResult parsed = parse_filled(tpl, filled.tokens);
  CHECK(parsed.clean);
  CHECK(parsed.diagnostics.empty());
  CHECK(parsed.filled.slot_fills == filled.slot_fills);
  CHECK(parsed.filled.fill_ranges == filled.fill_ranges);
}

TEST_CASE("parse_filled splits a joined fill into separate conjuncts") {
  const EventTemplate tpl = assault_template();
  const ParseResult parsed = parse_filled(
      tpl, split_whitespace("<arg> attacked Cole and port at <arg>"));
  CHECK(parsed.clean);
  CHECK(parsed.filled.slot_fills.at("Target") ==
        std::vector<std::vector<std::string>>{{"Cole"}, {"port"}});
  CHECK(is_unfilled(parsed.filled.slot_fills.at("Attacker")));
  CHECK(is_unfilled(parsed.filled.slot_fills.at("Place")));
}

TEST_CASE("parse_filled recovers slots before a truncation point") {
  const EventTemplate tpl = assault_template();
  // Output loses everything from "at" on.
  const ParseResult parsed =
      parse_filled(tpl, split_whitespace("raiders attacked Cole"));
  CHECK(!parsed.clean);
  CHECK(parsed.filled.slot_fills.at("Attacker") ==
        std::vector<std::vector<std::string>>{{"raiders"}});
  // The fill before the missing literal absorbs the tail; the final slot
  // stays open.
  CHECK(parsed.filled.slot_fills.at("Target") ==
        std::vector<std::vector<std::string>>{{"Cole"}});
  CHECK(parsed.filled.slot_fills.at("Place") ==
        std::vector<std::vector<std::string>>{{kArgPlaceholder}});
}

TEST_CASE("parse_filled never throws on arbitrary token soup") {
  const EventTemplate tpl = assault_template();
  for (const char* junk :
       {"", "and and and", "zzz", "<arg>", "attacked attacked attacked at",
        "at at at", "x attacked and at y", "<arg> <arg> <arg> <arg>"}) {
    const ParseResult parsed = parse_filled(tpl, split_whitespace(junk));
    for (const auto& role : tpl.roles) {
      CHECK(parsed.filled.slot_fills.count(role) == 1);
    }
  }
}

TEST_CASE("parse_filled flags junk after the template end") {
  const EventTemplate tpl = assault_template();
  const ParseResult parsed = parse_filled(
      tpl, split_whitespace("x attacked y at z extra garbage"));
  // "z extra garbage" is the final open-ended slot, so it is absorbed; a
  // template ending in a literal does flag trailing junk.
  const EventTemplate closed =
      parse_template("closed", "<arg> attacked <arg> yesterday", {"A", "B"});
  const ParseResult p2 =
      parse_filled(closed, split_whitespace("x attacked y yesterday qqq"));
  CHECK(!p2.clean);
  CHECK(parsed.filled.slot_fills.at("Place") ==
        std::vector<std::vector<std::string>>{{"z", "extra", "garbage"}});
}

TEST_CASE("round trip holds for random fill combinations") {
  const EventTemplate tpl = detonate_template();
  const std::vector<std::string> words{"alpha", "bravo", "santos",
                                       "mira", "tov", "lund"};
  Rng rng(404);
  for (int trial = 0; trial < 300; ++trial) {
    RoleFills fills;
    std::size_t next_word = 0;
    for (const auto& role : tpl.roles) {
      const std::size_t n = rng.below(3);
      std::vector<std::vector<std::string>> role_fills;
      for (std::size_t f = 0; f < n && next_word < words.size(); ++f) {
        // Distinct single words keep each fill unique in the output.
        role_fills.push_back({words[next_word++]});
      }
      if (!role_fills.empty()) fills[role] = role_fills;
    }
    const FilledTemplate filled = fill_template(tpl, fills);
    const ParseResult parsed = parse_filled(tpl, filled.tokens);
    CHECK(parsed.clean);
    CHECK(parsed.filled.slot_fills == filled.slot_fills);
    CHECK(parsed.filled.fill_ranges == filled.fill_ranges);
  }
}

TEST_CASE("find_occurrences lists every match position") {
  const std::vector<std::string> hay{"a", "b", "a", "b", "a"};
  CHECK(find_occurrences(hay, {"a", "b"}) == std::vector<std::size_t>{0, 2});
  CHECK(find_occurrences(hay, {"a"}) == std::vector<std::size_t>{0, 2, 4});
  CHECK(find_occurrences(hay, {"z"}).empty());
  CHECK(find_occurrences(hay, {}).empty());
}

TEST_CASE("ground_fills picks the earliest exact context match") {
  const EventTemplate tpl = assault_template();
  RoleFills fills;
  fills["Target"] = {{"port"}};
  const FilledTemplate filled = fill_template(tpl, fills);
  const std::vector<std::string> context{"x", "port", "y", "port", "z"};
  const auto grounded = ground_fills(filled, context);
  REQUIRE(grounded.size() == 1);
  CHECK(grounded[0].role == "Target");
  CHECK(grounded[0].span == Span{1, 2, std::nullopt});
}

TEST_CASE("ground_fills reports fills absent from the context") {
  const EventTemplate tpl = assault_template();
  RoleFills fills;
  fills["Target"] = {{"ghost"}};
  const FilledTemplate filled = fill_template(tpl, fills);
  std::vector<std::string> diagnostics;
  const auto grounded =
      ground_fills(filled, {"x", "y", "z"}, &diagnostics);
  CHECK(grounded.empty());
  REQUIRE(diagnostics.size() == 1);
  CHECK(diagnostics[0].find("ghost") != std::string::npos);
}
