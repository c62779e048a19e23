#include <doctest.h>

#include "common.hpp"
#include "socialbot/flow.hpp"

using namespace socialbot;

namespace {

const char* kSmall = R"(# a small flow
flow pets
topic pets
label "pets"
triggers pets | pet
prompt "Do you have any pets?"

expect yes act YesAnswer
expect no act NoAnswer
expect animal predicate mentions_entity

entry yes -> which
entry animal -> named

node which
  say "What kind of pet do you have?"
  on animal -> named
  on no -> bye

node named
  say "I love {entity}!"
  set pet = "{entity}"
  on yes -> bye

node bye
  say "Okay, see you. You said {pet}."
)";

}  // namespace

TEST_CASE("template variables and rendering") {
  CHECK(template_vars("Hi {name}, {name} likes {thing}") ==
        std::set<std::string>{"name", "thing"});
  CHECK(render_template("I love {entity}!", {{"entity", "dogs"}}) == "I love dogs!");
}

TEST_CASE("parse a flow") {
  std::vector<FlowDiagnostic> diags;
  auto f = parse_flow(kSmall, "small.flow", diags);
  REQUIRE(f);
  CHECK(f->id == "pets");
  CHECK(f->label == "pets");
  CHECK(f->triggers == std::vector<std::string>{"pets", "pet"});
  CHECK(f->nodes.size() == 3);
  CHECK(f->subroots() == std::vector<std::string>{"which", "named"});
  CHECK(f->expectation_ids("") == std::vector<std::string>{"yes", "animal"});
  CHECK(f->expectation_ids("which") == std::vector<std::string>{"animal", "no"});
  CHECK(f->expectation_ids("bye").empty());
}

TEST_CASE("validator: a var set on one path but unbound on another is reported") {
  // "bye" is reachable through "which" without "pet" ever being set.
  std::vector<FlowDiagnostic> diags;
  auto f = parse_flow(kSmall, "small.flow", diags);
  REQUIRE(f);
  const auto& e = testing::shared_engine();
  auto env = FlowEnvironment::from(e.resources().functions, e.modules());
  auto out = validate_flow(*f, env);
  REQUIRE(out.size() == 1);
  CHECK(out.front().rule == "unbound-var");
  CHECK(out.front().line > 0);
}

TEST_CASE("validator: shipped flows load") {
  const auto& e = testing::shared_engine();
  CHECK(e.flows().size() == 5);
  for (const auto* id : {"video_games", "books", "movies", "dinosaurs", "astronomy"}) {
    CHECK(e.flows().find(id) != nullptr);
  }
}

TEST_CASE("diagnostics serialize with file and line") {
  FlowDiagnostic d{"x.flow", 12, "unknown-node", "node 'q' is not defined"};
  auto j = d.to_json();
  CHECK(j["file"] == "x.flow");
  CHECK(j["line"] == 12);
  CHECK(j["rule"] == "unknown-node");
}

TEST_CASE("advance: first matching edge wins, no match exits") {
  const auto& e = testing::shared_engine();
  auto s = e.open_session("flow-adv", "flow-user", 2);
  auto r = e.process_turn(s, AsrInput::from_text("let's talk about video games"));
  REQUIRE(r.new_state.active_flow);
  CHECK(r.expectations == std::vector<std::string>{"trivia_request", "minecraft", "named_game", "yes"});
  r = e.process_turn(r.new_state, AsrInput::from_text("yes"));
  CHECK(r.reply == "Awesome! What's your favorite game to play?");
  CHECK(r.expectations == std::vector<std::string>{"minecraft", "named_game", "long", "no"});
  // "minecraft" is also a media title; the earlier edge is taken.
  auto m = e.process_turn(r.new_state, AsrInput::from_text("minecraft"));
  REQUIRE(m.new_state.active_flow);
  CHECK(m.new_state.active_flow->node_id == "minecraft_talk");
  auto x = e.process_turn(r.new_state, AsrInput::from_text("hmm"));
  CHECK(x.flow_exited);
  CHECK_FALSE(x.new_state.active_flow);
}

TEST_CASE("explore postcondition marks the topic explored") {
  const auto& e = testing::shared_engine();
  auto s = e.open_session("flow-explore", "flow-user", 2);
  auto r = e.process_turn(s, AsrInput::from_text("i love playing minecraft video games"));
  CHECK(r.new_state.explored_topics.count("minecraft") == 1);
}
