#include <doctest.h>

#include "common.hpp"
#include "socialbot/text.hpp"

using namespace socialbot;

TEST_CASE("fold and tokenize") {
  CHECK(fold("Café ÉCLAIR") == "cafe eclair");
  CHECK(tokenize("What's your favorite film?") ==
        std::vector<std::string>{"what's", "your", "favorite", "film"});
  CHECK(tokenize("Mexico's capital") == std::vector<std::string>{"mexico", "capital"});
  CHECK(tokenize("  ").empty());
}

TEST_CASE("string helpers") {
  CHECK(trim("  a b \t") == "a b");
  CHECK(split("a;b;;c", ';') == std::vector<std::string>{"a", "b", "", "c"});
  std::vector<std::string> parts = {"x", "y"};
  CHECK(join(parts, ", ") == "x, y");
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(capitalize("hello") == "Hello");
  CHECK(ends_with("story.flow", ".flow"));
}

TEST_CASE("dialogue acts") {
  const auto& an = testing::shared_engine().analyzer();
  CHECK(an.analyze_text("what is your favorite color").dialogue_act == DialogueAct::Question);
  CHECK(an.analyze_text("sure why not").dialogue_act == DialogueAct::YesAnswer);
  CHECK(an.analyze_text("no thanks").dialogue_act == DialogueAct::NoAnswer);
  CHECK(an.analyze_text("hello").dialogue_act == DialogueAct::Greeting);
  CHECK(an.analyze_text("tell me a story").dialogue_act == DialogueAct::Command);
  CHECK(an.analyze_text("say that again").dialogue_act == DialogueAct::RepeatRequest);
  CHECK(an.analyze_text("alexa stop").dialogue_act == DialogueAct::StopRequest);
  CHECK(an.analyze_text("i went to the park").dialogue_act == DialogueAct::Statement);
}

TEST_CASE("entities, topic and sentiment") {
  const auto& an = testing::shared_engine().analyzer();
  auto a = an.analyze_text("what is the capitol city of mexico");
  REQUIRE(!a.entities.empty());
  CHECK(a.has_entity("mexico"));
  CHECK(an.analyze_text("i love video games").topic == std::optional<std::string>("video_games"));
  CHECK(an.analyze_text("i love this").sentiment > 0.0);
  CHECK(an.analyze_text("i hate this").sentiment < 0.0);
  // Longest match wins: "mexico city" rather than "mexico".
  auto b = an.analyze_text("tell me about mexico city");
  CHECK(b.has_entity("mexico_city"));
  CHECK_FALSE(b.has_entity("mexico"));
}

TEST_CASE("content words drop stopwords") {
  const auto& an = testing::shared_engine().analyzer();
  auto a = an.analyze_text("how is it that you are smart");
  CHECK(a.content_words == std::vector<std::string>{"smart"});
}

TEST_CASE("coreference resolves 'it' to the last non-person entity") {
  const auto& engine = testing::shared_engine();
  auto s = engine.open_session("coref", "coref-user", 1);
  auto r = engine.process_turn(s, AsrInput::from_text("what is the capitol city of mexico"));
  const auto& an = engine.analyzer();
  auto a = an.resolve_coreference(
      an.analyze(AsrInput::from_text("what is its population"), r.new_state), r.new_state);
  REQUIRE(a.resolved_query.has_value());
  CHECK(fold(*a.resolved_query).find("mexico city") != std::string::npos);
}

TEST_CASE("low ASR confidence asks for clarification") {
  const auto& an = testing::shared_engine().analyzer();
  SessionState s;
  AsrInput in;
  in.hypotheses = {{"tell me a story", 0.2}, {"tell me a glory", 0.1}};
  CHECK(an.analyze(in, s).needs_clarification);
  CHECK_FALSE(an.analyze(AsrInput::from_text("tell me a story"), s).needs_clarification);
}
