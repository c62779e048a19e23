#include <doctest.h>

#include "common.hpp"
#include "socialbot/errors.hpp"
#include "socialbot/module.hpp"

using namespace socialbot;
using nlohmann::json;

namespace {

struct Chat {
  const Engine& engine;
  SessionState state;
  TurnResult last;

  Chat(const Engine& e, std::uint64_t seed)
      : engine(e), state(e.open_session("chat", "chat-user", seed)) {}

  const TurnResult& say(const std::string& text) {
    last = engine.process_turn(state, AsrInput::from_text(text));
    state = last.new_state;
    return last;
  }
};

}  // namespace

TEST_CASE("engine config from json") {
  auto cfg = EngineConfig::from_json(json{{"menu_size", 4}, {"scoring", {{"repeat_penalty", 0.1}}}});
  CHECK(cfg.menu_size == 4);
  CHECK(cfg.scoring.repeat_penalty == doctest::Approx(0.1));
  CHECK(cfg.scoring.incoherence_penalty == doctest::Approx(0.15));
  CHECK_THROWS_AS(EngineConfig::from_json(json{{"no_such_key", 1}}), ConfigError);
  auto round = EngineConfig::from_json(cfg.to_json());
  CHECK(round.menu_size == 4);
}

TEST_CASE("missing data directory is a config error") {
  EngineConfig cfg;
  cfg.data_dir = "/nonexistent/socialbot-data";
  CHECK_THROWS_AS(Engine{cfg}, ConfigError);
}

TEST_CASE("turns must carry a hypothesis") {
  const auto& e = testing::shared_engine();
  auto s = e.open_session("empty", "u", 1);
  CHECK_THROWS_AS(e.process_turn(s, AsrInput{}), InputError);
}

TEST_CASE("history and turn count grow by one user turn") {
  Chat c(testing::shared_engine(), 1);
  c.say("hello");
  c.say("what's your favorite color?");
  CHECK(c.state.turn_count == 2);
  CHECK(c.state.history.size() == 4);
}

TEST_CASE("short stop inside an activity asks first; explicit stop ends") {
  Chat c(testing::shared_engine(), 1);
  c.say("tell me a story");
  CHECK(c.state.activity);
  auto& r = c.say("stop");
  CHECK_FALSE(r.end_session);
  CHECK(r.reply.find("stop talking") != std::string::npos);
  c.say("no");
  CHECK(c.state.activity);
  CHECK(c.say("alexa stop").end_session);
}

TEST_CASE("repeat request replays the last reply") {
  Chat c(testing::shared_engine(), 1);
  auto first = c.say("what's your favorite color?").reply;
  CHECK(c.say("say that again").reply == first);
}

TEST_CASE("menu request lists topics and a choice starts one") {
  Chat c(testing::shared_engine(), 1);
  auto& m = c.say("what can we talk about");
  CHECK(m.reply.rfind("We could talk about", 0) == 0);
  REQUIRE(!m.expectations.empty());
  CHECK(m.expectations.front().rfind("menu:", 0) == 0);
}

TEST_CASE("noisy input asks for clarification") {
  const auto& e = testing::shared_engine();
  auto s = e.open_session("noisy", "u", 1);
  AsrInput in;
  in.hypotheses = {{"tell me a story", 0.2}, {"tell me a glory", 0.1}};
  auto r = e.process_turn(s, in);
  CHECK(r.reply.find("didn't quite catch") != std::string::npos);
}

TEST_CASE("nim game plays to a legal reply") {
  Chat c(testing::shared_engine(), 1);
  auto& start = c.say("play nim");
  CHECK(start.response.origin == kNim);
  auto& move = c.say("take 2 from the first pile");
  CHECK(move.response.origin == kNim);
}

TEST_CASE("prompts are not offered twice without penalty") {
  Chat c(testing::shared_engine(), 1);
  c.say("i love science");
  c.say("no");
  auto& again = c.say("i love science");
  bool penalized = false;
  for (const auto& t : again.trace) {
    if (t.loss.repeat > 0) penalized = true;
  }
  CHECK(penalized);
}

TEST_CASE("the turn log records the pool and winner") {
  Chat c(testing::shared_engine(), 1);
  auto& r = c.say("what's your favorite color?");
  auto j = r.log_entry(AsrInput::from_text("what's your favorite color?"));
  CHECK(j["session_id"] == "chat");
  CHECK(j["winner"]["origin"] == "opinions");
  CHECK(j["pool"].size() == r.trace.size());
}
