#include <doctest.h>

#include <fstream>

#include "common.hpp"
#include "socialbot/errors.hpp"
#include "socialbot/replay.hpp"

using namespace socialbot;
using nlohmann::json;

TEST_CASE("replay scripts parse and round trip") {
  auto j = json::parse(R"({"seed": 5, "turns": [
    {"text": "hello", "expect": {"origin": "retrieval"}},
    {"hypotheses": [{"text": "tell me a story", "score": 0.9}]}
  ]})");
  auto s = ReplayScript::from_json(j);
  CHECK(s.seed == 5);
  CHECK(s.user_id == "replay-user");
  REQUIRE(s.turns.size() == 2);
  CHECK(s.turns[0].expect->origin == std::optional<std::string>("retrieval"));
  CHECK(s.turns[1].input.hypotheses[0].score == doctest::Approx(0.9));
  auto back = ReplayScript::from_json(s.to_json());
  CHECK(back.turns.size() == 2);
  CHECK(back.turns[0].input.hypotheses[0].text == "hello");
}

TEST_CASE("bad replay scripts are input errors") {
  CHECK_THROWS_AS(ReplayScript::from_json(json::array()), InputError);
  CHECK_THROWS_AS(ReplayScript::from_json(json{{"turns", 3}}), InputError);
  CHECK_THROWS_AS(ReplayScript::from_json(json::parse(R"({"turns": [{"nope": 1}]})")),
                  InputError);
  CHECK_THROWS_AS(ReplayScript::from_json(json::parse(R"({"seed": "x", "turns": []})")),
                  InputError);
}

TEST_CASE("replay reports mismatches per turn") {
  const auto& e = testing::shared_engine();
  auto s = ReplayScript::from_json(json::parse(R"({"seed": 1, "turns": [
    {"text": "what's your favorite color?",
     "expect": {"origin": "retrieval", "equals": "No.", "contains": "purple"}}
  ]})"));
  auto r = run_replay(e, s);
  CHECK_FALSE(r.ok());
  CHECK(r.failures.size() == 2);  // origin and equals; contains holds
  CHECK(r.transcript().rfind("USER: what's your favorite color?\nAGENT[opinions]: ", 0) == 0);
  CHECK(r.log.size() == 1);
}

TEST_CASE("metrics: module episodes and flow utilization") {
  auto turn = [](std::string sid, json engaged, json activity, json flow_turn = nullptr,
                 json prompted = nullptr) {
    return json{{"session_id", sid},       {"engaged_module", engaged},
                {"activity", activity},    {"flow_turn", flow_turn},
                {"prompted_flow", prompted}, {"flow", flow_turn}};
  };
  std::vector<json> log = {
      turn("s1", "recursive", "recursive"),
      turn("s1", nullptr, "recursive"),  // menu turn inside the activity
      turn("s1", "recursive", "recursive"),
      turn("s1", "survey", "survey"),
      turn("s1", nullptr, nullptr, nullptr, "books"),
      turn("s1", nullptr, nullptr, "books"),
      turn("s1", nullptr, nullptr, "books"),
      turn("s1", nullptr, nullptr, "books"),
      turn("s2", nullptr, nullptr, "movies", "movies"),
      turn("s2", nullptr, nullptr, "movies"),
  };
  auto m = compute_metrics(log);
  CHECK(m.sessions == 2);
  CHECK(m.turns == 10);
  CHECK(m.modules["recursive"].episodes == 1);
  CHECK(m.modules["recursive"].turns == 2);
  CHECK(m.modules["survey"].turns == 1);
  CHECK(m.flows["books"].prompted == 1);
  CHECK(m.flows["books"].utilized == 1);
  CHECK(m.flows["movies"].prompted == 1);
  CHECK(m.flows["movies"].utilized == 0);
  auto j = m.to_json();
  CHECK(j["modules"]["recursive"]["mean_turns"] == 2.0);
  CHECK(m.to_text().find("books") != std::string::npos);
}

TEST_CASE("turn logs are read from a directory of jsonl files") {
  auto dir = testing::temp_dir("logs");
  std::ofstream(dir / "b.jsonl") << R"({"session_id": "b"})" << "\n";
  std::ofstream(dir / "a.jsonl") << R"({"session_id": "a"})" << "\n\n";
  std::ofstream(dir / "ignore.txt") << "nope";
  auto all = read_turn_logs(dir);
  REQUIRE(all.size() == 2);
  CHECK(all[0]["session_id"] == "a");
  std::ofstream(dir / "c.jsonl") << "{bad\n";
  CHECK_THROWS_AS(read_turn_logs(dir), InputError);
  CHECK_THROWS_AS(read_turn_logs(dir / "missing"), InputError);
}
