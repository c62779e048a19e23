#include <doctest.h>

#include <fstream>
#include <thread>

#include <httplib.h>

#include "common.hpp"
#include "socialbot/replay.hpp"
#include "socialbot/service.hpp"

using namespace socialbot;
using nlohmann::json;

TEST_CASE("session manager lifecycle") {
  const auto& e = testing::shared_engine();
  auto logs = testing::temp_dir("service-logs");
  SessionManager m(e, ServiceOptions{std::chrono::minutes(1), logs, [] { return 42ull; }});
  auto c = m.create(std::nullopt, std::nullopt);
  CHECK(c.seed == 42);
  CHECK(c.user_id.rfind("anon-", 0) == 0);
  auto r = m.turn(c.session_id, AsrInput::from_text("hello"));
  CHECK(!r.reply.empty());
  CHECK(m.summary(c.session_id)["turn_count"] == 1);
  CHECK(read_turn_logs(logs).size() == 1);
  CHECK_THROWS_AS(m.turn("nope", AsrInput::from_text("hi")), SessionNotFound);
  m.close(c.session_id);
  CHECK(m.size() == 0);
  CHECK_THROWS_AS(m.summary(c.session_id), SessionNotFound);
}

TEST_CASE("ending the conversation removes the session") {
  const auto& e = testing::shared_engine();
  SessionManager m(e);
  auto c = m.create(std::string("u1"), 1ull);
  auto r = m.turn(c.session_id, AsrInput::from_text("alexa stop"));
  CHECK(r.end_session);
  CHECK(m.size() == 0);
}

TEST_CASE("idle sessions are swept") {
  const auto& e = testing::shared_engine();
  SessionManager m(e, ServiceOptions{std::chrono::milliseconds(50), {}, {}});
  m.create(std::nullopt, 1ull);
  m.create(std::nullopt, 2ull);
  CHECK(m.sweep() == 0);
  CHECK(m.sweep(SessionManager::Clock::now() + std::chrono::seconds(1)) == 2);
  CHECK(m.size() == 0);
}

TEST_CASE("turn response carries the scoring trace") {
  const auto& e = testing::shared_engine();
  auto s = e.open_session("trace", "trace-user", 1);
  auto r = e.process_turn(s, AsrInput::from_text("what's your favorite color?"));
  auto j = turn_response_json(r);
  CHECK(j["origin_module"] == "opinions");
  CHECK(j["reply"] == r.reply);
  REQUIRE(j["trace"].is_array());
  CHECK(j["trace"].size() == r.trace.size());
  CHECK(j["trace"][0].contains("final"));
}

TEST_CASE("http api") {
  const auto& e = testing::shared_engine();
  auto ui = testing::temp_dir("ui");
  std::ofstream(ui / "index.html") << "<html>chat</html>";
  SessionManager m(e);
  HttpService http(m, HttpOptions{"127.0.0.1", 0, ui});
  int port = http.start();
  REQUIRE(port > 0);
  httplib::Client cli("127.0.0.1", port);

  auto health = cli.Get("/v1/health");
  REQUIRE(health);
  CHECK(health->status == 200);

  auto created = cli.Post("/v1/sessions", R"({"user_id": "web", "seed": 3})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  auto id = json::parse(created->body)["session_id"].get<std::string>();

  auto turn = cli.Post("/v1/sessions/" + id + "/turns", R"({"text": "tell me a story"})",
                       "application/json");
  REQUIRE(turn);
  CHECK(turn->status == 200);
  auto body = json::parse(turn->body);
  CHECK(body["origin_module"] == "storytelling");
  CHECK(body["turn"] == 1);

  auto nbest = cli.Post("/v1/sessions/" + id + "/turns",
                        R"({"hypotheses": [{"text": "yes", "score": 0.9}]})", "application/json");
  REQUIRE(nbest);
  CHECK(nbest->status == 200);

  CHECK(cli.Post("/v1/sessions/" + id + "/turns", "{}", "application/json")->status == 400);
  CHECK(cli.Post("/v1/sessions/" + id + "/turns", "not json", "application/json")->status ==
        400);
  CHECK(cli.Post("/v1/sessions", R"({"seed": "x"})", "application/json")->status == 400);
  CHECK(cli.Post("/v1/sessions/zzz/turns", R"({"text": "hi"})", "application/json")->status ==
        404);

  auto summary = cli.Get("/v1/sessions/" + id);
  REQUIRE(summary);
  CHECK(json::parse(summary->body)["turn_count"] == 2);
  CHECK(cli.Delete("/v1/sessions/" + id)->status == 200);
  CHECK(cli.Get("/v1/sessions/" + id)->status == 404);

  auto page = cli.Get("/index.html");
  REQUIRE(page);
  CHECK(page->body == "<html>chat</html>");
  http.stop();
}
