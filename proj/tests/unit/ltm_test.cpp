#include <doctest.h>

#include <fstream>

#include "common.hpp"
#include "socialbot/errors.hpp"
#include "socialbot/ltm.hpp"

using namespace socialbot;
using nlohmann::json;

TEST_CASE("put and get round trip") {
  auto dir = testing::temp_dir("ltm-roundtrip");
  LtmStore store(dir);
  store.register_namespace("notes");
  store.put({"notes", "b", json{{"z", 1}, {"a", {1, 2}}}, ""});
  store.put({"notes", "a", json{{"x", "y"}}, "2026-01-01T00:00:00Z"});
  auto rec = store.get("notes", "b");
  REQUIRE(rec);
  CHECK(rec->payload["z"] == 1);
  CHECK(!rec->updated_at.empty());
  CHECK(store.get("notes", "a")->updated_at == "2026-01-01T00:00:00Z");
  CHECK_FALSE(store.get("notes", "missing"));
  CHECK(store.keys("notes") == std::vector<std::string>{"a", "b"});
  auto all = store.load_all("notes");
  REQUIRE(all.size() == 2);
  CHECK(all[0].key == "a");
  CHECK(store.stats().writes == 2);
}

TEST_CASE("documents are canonical: sorted keys, stable bytes") {
  auto dir = testing::temp_dir("ltm-canonical");
  LtmStore store(dir);
  store.register_namespace("notes");
  store.put({"notes", "k", json{{"b", 2}, {"a", 1}}, "2026-01-01T00:00:00Z"});
  std::ifstream in(dir / "notes" / "k.doc");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == LtmStore::canonical(json::parse(text)));
  CHECK(text.find("\"key\"") < text.find("\"namespace\""));
  CHECK(text.find("\"namespace\"") < text.find("\"payload\""));
}

TEST_CASE("invalid keys and unregistered namespaces are rejected") {
  auto dir = testing::temp_dir("ltm-errors");
  LtmStore store(dir);
  store.register_namespace("notes");
  CHECK_THROWS_AS(store.put({"notes", "../escape", json{}, ""}), InputError);
  CHECK_THROWS_AS(store.put({"notes", "", json{}, ""}), InputError);
  CHECK_THROWS_AS(store.get("other", "k"), StateError);
  CHECK_THROWS_AS(store.register_namespace("bad/ns"), ConfigError);
  CHECK(LtmStore::valid_key("user-1.v2"));
  CHECK_FALSE(LtmStore::valid_key(".hidden"));
}

TEST_CASE("corrupt documents are reported") {
  auto dir = testing::temp_dir("ltm-corrupt");
  LtmStore store(dir);
  store.register_namespace("notes");
  std::filesystem::create_directories(dir / "notes");
  std::ofstream(dir / "notes" / "bad.doc") << "{ not json";
  CHECK_THROWS_AS(store.get("notes", "bad"), ConfigError);
}

TEST_CASE("leftover temp files are ignored") {
  auto dir = testing::temp_dir("ltm-temp");
  LtmStore store(dir);
  store.register_namespace("notes");
  store.put({"notes", "ok", json{{"v", 1}}, ""});
  std::ofstream(dir / "notes" / "ok.doc.tmp.1.2.3") << "{ half";
  CHECK(store.keys("notes") == std::vector<std::string>{"ok"});
}

TEST_CASE("session end writes summary and profile; reopen restores the profile") {
  auto dir = testing::temp_dir("ltm-session");
  EngineConfig cfg;
  cfg.ltm_dir = dir;
  Engine engine(cfg);
  auto s = engine.open_session("sess-1", "user-7", 3);
  auto r = engine.process_turn(s, AsrInput::from_text("call me robin"));
  s = r.new_state;
  engine.end_session(s);
  CHECK(s.closed);
  auto writes = engine.ltm()->stats().writes;
  engine.end_session(s);  // second call does nothing
  CHECK(engine.ltm()->stats().writes == writes);
  CHECK(engine.ltm()->get("session_summaries", "sess-1"));
  auto again = engine.open_session("sess-2", "user-7", 9);
  CHECK(again.user_name == std::optional<std::string>("Robin"));
}
