#include <doctest.h>

#include <cmath>
#include <sstream>

#include "common.hpp"
#include "socialbot/errors.hpp"
#include "socialbot/retrieval.hpp"

using namespace socialbot;

TEST_CASE("idf is non-negative") {
  CHECK(Bm25Index::idf(10, 1) == doctest::Approx(std::log(1.0 + 9.5 / 1.5)));
  CHECK(Bm25Index::idf(10, 10) > 0.0);
}

TEST_CASE("index rejects bad documents") {
  Bm25Index index;
  index.add({"a", "i like dogs", "Dogs are great.", "pets"});
  CHECK_THROWS_AS(index.add({"a", "again", "x", "pets"}), InputError);
  CHECK_THROWS_AS(index.add({"b", "", "x", "pets"}), InputError);
}

TEST_CASE("search ranks, filters by topic and truncates") {
  Bm25Index index;
  index.add({"a", "dogs dogs cats", "r1", "pets"});
  index.add({"b", "dogs", "r2", "pets"});
  index.add({"c", "pizza", "r3", "food"});
  std::vector<std::string> q = {"dogs"};
  auto hits = index.search(q, std::nullopt, 10);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].score >= hits[1].score);
  CHECK(index.search(q, std::string("food"), 10).empty());
  CHECK(index.search(q, std::nullopt, 1).size() == 1);
  std::vector<std::string> none = {"zebra"};
  CHECK(index.search(none, std::nullopt, 10).empty());
}

TEST_CASE("retrieval confidence: best hit at the cap, others scaled") {
  const auto& e = testing::shared_engine();
  auto a = e.analyzer().analyze_text("i like to read mystery novels");
  auto cands = retrieve_response(e.resources().corpus, a, std::nullopt, 3, 0.7);
  REQUIRE(!cands.empty());
  CHECK(cands.front().base_confidence == doctest::Approx(0.7));
  for (const auto& c : cands) CHECK(c.base_confidence <= 0.7);
}

TEST_CASE("turn documents parse from JSON lines") {
  std::istringstream in(R"({"stimulus": "hi", "response": "hello", "topic": "greeting"}
{"id": "x2", "stimulus": "bye", "response": "see you", "topic": "greeting"}
)");
  auto docs = parse_turn_documents(in);
  REQUIRE(docs.size() == 2);
  CHECK(docs[1].id == "x2");
  std::istringstream bad("{\"stimulus\": 3}\n");
  CHECK_THROWS_AS(parse_turn_documents(bad), InputError);
}
