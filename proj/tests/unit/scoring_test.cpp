#include <doctest.h>

#include "common.hpp"
#include "socialbot/scoring.hpp"

using namespace socialbot;

TEST_CASE("jaccard") {
  CHECK(jaccard({}, {}) == 0.0);
  CHECK(jaccard({"a", "b"}, {"b", "c"}) == doctest::Approx(1.0 / 3.0));
  CHECK(jaccard({"a"}, {"a"}) == 1.0);
}

TEST_CASE("updated confidence is clamped to [0, 1]") {
  CHECK(updated_confidence(0.9, 1.0, 0.0) == 1.0);
  CHECK(updated_confidence(0.1, 0.0, 0.5) == 0.0);
  CHECK(updated_confidence(0.6, 0.8, 0.1) == doctest::Approx(0.7));
}

TEST_CASE("context score shares entities and content words") {
  const auto& e = testing::shared_engine();
  auto a = e.analyzer().analyze_text("what is the population of mexico city");
  std::set<std::string> used;
  ScoringContext ctx{a, std::nullopt, used, e.resources().lexicons, {}};
  auto hit = ResponseCandidate::make("qa", "The population of Mexico City is 8.8 million.", 0.9);
  auto miss = ResponseCandidate::make("qa", "I like pizza.", 0.9);
  CHECK(context_score(hit, ctx) > 0.5);
  CHECK(context_score(miss, ctx) == 0.0);
}

TEST_CASE("sentence length penalty only for listed origins") {
  const auto& e = testing::shared_engine();
  auto a = e.analyzer().analyze_text("hello");
  std::set<std::string> used;
  ScoringContext ctx{a, std::nullopt, used, e.resources().lexicons, {}};
  std::string longtext;
  for (int i = 0; i < 40; ++i) longtext += "word ";
  auto r = ResponseCandidate::make("retrieval", longtext, 0.7);
  auto o = ResponseCandidate::make("storytelling", longtext, 0.7);
  CHECK(loss(r, ctx).sent_len > 0.0);
  CHECK(loss(r, ctx).sent_len <= ctx.config.sent_len_cap);
  CHECK(loss(o, ctx).sent_len == 0.0);
}

TEST_CASE("explicit content is filtered before selection") {
  const auto& e = testing::shared_engine();
  const auto& lex = e.resources().lexicons;
  auto a = e.analyzer().analyze_text("hello");
  std::set<std::string> used;
  ScoringContext ctx{a, std::nullopt, used, lex, {}};
  REQUIRE(!lex.explicit_terms.empty());
  std::string bad = *lex.explicit_terms.begin();
  auto dirty = ResponseCandidate::make("retrieval", "well " + bad + " that", 1.0);
  dirty.id = "dirty";
  auto clean = ResponseCandidate::make("retrieval", "Nice to meet you.", 0.2);
  clean.id = "clean";
  CHECK_FALSE(content_filter(dirty, lex));
  CHECK(content_filter(clean, lex));
  std::vector<ResponseCandidate> pool = {dirty, clean};
  Rng rng(1);
  auto sel = select_response(pool, ctx, rng);
  CHECK(sel.winner.id == "clean");
  CHECK(sel.trace.front().filtered);

  std::vector<ResponseCandidate> only_dirty = {dirty};
  CHECK_THROWS_AS(select_response(only_dirty, ctx, rng), StateError);
}
