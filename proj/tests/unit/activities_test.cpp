#include <doctest.h>

#include <sstream>

#include "common.hpp"
#include "socialbot/activities.hpp"
#include "socialbot/errors.hpp"
#include "socialbot/realization.hpp"
#include "socialbot/repl.hpp"

using namespace socialbot;

TEST_CASE("nim: move to a zero xor when possible") {
  auto m = nim_move({3, 4, 5});
  CHECK(m == NimMove{0, 2});  // 1 ^ 4 ^ 5 == 0
  auto lose = nim_move({1, 1});
  CHECK(lose.take == 1);
  CHECK_THROWS_AS(nim_move({0, 0}), StateError);
}

TEST_CASE("city letters") {
  CHECK(city_last_letter("Boston") == 'n');
  CHECK(city_first_letter("New York") == 'n');
  std::vector<std::string> cities = {"Nairobi", "Naples", "Oslo"};
  CHECK(city_reply("Boston", {}, cities) == std::optional<std::string>("Nairobi"));
  CHECK(city_reply("Boston", {"nairobi"}, cities) == std::optional<std::string>("Naples"));
  CHECK_FALSE(city_reply("Paris", {}, cities));
}

TEST_CASE("answer checking allows small typos on longer words") {
  CHECK(answer_allowance(4) == 0);
  CHECK(answer_allowance(7) == 1);
  CHECK(answer_allowance(12) == 2);
  CHECK(check_answer("I think it's Jupiter", "Jupiter"));
  CHECK(check_answer("jupitor", "Jupiter"));
  CHECK_FALSE(check_answer("saturn", "Jupiter"));
  CHECK(check_answer("the mona lisa", "Mona Lisa"));
}

TEST_CASE("story windows") {
  std::vector<std::string> s = {"One.", "Two.", "Three.", "Four.", "Five."};
  auto w = story_windows(s);
  std::size_t total = 0;
  for (auto n : w) total += n;
  CHECK(total == s.size());
  CHECK(w.front() == 2);
}

TEST_CASE("hypothesis lists") {
  auto in = parse_hypotheses("tell me a story|0.9 ; tell me a glory|0.2");
  REQUIRE(in.hypotheses.size() == 2);
  CHECK(in.hypotheses[1].text == "tell me a glory");
  CHECK(in.hypotheses[1].score == doctest::Approx(0.2));
  CHECK(parse_hypotheses("hello").hypotheses.front().score == 1.0);
  CHECK_THROWS_AS(parse_hypotheses("x|abc"), InputError);
  CHECK_THROWS_AS(parse_hypotheses(" ; "), InputError);
}

TEST_CASE("openers vary within their class") {
  const auto& lex = testing::shared_engine().resources().lexicons;
  Rng rng(3);
  std::vector<std::string> recent = {"Okay, let's play."};
  CHECK(vary_opener("Okay, let's play.", recent, lex, rng) == "Alright, let's play.");
  std::vector<std::string> none;
  CHECK(vary_opener("Okay, let's play.", none, lex, rng) == "Okay, let's play.");
  auto m = leading_opener("Interesting, tell me more.", lex);
  REQUIRE(m);
  CHECK(m->cls == "ack");
}

TEST_CASE("speech markup keeps pauses only") {
  auto r = render_output("Hello.<break time=\"500ms\"/> <b>World</b>");
  CHECK(r.plain == "Hello. World");
  CHECK(r.marked.find("<break time=\"500ms\"/>") != std::string::npos);
  CHECK(r.marked.find("<b>") == std::string::npos);
}

TEST_CASE("repl commands") {
  const auto& e = testing::shared_engine();
  std::istringstream in("/seed 4\n/trace\nhello\n/state\n/bogus\n/quit\nnever read\n");
  std::ostringstream out;
  ReplOptions opt;
  opt.echo = true;
  int turns = run_repl(e, in, out, opt);
  CHECK(turns == 1);
  auto text = out.str();
  CHECK(text.find("(new session, seed 4)") != std::string::npos);
  CHECK(text.find("USER: hello") != std::string::npos);
  CHECK(text.find("\"turn_count\": 1") != std::string::npos);
  CHECK(text.find("unknown command /bogus") != std::string::npos);
  CHECK(text.find("never read") == std::string::npos);
}
