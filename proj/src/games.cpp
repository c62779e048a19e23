#include <algorithm>
#include <cctype>

#include "socialbot/activities.hpp"
#include "socialbot/activity_base.hpp"
#include "socialbot/errors.hpp"
#include "socialbot/mixed.hpp"
#include "socialbot/text.hpp"

namespace socialbot {

namespace {

using namespace detail;

const std::vector<int> kDefaultPiles = {3, 4, 5};

std::string piles_text(const std::vector<int>& piles) {
  std::vector<std::string> parts;
  for (int p : piles) parts.push_back(std::to_string(p));
  return join_list(parts);
}

std::string upper(char c) { return std::string(1, static_cast<char>(std::toupper(c))); }

// --- Nim ------------------------------------------------------------------

struct ParsedMove {
  std::optional<std::size_t> pile;
  std::optional<int> take;
  bool take_all = false;
};

ParsedMove parse_nim(const std::vector<std::string>& toks) {
  static const std::set<std::string> kPileWords = {"pile", "row", "heap", "stack"};
  ParsedMove m;
  std::vector<int> loose;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    auto one = numbers_in({toks[i]});
    if (kPileWords.count(toks[i]) && i + 1 < toks.size()) {
      auto n = numbers_in({toks[i + 1]});
      if (!n.empty() && !m.pile) {
        m.pile = static_cast<std::size_t>(std::max(0, n[0] - 1));
        ++i;
        continue;
      }
    }
    if (auto ord = ordinal_in({toks[i]})) {
      if (!m.pile && i + 1 < toks.size() && kPileWords.count(toks[i + 1])) {
        m.pile = *ord;
        continue;
      }
    }
    if (toks[i] == "all" || toks[i] == "everything") m.take_all = true;
    if (!one.empty()) loose.push_back(one[0]);
  }
  if (!loose.empty()) m.take = loose.front();
  return m;
}

class NimModule : public DialogueModule {
 public:
  std::string id() const override { return kNim; }
  bool system_initiative() const override { return true; }
  std::vector<MenuTopic> menu_topics() const override { return {{kNim, "nim"}}; }

  std::optional<ResponseCandidate> start(const TurnContext&, std::string_view) const override {
    nlohmann::json d = {{"piles", kDefaultPiles}};
    auto c = activity_turn(id(),
                           "Let's play Nim. There are three piles with " +
                               piles_text(kDefaultPiles) +
                               " stones. On your turn, take as many stones as you like from one "
                               "pile. Whoever takes the last stone wins. You go first: which "
                               "pile, and how many?",
                           kContinue, d, {"nim:move"});
    c.id = "nim:start";
    return c;
  }

  std::vector<ResponseCandidate> propose(const TurnContext& ctx) const override {
    const auto& a = ctx.analysis;
    const auto* state = ctx.activity(id());
    if (!state) {
      if (has_token(a, "nim")) return {*start(ctx, "")};
      return {};
    }
    auto piles = state->data.at("piles").get<std::vector<int>>();
    if (is_decline(a) && a.dialogue_act == DialogueAct::NoAnswer) {
      return {activity_end(id(), "Okay, we can finish the game another time.", kContinue, kNim)};
    }
    auto mv = parse_nim(a.tokens);
    if (!mv.pile) {
      std::size_t nonempty = 0;
      for (std::size_t i = 0; i < piles.size(); ++i) {
        if (piles[i] > 0) {
          ++nonempty;
          mv.pile = i;
        }
      }
      if (nonempty != 1) mv.pile.reset();
    }
    if (mv.take_all && mv.pile && *mv.pile < piles.size()) mv.take = piles[*mv.pile];
    if (!mv.pile || !mv.take) {
      if (a.dialogue_act == DialogueAct::Question || a.content_words.size() > 4) {
        return {reroute(id(), "the piles are " + piles_text(piles) + ". Which pile, and how many?",
                        state->data, {"nim:move"})};
      }
      return {activity_turn(id(),
                            "Tell me a pile and how many stones, like two from pile one. The "
                            "piles are " +
                                piles_text(piles) + ".",
                            kContinue, state->data, {"nim:move"})};
    }
    std::size_t p = *mv.pile;
    int take = *mv.take;
    if (p >= piles.size() || take < 1 || take > piles[p]) {
      return {activity_turn(id(),
                            "That move doesn't work. The piles are " + piles_text(piles) +
                                ". Which pile, and how many?",
                            kContinue, state->data, {"nim:move"})};
    }
    piles[p] -= take;
    auto total = [](const std::vector<int>& v) {
      int s = 0;
      for (int x : v) s += x;
      return s;
    };
    if (total(piles) == 0) {
      return {activity_end(id(), "You took the last stone. You win! Nice job.", kContinue, kNim)};
    }
    auto reply = nim_move(piles);
    piles[reply.pile] -= reply.take;
    std::string mine = "I'll take " + std::to_string(reply.take) + " from pile " +
                       std::to_string(reply.pile + 1) + ".";
    if (total(piles) == 0) {
      return {activity_end(id(), mine + " That was the last stone, so I win! Good game.",
                           kContinue, kNim)};
    }
    nlohmann::json d = {{"piles", piles}};
    return {activity_turn(id(), mine + " The piles are now " + piles_text(piles) + ". Your move.",
                          kContinue, d, {"nim:move"})};
  }
};

// --- City names -----------------------------------------------------------

std::optional<std::string> find_city(const std::vector<std::string>& toks,
                                     const std::vector<std::string>& cities) {
  std::optional<std::string> best;
  std::size_t best_len = 0;
  for (const auto& c : cities) {
    auto ct = tokenize(c);
    if (ct.empty() || ct.size() <= best_len) continue;
    if (std::search(toks.begin(), toks.end(), ct.begin(), ct.end()) != toks.end()) {
      best = c;
      best_len = ct.size();
    }
  }
  return best;
}

class CityNamesModule : public DialogueModule {
 public:
  std::string id() const override { return kCityNames; }
  bool system_initiative() const override { return true; }
  std::vector<MenuTopic> menu_topics() const override {
    return {{kCityNames, "the city name game"}};
  }

  std::optional<ResponseCandidate> start(const TurnContext& ctx,
                                         std::string_view) const override {
    const auto& cities = ctx.resources.cities;
    if (cities.empty()) return std::nullopt;
    auto rng = ctx.rng_for(id());
    std::uniform_int_distribution<std::size_t> pick(0, cities.size() - 1);
    const auto& first = cities[pick(rng)];
    nlohmann::json d = {{"last", first}, {"used", {fold(first)}}};
    auto c = activity_turn(id(),
                           "Let's play the city name game. I name a city, then you name one that "
                           "starts with the last letter of mine. I'll start with " +
                               first + ". Your turn: a city starting with " +
                               upper(city_last_letter(first)) + ".",
                           kContinue, d, {"city_names:city"});
    c.id = "city_names:start";
    return c;
  }

  std::vector<ResponseCandidate> propose(const TurnContext& ctx) const override {
    const auto& a = ctx.analysis;
    const auto* state = ctx.activity(id());
    if (!state) {
      if (has_any_phrase(a, {"city name", "city names", "city game", "name game"})) {
        if (auto c = start(ctx, "")) return {*c};
      }
      return {};
    }
    const auto& cities = ctx.resources.cities;
    std::string last = state->data.at("last").get<std::string>();
    std::set<std::string> used;
    for (const auto& u : state->data.at("used")) used.insert(u.get<std::string>());
    std::string need = upper(city_last_letter(last));

    auto city = find_city(a.tokens, cities);
    if (!city) {
      if (a.dialogue_act == DialogueAct::NoAnswer || has_any_phrase(a, {"i give up", "give up"})) {
        return {activity_end(id(), "Okay, I win this round! That was fun.", kContinue,
                             kCityNames)};
      }
      if (a.dialogue_act == DialogueAct::Question || a.content_words.size() > 3) {
        return {reroute(id(), "can you name a city starting with " + need + "?", state->data,
                        {"city_names:city"})};
      }
      return {activity_turn(id(),
                            "I don't know that city. Can you name another city starting with " +
                                need + "?",
                            kContinue, state->data, {"city_names:city"})};
    }
    if (used.count(fold(*city))) {
      return {activity_turn(id(),
                            "We already said that one. Try another city starting with " + need +
                                ".",
                            kContinue, state->data, {"city_names:city"})};
    }
    if (city_first_letter(*city) != city_last_letter(last)) {
      return {activity_turn(id(),
                            *city + " doesn't start with " + need +
                                ". Try a city starting with " + need + ".",
                            kContinue, state->data, {"city_names:city"})};
    }
    used.insert(fold(*city));
    auto reply = city_reply(*city, used, cities);
    if (!reply) {
      return {activity_end(id(),
                           "You got me! I can't think of a city starting with " +
                               upper(city_last_letter(*city)) + ". You win!",
                           kContinue, kCityNames)};
    }
    used.insert(fold(*reply));
    nlohmann::json d = {{"last", *reply}, {"used", used}};
    return {activity_turn(id(),
                          *reply + ". Your turn: a city starting with " +
                              upper(city_last_letter(*reply)) + ".",
                          kContinue, d, {"city_names:city"})};
  }
};

// --- Jeopardy -------------------------------------------------------------

constexpr std::size_t kJeopardyRound = 5;

class JeopardyModule : public DialogueModule {
 public:
  std::string id() const override { return kJeopardy; }
  bool system_initiative() const override { return true; }
  std::vector<MenuTopic> menu_topics() const override { return {{kJeopardy, "jeopardy"}}; }

  std::optional<ResponseCandidate> start(const TurnContext& ctx,
                                         std::string_view) const override {
    auto q = pick(ctx, {});
    if (!q) return std::nullopt;
    nlohmann::json d = {{"current", q->id}, {"asked", {q->id}}, {"score", 0}};
    auto c = activity_turn(id(),
                           "Let's play Jeopardy! I'll read a clue and you give the answer. " +
                               clue(*q),
                           kContinue, d, {"jeopardy:answer"});
    c.id = "jeopardy:" + q->id;
    c.postconditions.push_back(RecordFact{"jeopardy:" + q->id});
    return c;
  }

  std::vector<ResponseCandidate> propose(const TurnContext& ctx) const override {
    const auto& a = ctx.analysis;
    const auto* state = ctx.activity(id());
    if (!state) {
      if (has_any_phrase(a, {"jeopardy", "quiz me", "trivia game", "play trivia"})) {
        if (auto c = start(ctx, "")) return {*c};
      }
      return {};
    }
    const auto& trivia = ctx.resources.trivia;
    std::string cur = state->data.at("current").get<std::string>();
    auto it = std::find_if(trivia.begin(), trivia.end(), [&](const auto& t) { return t.id == cur; });
    if (it == trivia.end()) return {};
    auto asked = state->data.at("asked").get<std::vector<std::string>>();
    int score = state->data.at("score").get<int>();

    std::string text;
    if (check_answer(a.primary_text, it->answer)) {
      ++score;
      text = "Correct!";
    } else {
      text = "Not quite. The answer was " + it->answer + ".";
    }
    std::set<std::string> seen(asked.begin(), asked.end());
    auto next = asked.size() < kJeopardyRound ? pick(ctx, seen) : std::nullopt;
    if (!next) {
      text += " That's the end of the round. You got " + std::to_string(score) + " out of " +
              std::to_string(asked.size()) + ".";
      return {activity_end(id(), text, kContinue, kJeopardy)};
    }
    asked.push_back(next->id);
    nlohmann::json d = {{"current", next->id}, {"asked", asked}, {"score", score}};
    auto c = activity_turn(id(), text + " Next clue. " + clue(*next), kContinue, d,
                           {"jeopardy:answer"});
    c.postconditions.push_back(RecordFact{"jeopardy:" + next->id});
    return {c};
  }

 private:
  static std::string clue(const TriviaQuestion& q) { return "In " + q.category + ": " + q.question; }

  static std::optional<TriviaQuestion> pick(const TurnContext& ctx,
                                            const std::set<std::string>& asked) {
    for (const auto& t : ctx.resources.trivia) {
      if (asked.count(t.id) || ctx.session.used_facts.count("jeopardy:" + t.id)) continue;
      return t;
    }
    return std::nullopt;
  }
};

// --- Fast Money -----------------------------------------------------------

constexpr std::size_t kFastMoneyPrompts = 5;

class FastMoneyModule : public DialogueModule {
 public:
  std::string id() const override { return kFastMoney; }
  bool system_initiative() const override { return true; }
  std::vector<MenuTopic> menu_topics() const override { return {{kFastMoney, "fast money"}}; }

  std::optional<ResponseCandidate> start(const TurnContext& ctx,
                                         std::string_view) const override {
    const auto& prompts = ctx.resources.fast_money;
    if (prompts.empty()) return std::nullopt;
    nlohmann::json d = {{"index", 0}, {"points", 0}};
    auto c = activity_turn(id(),
                           "Let's play Fast Money! We asked a hundred people. " +
                               prompts[0].prompt,
                           kContinue, d, {"fast_money:answer"});
    c.id = "fast_money:start";
    return c;
  }

  std::vector<ResponseCandidate> propose(const TurnContext& ctx) const override {
    const auto& a = ctx.analysis;
    const auto* state = ctx.activity(id());
    if (!state) {
      if (has_any_phrase(a, {"fast money", "family feud"})) {
        if (auto c = start(ctx, "")) return {*c};
      }
      return {};
    }
    const auto& prompts = ctx.resources.fast_money;
    auto index = state->data.at("index").get<std::size_t>();
    int points = state->data.at("points").get<int>();
    if (index >= prompts.size()) return {};
    const auto& p = prompts[index];

    std::string text;
    auto hit = std::find_if(p.answers.begin(), p.answers.end(),
                            [&](const auto& ans) { return check_answer(a.primary_text, ans.text); });
    if (hit != p.answers.end()) {
      points += hit->points;
      text = "Good answer! " + capitalize(hit->text) + " was worth " +
             std::to_string(hit->points) + " points.";
    } else {
      text = "Sorry, that's not on the board. The top answer was " + p.answers.front().text + ".";
    }
    std::size_t limit = std::min(kFastMoneyPrompts, prompts.size());
    if (index + 1 >= limit) {
      text += " That's the end of Fast Money. You finished with " + std::to_string(points) +
              " points!";
      return {activity_end(id(), text, kContinue, kFastMoney)};
    }
    text += " You have " + std::to_string(points) + " points. " + prompts[index + 1].prompt;
    nlohmann::json d = {{"index", index + 1}, {"points", points}};
    return {activity_turn(id(), text, kContinue, d, {"fast_money:answer"})};
  }
};

// --- Text adventure -------------------------------------------------------

constexpr int kAdventureSteps = 4;

class TextAdventureModule : public DialogueModule {
 public:
  std::string id() const override { return kTextAdventure; }
  bool system_initiative() const override { return true; }
  std::vector<MenuTopic> menu_topics() const override {
    return {{kTextAdventure, "a text adventure"}};
  }

  std::optional<ResponseCandidate> start(const TurnContext& ctx,
                                         std::string_view arg) const override {
    const auto& advs = ctx.resources.adventures;
    if (advs.empty()) return std::nullopt;
    const Adventure* adv = nullptr;
    for (const auto& x : advs) {
      if (x.id == arg) adv = &x;
    }
    if (!adv) {
      for (const auto& x : advs) {
        if (!ctx.session.used_facts.count("adventure:" + x.id)) {
          adv = &x;
          break;
        }
      }
    }
    if (!adv) adv = &advs.front();
    nlohmann::json d = {{"adventure", adv->id}, {"step", 0},
                        {"story", nlohmann::json::array({adv->opening})},
                        {"used_branches", nlohmann::json::array()}};
    auto c = activity_turn(id(),
                           "Let's write an adventure together. " + adv->opening +
                               " What do you do?",
                           kContinue, d, {"text_adventure:action"});
    c.id = "adventure:" + adv->id;
    c.postconditions.push_back(RecordFact{"adventure:" + adv->id});
    return c;
  }

  std::vector<ResponseCandidate> propose(const TurnContext& ctx) const override {
    const auto& a = ctx.analysis;
    const auto* state = ctx.activity(id());
    if (!state) {
      if (has_any_phrase(a, {"adventure", "text adventure", "adventure game"})) {
        if (auto c = start(ctx, "")) return {*c};
      }
      return {};
    }
    const auto& advs = ctx.resources.adventures;
    std::string aid = state->data.at("adventure").get<std::string>();
    auto it = std::find_if(advs.begin(), advs.end(), [&](const auto& x) { return x.id == aid; });
    if (it == advs.end()) return {};
    if (a.dialogue_act == DialogueAct::NoAnswer && a.content_words.empty()) {
      return {activity_end(id(), "Okay, we'll leave our hero there for now.", kContinue,
                           kTextAdventure)};
    }
    auto data = state->data;
    int step = data.at("step").get<int>();
    auto used = data.at("used_branches").get<std::vector<std::size_t>>();
    std::string continuation;
    for (std::size_t i = 0; i < it->branches.size() && continuation.empty(); ++i) {
      if (std::find(used.begin(), used.end(), i) != used.end()) continue;
      for (const auto& k : it->branches[i].keywords) {
        if (has_token(a, k)) {
          continuation = it->branches[i].continuation;
          used.push_back(i);
          break;
        }
      }
    }
    if (continuation.empty()) {
      continuation = it->fallbacks[static_cast<std::size_t>(step) % it->fallbacks.size()];
    }
    data["story"].push_back(a.primary_text);
    data["story"].push_back(continuation);
    data["used_branches"] = used;
    data["step"] = step + 1;
    if (step + 1 >= kAdventureSteps) {
      return {activity_end(id(),
                           continuation +
                               " And that's where our adventure ends. Thanks for writing it "
                               "with me!",
                           kContinue, kTextAdventure)};
    }
    return {activity_turn(id(), continuation + " What do you do next?", kContinue, data,
                          {"text_adventure:action"})};
  }
};

}  // namespace

NimMove nim_move(const std::vector<int>& piles) {
  int x = 0;
  bool any = false;
  for (int p : piles) {
    if (p < 0) throw InputError("negative pile");
    x ^= p;
    any = any || p > 0;
  }
  if (!any) throw StateError("every pile is empty");
  if (x != 0) {
    for (std::size_t i = 0; i < piles.size(); ++i) {
      int target = piles[i] ^ x;
      if (target < piles[i]) return {i, piles[i] - target};
    }
  }
  auto it = std::max_element(piles.begin(), piles.end());
  return {static_cast<std::size_t>(it - piles.begin()), 1};
}

char city_last_letter(std::string_view city) {
  auto f = fold(city);
  for (auto it = f.rbegin(); it != f.rend(); ++it) {
    if (*it >= 'a' && *it <= 'z') return *it;
  }
  return '\0';
}

char city_first_letter(std::string_view city) {
  for (char c : fold(city)) {
    if (c >= 'a' && c <= 'z') return c;
  }
  return '\0';
}

std::optional<std::string> city_reply(std::string_view last_city,
                                      const std::set<std::string>& used_folded,
                                      const std::vector<std::string>& cities) {
  char want = city_last_letter(last_city);
  for (const auto& c : cities) {
    if (city_first_letter(c) == want && !used_folded.count(fold(c))) return c;
  }
  return std::nullopt;
}

std::vector<std::string> answer_tokens(std::string_view text) {
  static const std::set<std::string> kArticles = {"the", "a", "an"};
  std::vector<std::string> out;
  for (auto& t : tokenize(text)) {
    std::erase(t, '\'');
    if (!t.empty() && !kArticles.count(t)) out.push_back(std::move(t));
  }
  return out;
}

std::size_t answer_allowance(std::size_t length) {
  if (length <= 5) return 0;
  if (length <= 9) return 1;
  return 2;
}

bool check_answer(std::string_view user_text, std::string_view gold) {
  auto g = answer_tokens(gold);
  auto u = answer_tokens(user_text);
  if (g.empty()) return false;
  for (const auto& gw : g) {
    std::size_t allow = answer_allowance(gw.size());
    bool ok = std::any_of(u.begin(), u.end(),
                          [&](const std::string& uw) { return levenshtein(gw, uw) <= allow; });
    if (!ok) return false;
  }
  return true;
}

std::vector<MenuTopic> game_menu_topics() {
  return {{kNim, "nim"},
          {kCityNames, "the city name game"},
          {kJeopardy, "jeopardy"},
          {kFastMoney, "fast money"},
          {kTextAdventure, "a text adventure"}};
}

std::unique_ptr<DialogueModule> make_nim_module() { return std::make_unique<NimModule>(); }
std::unique_ptr<DialogueModule> make_city_names_module() {
  return std::make_unique<CityNamesModule>();
}
std::unique_ptr<DialogueModule> make_jeopardy_module() {
  return std::make_unique<JeopardyModule>();
}
std::unique_ptr<DialogueModule> make_fast_money_module() {
  return std::make_unique<FastMoneyModule>();
}
std::unique_ptr<DialogueModule> make_text_adventure_module() {
  return std::make_unique<TextAdventureModule>();
}

}  // namespace socialbot
