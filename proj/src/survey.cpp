#include <algorithm>

#include "socialbot/activities.hpp"
#include "socialbot/activity_base.hpp"
#include "socialbot/text.hpp"

namespace socialbot {

namespace {

using namespace detail;

constexpr int kMaxReasks = 2;

class SurveyModule : public DialogueModule {
 public:
  std::string id() const override { return kSurvey; }
  bool system_initiative() const override { return true; }
  std::vector<MenuTopic> menu_topics() const override { return {{kSurvey, "a personality quiz"}}; }

  std::optional<ResponseCandidate> start(const TurnContext& ctx,
                                         std::string_view arg) const override {
    const auto& surveys = ctx.resources.surveys;
    if (surveys.empty()) return std::nullopt;
    const Survey* s = arg.empty() ? nullptr : ctx.resources.survey(arg);
    if (!s) {
      for (const auto& x : surveys) {
        if (!ctx.session.used_facts.count("survey:" + x.id)) {
          s = &x;
          break;
        }
      }
    }
    if (!s) s = &surveys.front();
    nlohmann::json d = {{"survey", s->id}, {"q", 0}, {"reasks", 0},
                        {"tally", nlohmann::json::object()}, {"answers", nlohmann::json::array()}};
    auto c = activity_turn(id(), "Okay, let's find out " + s->title + ". " + s->questions[0].text,
                           kContinue, d, {"survey:option"});
    c.id = "survey:" + s->id + ":start";
    c.postconditions.push_back(RecordFact{"survey:" + s->id});
    return c;
  }

  std::vector<ResponseCandidate> propose(const TurnContext& ctx) const override {
    const auto& a = ctx.analysis;
    const auto* state = ctx.activity(id());
    if (!state) {
      for (const auto& s : ctx.resources.surveys) {
        if (has_any_phrase(a, s.triggers)) {
          if (auto c = start(ctx, s.id)) return {*c};
        }
      }
      if (has_any_phrase(a, {"survey", "quiz", "personality test"})) {
        if (auto c = start(ctx, "")) return {*c};
      }
      return {};
    }
    const Survey* s = ctx.resources.survey(state->data.at("survey").get<std::string>());
    if (!s) return {};
    auto data = state->data;
    std::size_t q = data.at("q").get<std::size_t>();
    const auto& question = s->questions.at(q);
    auto choice = parse_survey_option(a, question);

    std::string lead;
    if (choice) {
      for (const auto& [cat, w] : question.options[*choice].weights) {
        data["tally"][cat] = data["tally"].value(cat, 0) + w;
      }
      data["answers"].push_back(*choice);
      lead = "Okay. ";
    } else if (data.at("reasks").get<int>() < kMaxReasks) {
      if (a.dialogue_act == DialogueAct::Question || a.content_words.size() > 6) {
        return {reroute(id(), question.text, data, {"survey:option"})};
      }
      data["reasks"] = data.at("reasks").get<int>() + 1;
      return {activity_turn(id(), "Sorry, I didn't catch which one you picked. " + question.text,
                            kContinue, data, {"survey:option"})};
    } else {
      data["answers"].push_back(nullptr);
      lead = "Let's skip that one. ";
    }
    data["reasks"] = 0;
    data["q"] = q + 1;
    if (q + 1 >= s->questions.size()) {
      std::map<std::string, int> tally;
      for (const auto& [cat, v] : data["tally"].items()) tally[cat] = v.get<int>();
      auto winner = survey_result(*s, tally);
      std::string text = lead + "You got " + winner + "!";
      if (auto it = s->results.find(winner); it != s->results.end()) text += " " + it->second;
      auto c = activity_end(id(), text, kContinue, kSurvey);
      c.id = "survey:" + s->id + ":result";
      return {c};
    }
    auto c = activity_turn(id(), lead + s->questions[q + 1].text, kContinue, data,
                           {"survey:option"});
    c.id = "survey:" + s->id + ":" + std::to_string(q + 1);
    return {c};
  }
};

}  // namespace

std::optional<std::size_t> parse_survey_option(const UtteranceAnalysis& analysis,
                                               const SurveyQuestion& question) {
  const auto& toks = analysis.tokens;
  auto contains = [&](const std::string& w) {
    return std::find(toks.begin(), toks.end(), w) != toks.end();
  };
  std::size_t best = 0;
  std::size_t best_hits = 0;
  bool tie = false;
  for (std::size_t i = 0; i < question.options.size(); ++i) {
    std::size_t hits = 0;
    for (const auto& k : question.options[i].keywords) hits += contains(k) ? 1 : 0;
    if (hits > best_hits) {
      best = i;
      best_hits = hits;
      tie = false;
    } else if (hits > 0 && hits == best_hits) {
      tie = true;
    }
  }
  if (best_hits > 0 && !tie) return best;

  for (std::size_t i = 0; i < question.options.size(); ++i) {
    auto label = tokenize(question.options[i].label);
    if (!label.empty() && std::search(toks.begin(), toks.end(), label.begin(), label.end()) !=
                              toks.end()) {
      return i;
    }
  }
  if (auto ord = detail::ordinal_in(toks)) {
    if (*ord == 99) return question.options.size() - 1;
    if (*ord < question.options.size()) return *ord;
  }
  auto nums = detail::numbers_in(toks);
  if (nums.size() == 1 && nums[0] >= 1 &&
      static_cast<std::size_t>(nums[0]) <= question.options.size()) {
    return static_cast<std::size_t>(nums[0] - 1);
  }
  return std::nullopt;
}

std::string survey_result(const Survey& survey, const std::map<std::string, int>& tally) {
  std::string best;
  int best_score = 0;
  for (const auto& cat : survey.categories) {
    auto it = tally.find(cat);
    int v = it == tally.end() ? 0 : it->second;
    if (best.empty() || v > best_score) {
      best = cat;
      best_score = v;
    }
  }
  return best;
}

std::unique_ptr<DialogueModule> make_survey_module() { return std::make_unique<SurveyModule>(); }

}  // namespace socialbot
