#include <algorithm>

#include "socialbot/activities.hpp"
#include "socialbot/activity_base.hpp"
#include "socialbot/mixed.hpp"
#include "socialbot/text.hpp"

namespace socialbot {

namespace {

using namespace detail;

const std::vector<std::string> kLoopExpectations = {"loop:accept", "loop:decline"};

/// One item per turn from a topic until the user declines or it runs out.
class FactLoop : public DialogueModule {
 public:
  struct Style {
    std::string id;
    std::vector<std::string> leads;
    std::vector<std::string> prompts;
    std::vector<std::string> generic_triggers;
  };

  FactLoop(Style style, const std::vector<FactTopic>& topics) : style_(std::move(style)) {
    bind(topics);
  }

  std::string id() const override { return style_.id; }
  bool system_initiative() const override { return true; }

  std::vector<MenuTopic> menu_topics() const override { return menu_; }

  std::vector<std::string> start_args() const override { return args_; }

  std::optional<ResponseCandidate> start(const TurnContext& ctx,
                                         std::string_view arg) const override {
    const FactTopic* topic = find(arg);
    if (!topic) topic = first_fresh(ctx);
    if (!topic) return std::nullopt;
    return serve(ctx, *topic, 0);
  }

  std::vector<ResponseCandidate> propose(const TurnContext& ctx) const override {
    const auto& a = ctx.analysis;
    if (const auto* state = ctx.activity(id())) {
      const FactTopic* topic = find(state->data.at("topic").get<std::string>());
      if (!topic) return {};
      if (is_decline(a)) {
        return {activity_end(id(), "Okay. What else would you like to talk about?", kContinue,
                             id() + ":" + topic->id)};
      }
      int served = state->data.value("served", 0);
      if (is_go_on(a)) return {serve(ctx, *topic, served)};
      return {reroute(id(), "want to hear another one?", state->data, kLoopExpectations)};
    }

    for (const auto& t : *topics_) {
      if (has_any_phrase(a, t.keywords)) return {serve(ctx, t, 0)};
    }
    if (has_any_phrase(a, style_.generic_triggers)) {
      if (const auto* t = first_fresh(ctx)) return {serve(ctx, *t, 0)};
    }
    for (const auto& t : *topics_) {
      if (a.topic == t.id && a.dialogue_act != DialogueAct::Question) {
        return {offer_candidate(id(), t.offer, t.id)};
      }
    }
    return {};
  }

 private:
  void bind(const std::vector<FactTopic>& topics) {
    topics_ = &topics;
    for (const auto& t : topics) {
      args_.push_back(t.id);
      menu_.push_back({style_.id + ":" + t.id, t.name});
    }
  }

  const FactTopic* find(std::string_view id) const {
    for (const auto& t : *topics_) {
      if (t.id == id) return &t;
    }
    return nullptr;
  }

  const FactTopic* first_fresh(const TurnContext& ctx) const {
    for (const auto& t : *topics_) {
      if (!ctx.session.explored_topics.count(id() + ":" + t.id)) return &t;
    }
    return topics_->empty() ? nullptr : &topics_->front();
  }

  ResponseCandidate serve(const TurnContext& ctx, const FactTopic& topic, int served) const {
    for (const auto& f : topic.facts) {
      std::string fid = id() + ":" + topic.id + ":" + f.id;
      if (ctx.session.used_facts.count(fid)) continue;
      const auto& lead = style_.leads[static_cast<std::size_t>(served) % style_.leads.size()];
      const auto& prompt = style_.prompts[static_cast<std::size_t>(served) % style_.prompts.size()];
      nlohmann::json data = {{"topic", topic.id}, {"served", served + 1}};
      auto c = activity_turn(id(), lead + f.text + " " + prompt, kContinue, data,
                             kLoopExpectations);
      c.id = fid;
      c.topic = topic.id;
      c.postconditions.push_back(RecordFact{fid});
      return c;
    }
    auto menu = build_topic_menu(ctx);
    auto c = activity_end(id(), "That's all the " + topic.name + " I know! " + menu.text,
                          kContinue, id() + ":" + topic.id);
    c.id = id() + ":" + topic.id + ":exhausted";
    return c;
  }

  Style style_;
  const std::vector<FactTopic>* topics_ = nullptr;
  std::vector<std::string> args_;
  std::vector<MenuTopic> menu_;
};

class RiddlesModule : public DialogueModule {
 public:
  std::string id() const override { return kRiddles; }
  bool system_initiative() const override { return true; }
  std::vector<MenuTopic> menu_topics() const override { return {{kRiddles, "riddles"}}; }

  std::optional<ResponseCandidate> start(const TurnContext& ctx, std::string_view) const override {
    return next(ctx);
  }

  std::vector<ResponseCandidate> propose(const TurnContext& ctx) const override {
    const auto& a = ctx.analysis;
    const auto* state = ctx.activity(id());
    if (!state) {
      if (has_any_phrase(a, {"riddle", "riddles"})) return {next(ctx)};
      return {};
    }
    const auto& res = ctx.resources;
    std::string rid = state->data.at("riddle").get<std::string>();
    auto it = std::find_if(res.riddles.begin(), res.riddles.end(),
                           [&](const auto& r) { return r.id == rid; });
    if (it == res.riddles.end()) return {};
    if (state->data.value("phase", "asked") == "asked") {
      if (a.dialogue_act == DialogueAct::Question && !has_any_phrase(a, {"is it"})) {
        return {reroute(id(), "what do you think the answer is? " + it->question, state->data,
                        {"riddles:answer"})};
      }
      std::string text = check_answer(a.primary_text, it->answer)
                             ? "That's right! The answer is " + it->answer + "."
                             : "Good guess! The answer is " + it->answer + ".";
      nlohmann::json d = {{"riddle", rid}, {"phase", "answered"}};
      return {activity_turn(id(), text + " Want to hear another riddle?", kContinue, d,
                            kLoopExpectations)};
    }
    if (is_decline(a)) {
      return {activity_end(id(), "Okay, no more riddles for now.", kContinue, kRiddles)};
    }
    if (is_go_on(a)) return {next(ctx)};
    return {reroute(id(), "want to hear another riddle?", state->data, kLoopExpectations)};
  }

 private:
  ResponseCandidate next(const TurnContext& ctx) const {
    for (const auto& r : ctx.resources.riddles) {
      std::string fid = "riddle:" + r.id;
      if (ctx.session.used_facts.count(fid)) continue;
      nlohmann::json d = {{"riddle", r.id}, {"phase", "asked"}};
      auto c = activity_turn(id(), "Here's a riddle. " + r.question, kContinue, d,
                             {"riddles:answer"});
      c.id = fid;
      c.postconditions.push_back(RecordFact{fid});
      return c;
    }
    auto c = activity_end(id(), "I'm all out of riddles! " + build_topic_menu(ctx).text,
                          kContinue, kRiddles);
    return c;
  }
};

class WyrModule : public DialogueModule {
 public:
  std::string id() const override { return kWouldYouRather; }
  bool system_initiative() const override { return true; }
  std::vector<MenuTopic> menu_topics() const override {
    return {{kWouldYouRather, "would you rather questions"}};
  }

  std::optional<ResponseCandidate> start(const TurnContext& ctx, std::string_view) const override {
    return next(ctx);
  }

  std::vector<ResponseCandidate> propose(const TurnContext& ctx) const override {
    const auto& a = ctx.analysis;
    const auto* state = ctx.activity(id());
    if (!state) {
      if (has_any_phrase(a, {"would you rather"})) return {next(ctx)};
      if (has_any_phrase(a, {"ask me a question", "ask me something", "ask me some questions",
                             "ask me questions"})) {
        return {offer_candidate(id(), "How about I ask you some would you rather questions?",
                                "")};
      }
      return {};
    }
    const auto& res = ctx.resources;
    std::string qid = state->data.at("question").get<std::string>();
    auto it = std::find_if(res.wyr.begin(), res.wyr.end(),
                           [&](const auto& q) { return q.id == qid; });
    if (it == res.wyr.end()) return {};
    if (state->data.value("phase", "asked") == "asked") {
      if (a.dialogue_act == DialogueAct::Question) {
        return {reroute(id(), it->question, state->data, {"wyr:choice"})};
      }
      static const char* kOrd[] = {"first", "second"};
      auto choice = wyr_choice(a, *it, res.lexicons);
      std::string text;
      if (!choice) {
        text = std::string("Tough one! I would choose the ") + kOrd[it->choice] + " option.";
      } else if (*choice == it->choice) {
        text = std::string("Interesting, I would choose the ") + kOrd[it->choice] +
               " option too.";
      } else {
        text = std::string("Interesting, I would choose the ") + kOrd[it->choice] + " option.";
      }
      text += " " + it->justification + " Want to hear another?";
      nlohmann::json d = {{"question", qid}, {"phase", "answered"}};
      return {activity_turn(id(), text, kContinue, d, kLoopExpectations)};
    }
    if (is_decline(a)) {
      return {activity_end(id(), "Okay, that was fun.", kContinue, kWouldYouRather)};
    }
    if (is_go_on(a)) return {next(ctx)};
    return {reroute(id(), "want to hear another?", state->data, kLoopExpectations)};
  }

 private:
  ResponseCandidate next(const TurnContext& ctx) const {
    for (const auto& q : ctx.resources.wyr) {
      std::string fid = "wyr:" + q.id;
      if (ctx.session.used_facts.count(fid)) continue;
      nlohmann::json d = {{"question", q.id}, {"phase", "asked"}};
      auto c = activity_turn(id(), q.question, kContinue, d, {"wyr:choice"});
      c.id = fid;
      c.postconditions.push_back(RecordFact{fid});
      return c;
    }
    return activity_end(id(), "I'm out of would you rather questions! " +
                                  build_topic_menu(ctx).text,
                        kContinue, kWouldYouRather);
  }
};

}  // namespace

std::optional<std::size_t> wyr_choice(const UtteranceAnalysis& analysis,
                                      const WyrQuestion& question, const Lexicons& lexicons) {
  if (auto ord = ordinal_in(analysis.tokens); ord && *ord < 2) return *ord;
  if (has_token(analysis, "former")) return 0;
  if (has_token(analysis, "latter") || has_token(analysis, "last")) return 1;
  std::vector<std::size_t> overlap;
  for (const auto& opt : question.options) {
    auto words = lexicons.content_words(tokenize(opt));
    std::size_t n = 0;
    for (const auto& w : words) {
      if (std::find(analysis.content_words.begin(), analysis.content_words.end(), w) !=
          analysis.content_words.end()) {
        ++n;
      }
    }
    overlap.push_back(n);
  }
  if (overlap[0] == overlap[1]) return std::nullopt;
  return overlap[0] > overlap[1] ? 0 : 1;
}

std::unique_ptr<DialogueModule> make_recursive_module(const Resources& resources) {
  return std::make_unique<FactLoop>(
      FactLoop::Style{kRecursive,
                      {"Did you know that ", "How about this one. "},
                      {"Want to hear another?", "Want to hear more?"},
                      {"tell me a fact", "fun fact", "some facts", "a fact"}},
      resources.fact_topics);
}

std::unique_ptr<DialogueModule> make_headlines_module(const Resources& resources) {
  return std::make_unique<FactLoop>(
      FactLoop::Style{kHeadlines,
                      {"Here's a headline. ", "In other news. "},
                      {"Want to hear another headline?", "Want to hear more news?"},
                      {"news", "headlines", "headline"}},
      resources.headline_topics);
}

std::unique_ptr<DialogueModule> make_riddles_module() { return std::make_unique<RiddlesModule>(); }
std::unique_ptr<DialogueModule> make_wyr_module() { return std::make_unique<WyrModule>(); }

}  // namespace socialbot
