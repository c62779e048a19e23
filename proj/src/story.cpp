#include <algorithm>

#include "socialbot/activities.hpp"
#include "socialbot/activity_base.hpp"
#include "socialbot/errors.hpp"
#include "socialbot/text.hpp"

namespace socialbot {

namespace {

using namespace detail;

bool closes_quote(std::string_view s) {
  auto t = trim(s);
  return ends_with(t, "\"") || ends_with(t, "\xE2\x80\x9D");
}

bool has_quote(std::string_view s) {
  return s.find('"') != std::string_view::npos ||
         s.find("\xE2\x80\x9C") != std::string_view::npos;
}

const std::vector<std::string> kStoryExpectations = {"storytelling:continue",
                                                     "storytelling:question"};

class StoryModule : public DialogueModule {
 public:
  std::string id() const override { return kStorytelling; }
  bool system_initiative() const override { return true; }

  std::vector<MenuTopic> menu_topics() const override { return {{kStorytelling, "a story"}}; }

  std::vector<std::string> start_args() const override { return {}; }

  std::optional<ResponseCandidate> start(const TurnContext& ctx,
                                         std::string_view arg) const override {
    const auto& stories = ctx.resources.stories;
    if (stories.empty()) return std::nullopt;
    const Story* story = arg.empty() ? nullptr : ctx.resources.story(arg);
    if (!story) {
      for (const auto& s : stories) {
        if (!ctx.session.used_facts.count("story:" + s.id)) {
          story = &s;
          break;
        }
      }
    }
    if (!story) story = &stories.front();
    nlohmann::json data = {{"story", story->id}, {"cursor", 0}, {"awaiting", "hook"}};
    auto c = activity_turn(id(), story->hook, kContinue, data, kStoryExpectations);
    c.id = "story:" + story->id + ":hook";
    c.postconditions.push_back(RecordFact{"story:" + story->id});
    return c;
  }

  std::vector<ResponseCandidate> propose(const TurnContext& ctx) const override {
    const auto* state = ctx.activity(id());
    const auto& a = ctx.analysis;
    if (!state) {
      if (has_any_phrase(a, {"story", "stories"})) {
        if (auto c = start(ctx, "")) return {*c};
      }
      return {};
    }
    const Story* story = ctx.resources.story(state->data.at("story").get<std::string>());
    if (!story) return {};
    std::string awaiting = state->data.value("awaiting", "continue");

    if (awaiting == "continue" && is_decline(a)) {
      return {activity_end(id(), "Okay, I'll save the rest of the story for another time.",
                           kContinue, kStorytelling)};
    }
    bool cooperative = is_go_on(a) || (awaiting == "hook" && a.dialogue_act == DialogueAct::NoAnswer) ||
                       a.content_words.empty();
    auto next = window(*story, state->data, ctx);
    if (cooperative) return {next};
    // Digressions and unanswered questions fall back to the story.
    auto c = next;
    c.text = "Anyway, back to my story. " + c.text;
    for (auto& p : c.ssml_pauses) p.offset += std::string("Anyway, back to my story. ").size();
    c.base_confidence = c.confidence = kReroute;
    c.id = "story:" + story->id + ":reroute";
    return {c};
  }

  std::optional<ResponseCandidate> answer(const TurnContext& ctx) const override {
    const auto* state = ctx.activity(id());
    if (!state) return std::nullopt;
    const Story* story = ctx.resources.story(state->data.at("story").get<std::string>());
    if (!story) return std::nullopt;
    const auto& words = ctx.analysis.content_words;
    for (const auto& qa : story->qa_pairs) {
      bool all = std::all_of(qa.keywords.begin(), qa.keywords.end(), [&](const auto& k) {
        return std::find(words.begin(), words.end(), k) != words.end();
      });
      if (all && !qa.keywords.empty()) {
        auto c = activity_turn(id(), qa.answer, kContinue, state->data, kStoryExpectations);
        c.id = "story:" + story->id + ":qa";
        return c;
      }
    }
    return std::nullopt;
  }

 private:
  ResponseCandidate window(const Story& story, const nlohmann::json& data,
                           const TurnContext&) const {
    std::size_t cursor = data.value("cursor", 0u);
    std::size_t n = story_window_at(story.sentences, cursor);
    std::string text;
    std::vector<SsmlPause> pauses;
    for (std::size_t i = cursor; i < cursor + n; ++i) {
      if (!text.empty()) {
        pauses.push_back({text.size(), 300});
        text += " ";
      }
      text += story.sentences[i];
    }
    std::size_t next = cursor + n;
    if (next >= story.sentences.size()) {
      auto c = activity_end(id(), text + " The end. I hope you liked it!", kContinue,
                            kStorytelling);
      c.id = "story:" + story.id + ":end";
      c.ssml_pauses = pauses;
      return c;
    }
    nlohmann::json d = {{"story", story.id}, {"cursor", next}, {"awaiting", "continue"}};
    auto c = activity_turn(id(), text + " Want me to keep going?", kContinue, d,
                           kStoryExpectations);
    c.id = "story:" + story.id + ":" + std::to_string(cursor);
    c.ssml_pauses = pauses;
    return c;
  }
};

}  // namespace

std::size_t story_window_at(const std::vector<std::string>& sentences, std::size_t cursor) {
  if (cursor >= sentences.size()) throw StateError("story cursor is past the end");
  std::size_t remaining = sentences.size() - cursor;
  if (remaining == 1) return 1;
  if (remaining >= 3 && has_quote(sentences[cursor + 1]) && closes_quote(sentences[cursor + 2])) {
    return 3;
  }
  return 2;
}

std::vector<std::size_t> story_windows(const std::vector<std::string>& sentences) {
  std::vector<std::size_t> out;
  std::size_t cursor = 0;
  while (cursor < sentences.size()) {
    auto n = story_window_at(sentences, cursor);
    out.push_back(n);
    cursor += n;
  }
  return out;
}

std::unique_ptr<DialogueModule> make_story_module() { return std::make_unique<StoryModule>(); }

}  // namespace socialbot
