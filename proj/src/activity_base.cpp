#include "socialbot/activity_base.hpp"

#include <algorithm>
#include <map>

#include "socialbot/text.hpp"

namespace socialbot::detail {

ResponseCandidate activity_turn(std::string_view module, std::string text, double base,
                                nlohmann::json data, std::vector<std::string> expectations) {
  auto c = ResponseCandidate::make(std::string(module), std::move(text), base);
  c.id = std::string(module) + ":turn";
  c.engaged = true;
  c.postconditions.push_back(SetActivity{ActivityState{std::string(module), std::move(data)}});
  c.expectations = std::move(expectations);
  return c;
}

ResponseCandidate activity_end(std::string_view module, std::string text, double base,
                               std::string_view explored_topic) {
  auto c = ResponseCandidate::make(std::string(module), std::move(text), base);
  c.id = std::string(module) + ":end";
  c.engaged = true;
  c.postconditions.push_back(EndActivity{});
  if (!explored_topic.empty()) {
    c.postconditions.push_back(MarkTopicExplored{std::string(explored_topic)});
  }
  return c;
}

ResponseCandidate offer_candidate(std::string_view module, std::string text,
                                  std::string_view arg) {
  std::string pid = "offer:" + std::string(module);
  if (!arg.empty()) pid += ":" + std::string(arg);
  auto c = prompt_candidate(std::string(module), std::move(text), kOfferBase, pid);
  c.postconditions.push_back(MakeOffer{Offer{std::string(module), std::string(arg)}});
  c.expectations = {"offer:accept", "offer:decline"};
  return c;
}

bool is_go_on(const UtteranceAnalysis& a) {
  if (a.dialogue_act == DialogueAct::NoAnswer) return false;
  if (a.dialogue_act == DialogueAct::YesAnswer) return true;
  return has_any_phrase(a, {"go on", "keep going", "continue", "next", "another", "more",
                            "what happened"});
}

bool is_decline(const UtteranceAnalysis& a) {
  if (a.dialogue_act == DialogueAct::NoAnswer) return true;
  return has_any_phrase(a, {"no more", "that's enough", "enough", "i'm done", "not anymore"});
}

ResponseCandidate reroute(std::string_view module, std::string_view prompt, nlohmann::json data,
                          std::vector<std::string> expectations) {
  auto c = activity_turn(module, "Anyway, " + std::string(prompt), kReroute, std::move(data),
                         std::move(expectations));
  c.id = std::string(module) + ":reroute";
  c.engaged = false;
  return c;
}

std::vector<int> numbers_in(const std::vector<std::string>& tokens) {
  static const std::map<std::string, int, std::less<>> kWords = {
      {"zero", 0},    {"one", 1},       {"two", 2},       {"three", 3},    {"four", 4},
      {"five", 5},    {"six", 6},       {"seven", 7},     {"eight", 8},    {"nine", 9},
      {"ten", 10},    {"eleven", 11},   {"twelve", 12},   {"thirteen", 13}, {"fourteen", 14},
      {"fifteen", 15}, {"sixteen", 16}, {"seventeen", 17}, {"eighteen", 18}, {"nineteen", 19},
      {"twenty", 20}};
  std::vector<int> out;
  for (const auto& t : tokens) {
    if (auto it = kWords.find(t); it != kWords.end()) {
      out.push_back(it->second);
    } else if (!t.empty() && t.size() <= 3 &&
               std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      out.push_back(std::stoi(t));
    }
  }
  return out;
}

std::optional<std::size_t> ordinal_in(const std::vector<std::string>& tokens) {
  static const std::map<std::string, std::size_t, std::less<>> kOrd = {
      {"first", 0}, {"second", 1}, {"third", 2}, {"fourth", 3}, {"fifth", 4}, {"last", 99}};
  for (const auto& t : tokens) {
    if (auto it = kOrd.find(t); it != kOrd.end()) return it->second;
  }
  return std::nullopt;
}

std::string join_list(const std::vector<std::string>& items, std::string_view last_sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) {
      out += (i + 1 == items.size()) ? " " + std::string(last_sep) + " " : ", ";
    }
    out += items[i];
  }
  return out;
}

}  // namespace socialbot::detail
