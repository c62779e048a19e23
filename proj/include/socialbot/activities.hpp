#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "socialbot/module.hpp"

namespace socialbot {

struct NimMove {
  std::size_t pile = 0;
  int take = 0;
  bool operator==(const NimMove&) const = default;
};

/// Normal-play Nim: a move to xor 0 when one exists, otherwise one stone
/// from the first largest pile. Throws StateError when every pile is empty.
NimMove nim_move(const std::vector<int>& piles);

/// Folded last letter of a city name ("Boston" -> 'n').
char city_last_letter(std::string_view city);
char city_first_letter(std::string_view city);

/// First unused city (alphabetical) starting with the last letter of
/// `last_city`; nullopt means the agent concedes.
std::optional<std::string> city_reply(std::string_view last_city,
                                      const std::set<std::string>& used_folded,
                                      const std::vector<std::string>& cities);

/// Lowercase, drop punctuation and articles.
std::vector<std::string> answer_tokens(std::string_view text);
/// Edit distance allowed for a gold word of `length` letters.
std::size_t answer_allowance(std::size_t length);
/// Every gold token needs a user token within its allowance.
bool check_answer(std::string_view user_text, std::string_view gold);

/// Sentence counts per turn: 2 by default, 1 for a lone trailing sentence,
/// 3 when the third closes a quoted exchange.
std::vector<std::size_t> story_windows(const std::vector<std::string>& sentences);
std::size_t story_window_at(const std::vector<std::string>& sentences, std::size_t cursor);

/// Index of the chosen option, by keywords, label or ordinal.
std::optional<std::size_t> parse_survey_option(const UtteranceAnalysis& analysis,
                                               const SurveyQuestion& question);
/// Argmax of the tally; ties go to the earliest declared category.
std::string survey_result(const Survey& survey, const std::map<std::string, int>& tally);

/// Which of the two options the user picked, by content-word overlap.
std::optional<std::size_t> wyr_choice(const UtteranceAnalysis& analysis,
                                      const WyrQuestion& question, const Lexicons& lexicons);

std::unique_ptr<DialogueModule> make_story_module();
std::unique_ptr<DialogueModule> make_recursive_module(const Resources& resources);
std::unique_ptr<DialogueModule> make_headlines_module(const Resources& resources);
std::unique_ptr<DialogueModule> make_riddles_module();
std::unique_ptr<DialogueModule> make_wyr_module();
std::unique_ptr<DialogueModule> make_survey_module();
std::unique_ptr<DialogueModule> make_nim_module();
std::unique_ptr<DialogueModule> make_city_names_module();
std::unique_ptr<DialogueModule> make_jeopardy_module();
std::unique_ptr<DialogueModule> make_fast_money_module();
std::unique_ptr<DialogueModule> make_text_adventure_module();

/// Games listed when the user accepts "would you like to play a game?".
std::vector<MenuTopic> game_menu_topics();

}  // namespace socialbot
