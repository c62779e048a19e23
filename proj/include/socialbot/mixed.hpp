#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "socialbot/module.hpp"

namespace socialbot {

/// Picks the agent's opinions for a user: per category one Love favorite,
/// then one non-favorite variant for every other entity. Depends only on
/// `user_id`, so a profile re-seeded on another boot is identical.
OpinionProfile seed_profile(const Resources& resources, std::string_view user_id);

/// Favorite-X solicitations, why-questions and "what do you think of X".
std::optional<ResponseCandidate> opinion_respond(const UtteranceAnalysis& analysis,
                                                 const OpinionProfile& profile,
                                                 const Resources& resources);

/// Reflective probe for questions with too few content words.
std::string eliza_reflect(std::string_view text);

inline constexpr std::size_t kElizaContentThreshold = 2;

/// Question answering: ELIZA probe, active-module QA, knowledge chain, then
/// an honest "not sure" message.
ResponseCandidate answer_question(const TurnContext& ctx);

std::unique_ptr<DialogueModule> make_opinions_module();
std::unique_ptr<DialogueModule> make_question_answering_module();
std::unique_ptr<DialogueModule> make_retrieval_module();
std::unique_ptr<DialogueModule> make_out_of_domain_module();

// Topic menu shared by the engine and the out-of-domain fallback.
std::vector<MenuTopic> menu_topic_pool(const ModuleRegistry& modules);
/// Up to `n` topics drawn uniformly from the pool minus explored topics
/// (the whole pool once everything is explored): seeded Fisher-Yates over
/// the id-sorted pool, first `n` taken.
std::vector<MenuTopic> pick_menu_topics(std::vector<MenuTopic> pool,
                                        const std::set<std::string>& explored, Rng& rng,
                                        std::size_t n = 3);
ResponseCandidate build_topic_menu(const TurnContext& ctx, std::size_t n = 3, double base = 0.5);
std::string menu_sentence(const std::vector<MenuTopic>& topics,
                          std::string_view lead = "We could talk about");

/// Prefixes a hedge ("Moving on,") and lowercases the first word when safe.
std::string with_hedge(std::string_view hedge, std::string_view text, const Lexicons& lexicons);

}  // namespace socialbot
