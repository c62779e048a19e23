#pragma once

// Shared plumbing for the system-initiative modules.

#include <string>
#include <string_view>
#include <vector>

#include "socialbot/module.hpp"

namespace socialbot::detail {

inline constexpr double kContinue = 1.0;
inline constexpr double kReroute = 0.7;
inline constexpr double kOfferBase = 0.8;

/// A turn inside the activity that keeps it running with `data`.
ResponseCandidate activity_turn(std::string_view module, std::string text, double base,
                                nlohmann::json data, std::vector<std::string> expectations);
/// The activity's final turn.
ResponseCandidate activity_end(std::string_view module, std::string text, double base,
                               std::string_view explored_topic = {});

ResponseCandidate offer_candidate(std::string_view module, std::string text,
                                  std::string_view arg);

/// Yes-like reply, or a go-on phrase.
bool is_go_on(const UtteranceAnalysis& a);
bool is_decline(const UtteranceAnalysis& a);

/// Digression re-route: "Anyway, <prompt>" at reduced confidence.
ResponseCandidate reroute(std::string_view module, std::string_view prompt, nlohmann::json data,
                          std::vector<std::string> expectations);

/// Numbers written as digits or words up to twenty, in order of appearance.
std::vector<int> numbers_in(const std::vector<std::string>& tokens);
/// 0-based index named by an ordinal word ("first", "second", ...).
std::optional<std::size_t> ordinal_in(const std::vector<std::string>& tokens);

std::string join_list(const std::vector<std::string>& items, std::string_view last_sep = "and");

}  // namespace socialbot::detail
