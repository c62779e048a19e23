#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace socialbot {

/// Lowercases ASCII and folds common Latin-1 diacritics (UTF-8 encoded) to
/// their base letter. Curly apostrophes become '.
std::string fold(std::string_view text);

std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);
std::string join(std::span<const std::string> parts, std::string_view sep);

/// Word tokens: folded, split on anything outside [a-z0-9'], possessive 's
/// removed except for pronoun/wh contractions ("it's", "what's", ...).
std::vector<std::string> tokenize(std::string_view text);

bool is_contraction(std::string_view token);

/// Character-level Levenshtein distance.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// Capitalizes the first ASCII letter of the string.
std::string capitalize(std::string_view text);

bool ends_with(std::string_view text, std::string_view suffix);

}  // namespace socialbot
