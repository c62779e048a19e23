#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "socialbot/candidate.hpp"
#include "socialbot/lexicon.hpp"
#include "socialbot/scoring.hpp"

namespace socialbot {

struct OpenerMatch {
  std::string member;  // as written in the opener table
  std::string cls;
  std::size_t length = 0;  // bytes of `text` covered by the opener
};

std::optional<OpenerMatch> leading_opener(std::string_view text, const Lexicons& lexicons);

/// Swaps a discourse opener ("Okay", "Well", ...) for another member of its
/// class when it already opened one of the last `window` agent turns.
std::string vary_opener(std::string_view text, std::span<const std::string> recent_agent_texts,
                        const Lexicons& lexicons, Rng& rng, std::size_t window = 2);

struct Rendered {
  std::string plain;
  std::string marked;
  std::vector<std::string> warnings;
};

/// Pause-only speech markup. Break tags already in the text are kept as
/// pauses; every other tag is stripped.
Rendered render_output(std::string_view text, std::span<const SsmlPause> pauses = {});
Rendered render_output(const ResponseCandidate& c);

}  // namespace socialbot
