#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "socialbot/lexicon.hpp"
#include "socialbot/session.hpp"
#include "socialbot/types.hpp"

namespace socialbot {

inline constexpr double kDefaultClarificationThreshold = 0.40;

/// Throws InputError for an empty list or a score outside [0,1].
void validate_asr_input(const AsrInput& input);

/// Arithmetic mean of the hypothesis scores.
double average_asr_confidence(const AsrInput& input);

/// Rule-based shallow NLU over an ASR n-best list.
///
/// Tokens, act, sentiment and topic come from the top hypothesis. Entities are
/// scanned over every hypothesis (top first, deduplicated by canonical id) so
/// that a later hypothesis can still contribute a gazetteer hit.
class Analyzer {
 public:
  explicit Analyzer(const Lexicons& lexicons,
                    double clarification_threshold = kDefaultClarificationThreshold);

  UtteranceAnalysis analyze(const AsrInput& input, const SessionState& session) const;
  UtteranceAnalysis analyze_text(std::string_view text) const;

  /// Maps the first third-person pronoun to the most recent compatible entity
  /// in the session history (it: non-Person, he/she: Person, they: any).
  UtteranceAnalysis resolve_coreference(const UtteranceAnalysis& analysis,
                                        const SessionState& session) const;

  std::vector<EntityMention> find_entities(std::string_view text,
                                           std::size_t hypothesis = 0) const;
  DialogueAct classify(std::span<const std::string> tokens, std::string_view raw,
                       StopKind* stop_kind = nullptr, bool* menu = nullptr) const;
  double sentiment(std::span<const std::string> tokens) const;
  std::optional<std::string> topic(std::span<const std::string> tokens) const;

  /// "population of Mexico City": attribute words, then the entity.
  std::string search_query(const UtteranceAnalysis& analysis) const;

  const Lexicons& lexicons() const { return lex_; }
  double clarification_threshold() const { return threshold_; }

 private:
  const Lexicons& lex_;
  double threshold_;
};

}  // namespace socialbot
