#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "socialbot/candidate.hpp"
#include "socialbot/lexicon.hpp"
#include "socialbot/types.hpp"

namespace socialbot {

using Rng = std::mt19937_64;

/// Penalty and context constants. Defaults are the published values where
/// one exists (incoherence, repeat); the rest are local choices.
struct ScoringConfig {
  double incoherence_penalty = 0.15;
  double repeat_penalty = 0.05;
  std::size_t sent_len_threshold = 25;
  double sent_len_slope = 0.005;
  double sent_len_cap = 0.15;
  std::set<std::string> length_penalized_origins = {"retrieval", "headlines"};
  double word_weight = 0.5;
  double entity_weight = 0.5;
};

struct LossBreakdown {
  double incoherence = 0.0;
  double repeat = 0.0;
  double sent_len = 0.0;

  double total() const { return incoherence + repeat + sent_len; }
};

struct ScoringContext {
  const UtteranceAnalysis& analysis;
  std::optional<std::string> active_module;  // running system-initiative module
  const std::set<std::string>& used_prompts;
  const Lexicons& lexicons;
  ScoringConfig config;
};

struct ScoreTrace {
  std::string id;
  std::string origin;
  std::string text;
  double base = 0.0;
  double context = 0.0;
  LossBreakdown loss;
  double final_confidence = 0.0;
  bool filtered = false;  // removed by the explicit-content filter
  bool priority = false;
};

struct Selection {
  ResponseCandidate winner;
  std::vector<ScoreTrace> trace;
  std::size_t tied = 1;  // candidates sharing the top confidence
};

/// False when the text contains a listed explicit term on token boundaries.
bool content_filter(const ResponseCandidate& c, const Lexicons& lexicons);

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

double context_score(const ResponseCandidate& c, const ScoringContext& ctx);
LossBreakdown loss(const ResponseCandidate& c, const ScoringContext& ctx);

/// min(max(context, confidence) - loss, 1), floored at 0.
double updated_confidence(double base, double context, double total_loss);

/// Filter, priority short-circuit, confidence update, argmax with uniform
/// random tie-breaking. Throws StateError when nothing survives filtering.
Selection select_response(std::span<const ResponseCandidate> pool,
                          const ScoringContext& ctx, Rng& rng);

nlohmann::json to_json(const ScoreTrace& t);

}  // namespace socialbot
