#include "socialbot/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "socialbot/errors.hpp"
#include "socialbot/text.hpp"

namespace socialbot {

namespace {

std::set<std::string> entity_ids(const std::string& text, const Lexicons& lex) {
  auto tokens = tokenize(text);
  std::set<std::string> out;
  for (const auto& m : lex.gazetteer.scan(tokens)) out.insert(m.value->canonical_id);
  return out;
}

}  // namespace

bool content_filter(const ResponseCandidate& c, const Lexicons& lexicons) {
  auto tokens = tokenize(c.text);
  for (const auto& t : tokens) {
    if (lexicons.explicit_terms.count(t)) return false;
  }
  for (const auto& phrase : lexicons.explicit_phrases) {
    if (std::search(tokens.begin(), tokens.end(), phrase.begin(), phrase.end()) !=
        tokens.end()) {
      return false;
    }
  }
  return true;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double context_score(const ResponseCandidate& c, const ScoringContext& ctx) {
  auto cand_tokens = tokenize(c.text);
  auto cand_words = ctx.lexicons.content_words(cand_tokens);
  std::set<std::string> a(cand_words.begin(), cand_words.end());
  std::set<std::string> b(ctx.analysis.content_words.begin(),
                          ctx.analysis.content_words.end());
  std::set<std::string> ea = entity_ids(c.text, ctx.lexicons);
  std::set<std::string> eb;
  for (const auto& e : ctx.analysis.entities) eb.insert(e.canonical_id);
  double score = ctx.config.word_weight * jaccard(a, b) +
                 ctx.config.entity_weight * jaccard(ea, eb);
  return std::clamp(score, 0.0, 1.0);
}

LossBreakdown loss(const ResponseCandidate& c, const ScoringContext& ctx) {
  LossBreakdown out;
  if (ctx.active_module && !c.is_priority && c.origin != *ctx.active_module &&
      c.via != ctx.active_module) {
    out.incoherence = ctx.config.incoherence_penalty;
  }
  if (c.is_prompt && c.prompt_id && ctx.used_prompts.count(*c.prompt_id)) {
    out.repeat = ctx.config.repeat_penalty;
  }
  if (ctx.config.length_penalized_origins.count(c.origin)) {
    auto n = tokenize(c.text).size();
    if (n > ctx.config.sent_len_threshold) {
      double over = static_cast<double>(n - ctx.config.sent_len_threshold);
      out.sent_len = std::min(ctx.config.sent_len_slope * over, ctx.config.sent_len_cap);
    }
  }
  return out;
}

double updated_confidence(double base, double context, double total_loss) {
  double v = std::min(std::max(context, base) - total_loss, 1.0);
  return std::max(v, 0.0);
}

Selection select_response(std::span<const ResponseCandidate> pool,
                          const ScoringContext& ctx, Rng& rng) {
  Selection sel;
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    ScoreTrace t;
    t.id = pool[i].id;
    t.origin = pool[i].origin;
    t.text = pool[i].text;
    t.base = pool[i].confidence;
    t.priority = pool[i].is_priority;
    t.filtered = !content_filter(pool[i], ctx.lexicons);
    if (!t.filtered) valid.push_back(i);
    sel.trace.push_back(std::move(t));
  }
  if (valid.empty()) {
    throw StateError("candidate pool is empty after content filtering");
  }

  for (std::size_t i : valid) {
    if (pool[i].is_priority) {
      sel.winner = pool[i];
      sel.trace[i].final_confidence = 1.0;
      return sel;
    }
  }

  std::vector<double> finals(pool.size(), -1.0);
  double best = -1.0;
  for (std::size_t i : valid) {
    auto& t = sel.trace[i];
    t.context = context_score(pool[i], ctx);
    t.loss = loss(pool[i], ctx);
    t.final_confidence = updated_confidence(pool[i].confidence, t.context, t.loss.total());
    finals[i] = t.final_confidence;
    best = std::max(best, t.final_confidence);
  }
  std::vector<std::size_t> top;
  for (std::size_t i : valid) {
    if (std::abs(finals[i] - best) <= 1e-12) top.push_back(i);
  }
  std::size_t pick = top.front();
  if (top.size() > 1) {
    std::uniform_int_distribution<std::size_t> dist(0, top.size() - 1);
    pick = top[dist(rng)];
  }
  sel.tied = top.size();
  sel.winner = pool[pick];
  sel.winner.confidence = finals[pick];
  return sel;
}

nlohmann::json to_json(const ScoreTrace& t) {
  return {{"id", t.id},
          {"origin", t.origin},
          {"text", t.text},
          {"base", t.base},
          {"context", t.context},
          {"loss",
           {{"incoherence", t.loss.incoherence},
            {"repeat", t.loss.repeat},
            {"sent_len", t.loss.sent_len},
            {"total", t.loss.total()}}},
          {"final", t.final_confidence},
          {"filtered", t.filtered},
          {"priority", t.priority}};
}

}  // namespace socialbot
