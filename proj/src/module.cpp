#include "socialbot/module.hpp"

#include <algorithm>
#include <random>

#include "socialbot/errors.hpp"
#include "socialbot/text.hpp"

namespace socialbot {

std::uint64_t stable_hash(std::string_view text) {
  // FNV-1a, so seeds do not depend on the standard library's std::hash.
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Rng TurnContext::rng_for(std::string_view module) const {
  std::uint64_t m = stable_hash(module);
  std::seed_seq seq{static_cast<std::uint32_t>(turn_seed),
                    static_cast<std::uint32_t>(turn_seed >> 32),
                    static_cast<std::uint32_t>(session.turn_count),
                    static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(m >> 32)};
  return Rng(seq);
}

const ActivityState* TurnContext::activity(std::string_view module) const {
  if (session.activity && session.activity->module == module) return &*session.activity;
  return nullptr;
}

void ModuleRegistry::add(std::unique_ptr<DialogueModule> module) {
  if (find(module->id())) throw ConfigError("module '" + module->id() + "' registered twice");
  modules_.push_back(std::move(module));
}

const DialogueModule* ModuleRegistry::find(std::string_view id) const {
  for (const auto& m : modules_) {
    if (m->id() == id) return m.get();
  }
  return nullptr;
}

bool ModuleRegistry::is_system_initiative(std::string_view id) const {
  auto* m = find(id);
  return m && m->system_initiative();
}

std::vector<std::string> ModuleRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& m : modules_) out.push_back(m->id());
  return out;
}

bool has_any_phrase(const UtteranceAnalysis& a, const std::vector<std::string>& phrases) {
  std::vector<std::vector<std::string>> token_sets;
  token_sets.push_back(a.tokens);
  for (std::size_t i = 1; i < a.all_texts.size(); ++i) token_sets.push_back(tokenize(a.all_texts[i]));
  for (const auto& phrase : phrases) {
    auto p = tokenize(phrase);
    if (p.empty()) continue;
    for (const auto& toks : token_sets) {
      if (std::search(toks.begin(), toks.end(), p.begin(), p.end()) != toks.end()) return true;
    }
  }
  return false;
}

bool has_token(const UtteranceAnalysis& a, std::string_view token) {
  return std::find(a.tokens.begin(), a.tokens.end(), token) != a.tokens.end();
}

ResponseCandidate prompt_candidate(std::string origin, std::string text, double base,
                                   std::string prompt_id) {
  auto c = ResponseCandidate::make(std::move(origin), std::move(text), base);
  c.is_prompt = true;
  c.prompt_id = std::move(prompt_id);
  c.id = *c.prompt_id;
  return c;
}

}  // namespace socialbot
