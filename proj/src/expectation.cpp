#include "socialbot/expectation.hpp"

#include <algorithm>

#include "socialbot/errors.hpp"
#include "socialbot/text.hpp"

namespace socialbot {

namespace {

bool contains_run(const std::vector<std::string>& tokens,
                  const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > tokens.size()) return false;
  return std::search(tokens.begin(), tokens.end(), phrase.begin(), phrase.end()) !=
         tokens.end();
}

bool keyword_match(const KeywordSet& ks, const UtteranceAnalysis& analysis) {
  std::vector<std::string> texts = analysis.all_texts;
  if (texts.empty()) texts.push_back(analysis.primary_text);
  for (const auto& text : texts) {
    auto tokens = tokenize(text);
    bool ok = ks.match_all;
    for (const auto& phrase : ks.phrases) {
      bool hit = contains_run(tokens, phrase);
      if (ks.match_all && !hit) {
        ok = false;
        break;
      }
      if (!ks.match_all && hit) {
        ok = true;
        break;
      }
    }
    if (ok && !ks.phrases.empty()) return true;
  }
  return false;
}

}  // namespace

FunctionRegistry FunctionRegistry::with_builtins() {
  FunctionRegistry r;
  r.add_predicate("mentions_entity", [](const UtteranceAnalysis& a, const SessionState&) {
    return !a.entities.empty();
  });
  r.add_predicate("mentions_media_title",
                  [](const UtteranceAnalysis& a, const SessionState&) {
                    return std::any_of(a.entities.begin(), a.entities.end(), [](const auto& e) {
                      return e.entity_type == EntityType::MediaTitle;
                    });
                  });
  r.add_predicate("mentions_person", [](const UtteranceAnalysis& a, const SessionState&) {
    return std::any_of(a.entities.begin(), a.entities.end(),
                       [](const auto& e) { return e.entity_type == EntityType::Person; });
  });
  r.add_predicate("is_positive", [](const UtteranceAnalysis& a, const SessionState&) {
    return a.sentiment > 0.0;
  });
  r.add_predicate("is_negative", [](const UtteranceAnalysis& a, const SessionState&) {
    return a.sentiment < 0.0;
  });
  r.add_predicate("is_long_answer", [](const UtteranceAnalysis& a, const SessionState&) {
    return a.content_words.size() >= 4;
  });
  r.add_predicate("always", [](const UtteranceAnalysis&, const SessionState&) {
    return true;
  });
  r.add_action("remember_entity", [](SessionState& s, const UtteranceAnalysis& a) {
    if (!s.active_flow) return;
    s.active_flow->vars["remembered"] =
        a.entities.empty() ? std::string("that") : a.entities.front().display;
  }, {"remembered"});
  r.add_action("remember_name", [](SessionState& s, const UtteranceAnalysis& a) {
    for (const auto& e : a.entities) {
      if (e.entity_type == EntityType::Person) {
        s.user_name = e.display;
        return;
      }
    }
  });
  return r;
}

void FunctionRegistry::add_predicate(std::string name, PredicateFn fn) {
  predicates_[std::move(name)] = std::move(fn);
}

void FunctionRegistry::add_action(std::string name, ActionFn fn,
                                  std::vector<std::string> outputs) {
  outputs_[name] = std::move(outputs);
  actions_[std::move(name)] = std::move(fn);
}

const std::vector<std::string>& FunctionRegistry::action_outputs(std::string_view name) const {
  static const std::vector<std::string> kNone;
  auto it = outputs_.find(name);
  return it == outputs_.end() ? kNone : it->second;
}

bool FunctionRegistry::has_predicate(std::string_view name) const {
  return predicates_.find(name) != predicates_.end();
}

bool FunctionRegistry::has_action(std::string_view name) const {
  return actions_.find(name) != actions_.end();
}

bool FunctionRegistry::call_predicate(std::string_view name,
                                      const UtteranceAnalysis& analysis,
                                      const SessionState& session) const {
  auto it = predicates_.find(name);
  if (it == predicates_.end()) {
    throw ConfigError("predicate '" + std::string(name) + "' is not registered");
  }
  return it->second(analysis, session);
}

void FunctionRegistry::call_action(std::string_view name, SessionState& session,
                                   const UtteranceAnalysis& analysis) const {
  auto it = actions_.find(name);
  if (it == actions_.end()) {
    throw ConfigError("function '" + std::string(name) + "' is not registered");
  }
  it->second(session, analysis);
}

std::vector<std::string> FunctionRegistry::predicate_names() const {
  std::vector<std::string> out;
  for (const auto& [name, fn] : predicates_) out.push_back(name);
  return out;
}

std::vector<std::string> FunctionRegistry::action_names() const {
  std::vector<std::string> out;
  for (const auto& [name, fn] : actions_) out.push_back(name);
  return out;
}

bool match_expectation(const Expectation& e, const UtteranceAnalysis& analysis,
                       const SessionState& session, const FunctionRegistry& registry) {
  return std::visit(
      [&](const auto& m) -> bool {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, KeywordSet>) {
          return keyword_match(m, analysis);
        } else if constexpr (std::is_same_v<M, DialogueActIs>) {
          return analysis.dialogue_act == m.act;
        } else if constexpr (std::is_same_v<M, SentimentRange>) {
          return analysis.sentiment >= m.lo && analysis.sentiment <= m.hi;
        } else {
          return registry.call_predicate(m.name, analysis, session);
        }
      },
      e.matcher);
}

std::vector<std::string> check_expectation(const Expectation& e,
                                           const FunctionRegistry& registry) {
  std::vector<std::string> problems;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, KeywordSet>) {
          if (m.phrases.empty()) problems.push_back("keyword set is empty");
          for (const auto& p : m.phrases) {
            if (p.empty()) problems.push_back("keyword phrase has no words");
          }
        } else if constexpr (std::is_same_v<M, SentimentRange>) {
          if (!(m.lo <= m.hi)) problems.push_back("sentiment range has lo > hi");
        } else if constexpr (std::is_same_v<M, Predicate>) {
          if (!registry.has_predicate(m.name)) {
            problems.push_back("predicate '" + m.name + "' is not registered");
          }
        }
      },
      e.matcher);
  return problems;
}

}  // namespace socialbot
