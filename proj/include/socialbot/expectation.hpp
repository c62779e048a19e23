#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "socialbot/session.hpp"
#include "socialbot/types.hpp"

namespace socialbot {

struct KeywordSet {
  std::vector<std::vector<std::string>> phrases;  // each phrase is a token run
  bool match_all = false;
};

struct DialogueActIs {
  DialogueAct act = DialogueAct::Other;
};

/// Inclusive on both ends.
struct SentimentRange {
  double lo = -1.0;
  double hi = 1.0;
};

struct Predicate {
  std::string name;
};

using Matcher = std::variant<KeywordSet, DialogueActIs, SentimentRange, Predicate>;

/// Declarative precondition over the next user utterance.
struct Expectation {
  std::string id;
  Matcher matcher;
  bool consume = true;
};

using PredicateFn = std::function<bool(const UtteranceAnalysis&, const SessionState&)>;
using ActionFn = std::function<void(SessionState&, const UtteranceAnalysis&)>;

/// Named pure functions referenced from flow files. Populated at startup and
/// read-only afterwards.
class FunctionRegistry {
 public:
  static FunctionRegistry with_builtins();

  void add_predicate(std::string name, PredicateFn fn);
  /// `outputs` names the flow variables the action assigns.
  void add_action(std::string name, ActionFn fn, std::vector<std::string> outputs = {});

  bool has_predicate(std::string_view name) const;
  bool has_action(std::string_view name) const;

  bool call_predicate(std::string_view name, const UtteranceAnalysis& analysis,
                      const SessionState& session) const;
  void call_action(std::string_view name, SessionState& session,
                   const UtteranceAnalysis& analysis) const;

  std::vector<std::string> predicate_names() const;
  std::vector<std::string> action_names() const;
  const std::vector<std::string>& action_outputs(std::string_view name) const;

 private:
  std::map<std::string, PredicateFn, std::less<>> predicates_;
  std::map<std::string, ActionFn, std::less<>> actions_;
  std::map<std::string, std::vector<std::string>, std::less<>> outputs_;
};

/// Keyword phrases are checked against every hypothesis; the other matchers
/// read the top-hypothesis analysis.
bool match_expectation(const Expectation& e, const UtteranceAnalysis& analysis,
                       const SessionState& session, const FunctionRegistry& registry);

/// Structural problems with an expectation definition, empty when valid.
std::vector<std::string> check_expectation(const Expectation& e,
                                           const FunctionRegistry& registry);

}  // namespace socialbot
