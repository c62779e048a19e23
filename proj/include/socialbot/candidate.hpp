#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "socialbot/session.hpp"

namespace socialbot {

// State changes a candidate carries. They are applied only if the candidate
// wins and has been realized.
struct SetVar {
  std::string name;
  std::string value;
};
struct CallFunction {
  std::string name;
};
struct MarkTopicExplored {
  std::string topic;
};
struct SetActivity {
  ActivityState state;
};
struct EndActivity {};
struct SetFlow {
  FlowState state;
};
struct ExitFlow {};
struct RecordFact {
  std::string id;
};
struct MakeOffer {
  Offer offer;
};
struct RememberName {
  std::string name;
};

using StateUpdate = std::variant<SetVar, CallFunction, MarkTopicExplored, SetActivity,
                                 EndActivity, SetFlow, ExitFlow, RecordFact, MakeOffer,
                                 RememberName>;

struct SsmlPause {
  std::size_t offset = 0;  // byte offset into the plain text
  int millis = 0;
};

/// A proposed agent utterance.
struct ResponseCandidate {
  std::string id;
  std::string text;
  std::string origin;
  std::optional<std::string> via;  // module that delegated to `origin`
  double base_confidence = 0.0;
  double confidence = 0.0;
  bool is_priority = false;
  bool is_prompt = false;
  std::optional<std::string> prompt_id;
  std::optional<std::string> topic;
  std::vector<StateUpdate> postconditions;
  std::vector<SsmlPause> ssml_pauses;

  /// Expectation ids to publish when this candidate wins.
  std::vector<std::string> expectations;
  /// Counts as an engaged user turn for `origin` (not a menu or an offer).
  bool engaged = false;
  std::optional<std::string> flow_id;
  bool flow_prompt = false;
  bool end_session = false;

  static ResponseCandidate make(std::string origin, std::string text, double base) {
    ResponseCandidate c;
    c.origin = std::move(origin);
    c.text = std::move(text);
    c.base_confidence = base;
    c.confidence = base;
    return c;
  }
};

nlohmann::json describe(const StateUpdate& update);

}  // namespace socialbot
