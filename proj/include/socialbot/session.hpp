#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "socialbot/opinion.hpp"
#include "socialbot/types.hpp"

namespace socialbot {

inline constexpr const char* kFlowModule = "flow_runtime";

enum class Speaker { User, Agent };

struct HistoryTurn {
  Speaker speaker = Speaker::User;
  std::string text;
  std::optional<UtteranceAnalysis> analysis;  // user turns
  std::vector<EntityMention> mentions;         // entities named in the text
  std::string origin;                           // agent turns: producing module

  bool operator==(const HistoryTurn&) const = default;
};

/// Position inside a flow graph. An empty node id means the flow has been
/// prompted and is waiting on one of its entry expectations.
struct FlowState {
  std::string flow_id;
  std::string node_id;
  std::set<std::string> visited;
  std::map<std::string, std::string> vars;

  bool operator==(const FlowState&) const = default;
};

/// Per-activity state for a running system-initiative module. The payload
/// schema belongs to the module (story cursor, Nim piles, ...).
struct ActivityState {
  std::string module;
  nlohmann::json data;

  bool operator==(const ActivityState&) const = default;
};

/// A yes/no proposal made by the agent on the previous turn ("Do you want to
/// hear some science facts?"). Accepting starts `module` with `arg`.
struct Offer {
  std::string module;
  std::string arg;

  bool operator==(const Offer&) const = default;
};

/// Short-term memory for one conversation.
struct SessionState {
  std::string session_id;
  std::string user_id;
  std::optional<std::string> user_name;
  int turn_count = 0;
  std::vector<HistoryTurn> history;
  std::optional<ActivityState> activity;
  std::optional<FlowState> active_flow;
  std::map<std::string, std::set<std::string>> flow_visited;
  std::set<std::string> explored_topics;
  std::set<std::string> used_prompts;
  std::set<std::string> used_facts;
  OpinionProfile agent_profile;
  std::vector<std::string> expectations;
  std::optional<Offer> offer;
  bool pending_clarification = false;
  bool pending_stop_confirmation = false;
  bool closed = false;
  std::uint64_t rng_seed = 0;

  // Engagement counters (user turns handled inside a module or flow).
  std::map<std::string, int> module_turns;
  std::map<std::string, int> flow_turns;
  std::map<std::string, int> flows_prompted;

  std::optional<std::string> active_module() const;
  const HistoryTurn* last_agent_turn() const;
  std::vector<std::string> recent_agent_texts(std::size_t n) const;

  bool operator==(const SessionState&) const = default;
};

/// One STM mutation: a history entry plus the derived-set updates it implies.
struct TurnEvent {
  std::string session_id;
  std::optional<HistoryTurn> turn;
  std::optional<std::string> prompt_id;
  std::vector<std::string> fact_ids;
  std::vector<std::string> explored_topics;
  std::optional<std::string> engaged_module;  // counts one engaged user turn
  std::optional<std::string> flow_turn;       // counts one user turn in a flow
  std::optional<std::string> prompted_flow;

  bool empty() const;
};

/// Applies `event` to a copy of `session`. Throws StateError when the event
/// targets a different session.
SessionState stm_update(const SessionState& session, const TurnEvent& event);

/// Flows with more than two user turns in this session.
std::vector<std::string> utilized_flows(const SessionState& session);

void to_json(nlohmann::json& j, const HistoryTurn& t);
void from_json(const nlohmann::json& j, HistoryTurn& t);
void to_json(nlohmann::json& j, const FlowState& f);
void from_json(const nlohmann::json& j, FlowState& f);
void to_json(nlohmann::json& j, const SessionState& s);
void from_json(const nlohmann::json& j, SessionState& s);

}  // namespace socialbot
