#include "socialbot/session.hpp"

#include "socialbot/errors.hpp"

namespace socialbot {

std::optional<std::string> SessionState::active_module() const {
  if (active_flow) return std::string(kFlowModule);
  if (activity) return activity->module;
  return std::nullopt;
}

const HistoryTurn* SessionState::last_agent_turn() const {
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (it->speaker == Speaker::Agent) return &*it;
  }
  return nullptr;
}

std::vector<std::string> SessionState::recent_agent_texts(std::size_t n) const {
  std::vector<std::string> out;
  for (auto it = history.rbegin(); it != history.rend() && out.size() < n; ++it) {
    if (it->speaker == Speaker::Agent) out.push_back(it->text);
  }
  return out;
}

bool TurnEvent::empty() const {
  return !turn && !prompt_id && fact_ids.empty() && explored_topics.empty() &&
         !engaged_module && !flow_turn && !prompted_flow;
}

SessionState stm_update(const SessionState& session, const TurnEvent& event) {
  if (event.empty()) return session;
  if (event.session_id != session.session_id) {
    throw StateError("turn event for session '" + event.session_id +
                     "' applied to session '" + session.session_id + "'");
  }
  SessionState next = session;
  if (event.turn) {
    next.history.push_back(*event.turn);
    if (event.turn->speaker == Speaker::User) ++next.turn_count;
  }
  if (event.prompt_id) next.used_prompts.insert(*event.prompt_id);
  next.used_facts.insert(event.fact_ids.begin(), event.fact_ids.end());
  next.explored_topics.insert(event.explored_topics.begin(),
                              event.explored_topics.end());
  if (event.engaged_module) ++next.module_turns[*event.engaged_module];
  if (event.flow_turn) ++next.flow_turns[*event.flow_turn];
  if (event.prompted_flow) ++next.flows_prompted[*event.prompted_flow];
  return next;
}

std::vector<std::string> utilized_flows(const SessionState& session) {
  std::vector<std::string> out;
  for (const auto& [flow, turns] : session.flow_turns) {
    if (turns > 2) out.push_back(flow);
  }
  return out;
}

void to_json(nlohmann::json& j, const HistoryTurn& t) {
  j = nlohmann::json{{"speaker", t.speaker == Speaker::User ? "user" : "agent"},
                     {"text", t.text},
                     {"mentions", t.mentions},
                     {"origin", t.origin}};
  if (t.analysis) j["analysis"] = *t.analysis;
}

void from_json(const nlohmann::json& j, HistoryTurn& t) {
  t.speaker = j.at("speaker").get<std::string>() == "user" ? Speaker::User
                                                           : Speaker::Agent;
  t.text = j.at("text").get<std::string>();
  t.mentions = j.value("mentions", std::vector<EntityMention>{});
  t.origin = j.value("origin", "");
  if (j.contains("analysis")) t.analysis = j.at("analysis").get<UtteranceAnalysis>();
}

void to_json(nlohmann::json& j, const FlowState& f) {
  j = nlohmann::json{{"flow_id", f.flow_id},
                     {"node_id", f.node_id},
                     {"visited", f.visited},
                     {"vars", f.vars}};
}

void from_json(const nlohmann::json& j, FlowState& f) {
  f.flow_id = j.at("flow_id").get<std::string>();
  f.node_id = j.at("node_id").get<std::string>();
  f.visited = j.at("visited").get<std::set<std::string>>();
  f.vars = j.at("vars").get<std::map<std::string, std::string>>();
}

void to_json(nlohmann::json& j, const SessionState& s) {
  j = nlohmann::json{{"session_id", s.session_id},
                     {"user_id", s.user_id},
                     {"turn_count", s.turn_count},
                     {"history", s.history},
                     {"flow_visited", s.flow_visited},
                     {"explored_topics", s.explored_topics},
                     {"used_prompts", s.used_prompts},
                     {"used_facts", s.used_facts},
                     {"agent_profile", s.agent_profile},
                     {"expectations", s.expectations},
                     {"pending_clarification", s.pending_clarification},
                     {"pending_stop_confirmation", s.pending_stop_confirmation},
                     {"closed", s.closed},
                     {"rng_seed", s.rng_seed},
                     {"module_turns", s.module_turns},
                     {"flow_turns", s.flow_turns},
                     {"flows_prompted", s.flows_prompted}};
  j["user_name"] = s.user_name ? nlohmann::json(*s.user_name) : nlohmann::json();
  j["activity"] = s.activity ? nlohmann::json{{"module", s.activity->module},
                                               {"data", s.activity->data}}
                             : nlohmann::json();
  j["active_flow"] = s.active_flow ? nlohmann::json(*s.active_flow) : nlohmann::json();
  j["offer"] = s.offer ? nlohmann::json{{"module", s.offer->module},
                                        {"arg", s.offer->arg}}
                       : nlohmann::json();
}

void from_json(const nlohmann::json& j, SessionState& s) {
  s.session_id = j.at("session_id").get<std::string>();
  s.user_id = j.value("user_id", "");
  s.turn_count = j.value("turn_count", 0);
  s.history = j.value("history", std::vector<HistoryTurn>{});
  s.flow_visited =
      j.value("flow_visited", std::map<std::string, std::set<std::string>>{});
  s.explored_topics = j.value("explored_topics", std::set<std::string>{});
  s.used_prompts = j.value("used_prompts", std::set<std::string>{});
  s.used_facts = j.value("used_facts", std::set<std::string>{});
  if (j.contains("agent_profile")) {
    s.agent_profile = j.at("agent_profile").get<OpinionProfile>();
  }
  s.expectations = j.value("expectations", std::vector<std::string>{});
  s.pending_clarification = j.value("pending_clarification", false);
  s.pending_stop_confirmation = j.value("pending_stop_confirmation", false);
  s.closed = j.value("closed", false);
  s.rng_seed = j.value("rng_seed", std::uint64_t{0});
  s.module_turns = j.value("module_turns", std::map<std::string, int>{});
  s.flow_turns = j.value("flow_turns", std::map<std::string, int>{});
  s.flows_prompted = j.value("flows_prompted", std::map<std::string, int>{});
  if (j.contains("user_name") && !j["user_name"].is_null()) {
    s.user_name = j["user_name"].get<std::string>();
  }
  if (j.contains("activity") && !j["activity"].is_null()) {
    s.activity = ActivityState{j["activity"].at("module").get<std::string>(),
                               j["activity"].at("data")};
  }
  if (j.contains("active_flow") && !j["active_flow"].is_null()) {
    s.active_flow = j["active_flow"].get<FlowState>();
  }
  if (j.contains("offer") && !j["offer"].is_null()) {
    s.offer = Offer{j["offer"].at("module").get<std::string>(),
                    j["offer"].at("arg").get<std::string>()};
  }
}

}  // namespace socialbot
