#include "socialbot/engine.hpp"

#include <algorithm>
#include <regex>

#include "socialbot/activities.hpp"
#include "socialbot/activity_base.hpp"
#include "socialbot/errors.hpp"
#include "socialbot/mixed.hpp"
#include "socialbot/realization.hpp"
#include "socialbot/text.hpp"

namespace socialbot {

namespace {

const char* kClarify = "Sorry, I didn't quite catch that. Could you say it again?";
const char* kGoodbye = "Okay, it was nice talking with you. Goodbye!";
const char* kConfirmStop = "Do you want to stop talking? Say yes to end our chat, or no to keep going.";
const char* kKeepGoing = "Okay, let's keep going.";
const char* kDecline = "Okay, no problem.";
const char* kFlowHedge = "Anyways,";

ResponseCandidate priority(std::string id, std::string text) {
  auto c = ResponseCandidate::make(kDialogueEngine, std::move(text), 1.0);
  c.id = std::move(id);
  c.is_priority = true;
  return c;
}

std::vector<std::string> menu_ids(const std::vector<std::string>& expectations) {
  std::vector<std::string> out;
  for (const auto& e : expectations) {
    if (e.starts_with("menu:")) out.push_back(e.substr(5));
  }
  return out;
}

std::pair<std::string, std::string> split_topic(const std::string& topic_id) {
  auto pos = topic_id.find(':');
  if (pos == std::string::npos) return {topic_id, ""};
  return {topic_id.substr(0, pos), topic_id.substr(pos + 1)};
}

std::string label_for(const ModuleRegistry& modules, const std::string& topic_id) {
  for (const auto& t : menu_topic_pool(modules)) {
    if (t.id == topic_id) return t.label;
  }
  for (const auto& t : game_menu_topics()) {
    if (t.id == topic_id) return t.label;
  }
  return topic_id;
}

// "my name is sam", "call me sam" -> "Sam".
std::optional<std::string> introduced_name(std::string_view text, const Lexicons& lex) {
  static const std::regex kIntro(R"((?:^|\b)(?:my name is|my name's|call me) ([a-z][a-z'-]*)\s*$)");
  std::string folded = join(tokenize(text), " ");
  std::smatch m;
  if (!std::regex_search(folded, m, kIntro)) return std::nullopt;
  std::string name = m[1].str();
  if (lex.is_stopword(name)) return std::nullopt;
  name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
  return name;
}

ResponseCandidate games_menu(double base) {
  auto games = game_menu_topics();
  auto c = prompt_candidate(kDialogueEngine, menu_sentence(games, "We could play"), base,
                            "menu:games");
  for (const auto& g : games) c.expectations.push_back("menu:" + g.id);
  return c;
}

// The menu entry the user picked, by label words or by ordinal.
std::optional<std::string> menu_choice(const UtteranceAnalysis& a,
                                       const std::vector<std::string>& offered,
                                       const ModuleRegistry& modules, const Lexicons& lex) {
  for (const auto& id : offered) {
    auto words = lex.content_words(tokenize(label_for(modules, id)));
    if (words.empty()) continue;
    bool all = std::all_of(words.begin(), words.end(), [&](const auto& w) {
      return std::find(a.tokens.begin(), a.tokens.end(), w) != a.tokens.end();
    });
    if (all) return id;
  }
  if (auto ord = detail::ordinal_in(a.tokens)) {
    if (*ord == 99 && !offered.empty()) return offered.back();
    if (*ord < offered.size()) return offered[*ord];
  }
  return std::nullopt;
}

std::optional<std::string> started_activity(const ResponseCandidate& c) {
  for (const auto& u : c.postconditions) {
    if (const auto* s = std::get_if<SetActivity>(&u)) return s->state.module;
  }
  return std::nullopt;
}

// Shifts pause offsets after the opener when its length changed.
void shift_pauses(std::vector<SsmlPause>& pauses, std::size_t from, long delta) {
  for (auto& p : pauses) {
    if (p.offset >= from) p.offset = static_cast<std::size_t>(static_cast<long>(p.offset) + delta);
  }
}

}  // namespace

EngineConfig EngineConfig::from_json(const nlohmann::json& j) {
  EngineConfig c;
  static const std::set<std::string> kKeys = {
      "data_dir", "flow_dir", "ltm_dir", "clarification_threshold", "menu_size",
      "opener_window", "scoring"};
  for (const auto& [k, v] : j.items()) {
    if (!kKeys.count(k)) throw ConfigError("unknown config key '" + k + "'");
  }
  try {
    if (j.contains("data_dir")) c.data_dir = j["data_dir"].get<std::string>();
    if (j.contains("flow_dir")) c.flow_dir = j["flow_dir"].get<std::string>();
    if (j.contains("ltm_dir")) c.ltm_dir = j["ltm_dir"].get<std::string>();
    c.clarification_threshold = j.value("clarification_threshold", c.clarification_threshold);
    c.menu_size = j.value("menu_size", c.menu_size);
    c.opener_window = j.value("opener_window", c.opener_window);
    if (j.contains("scoring")) {
      const auto& s = j["scoring"];
      auto& sc = c.scoring;
      sc.incoherence_penalty = s.value("incoherence_penalty", sc.incoherence_penalty);
      sc.repeat_penalty = s.value("repeat_penalty", sc.repeat_penalty);
      sc.sent_len_threshold = s.value("sent_len_threshold", sc.sent_len_threshold);
      sc.sent_len_slope = s.value("sent_len_slope", sc.sent_len_slope);
      sc.sent_len_cap = s.value("sent_len_cap", sc.sent_len_cap);
      sc.word_weight = s.value("word_weight", sc.word_weight);
      sc.entity_weight = s.value("entity_weight", sc.entity_weight);
      if (s.contains("length_penalized_origins")) {
        sc.length_penalized_origins = s["length_penalized_origins"].get<std::set<std::string>>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  if (c.clarification_threshold < 0.0 || c.clarification_threshold > 1.0) {
    throw ConfigError("clarification_threshold must be in [0,1]");
  }
  return c;
}

nlohmann::json EngineConfig::to_json() const {
  return {{"data_dir", data_dir.string()},
          {"flow_dir", flow_dir.string()},
          {"ltm_dir", ltm_dir.string()},
          {"clarification_threshold", clarification_threshold},
          {"menu_size", menu_size},
          {"opener_window", opener_window},
          {"scoring",
           {{"incoherence_penalty", scoring.incoherence_penalty},
            {"repeat_penalty", scoring.repeat_penalty},
            {"sent_len_threshold", scoring.sent_len_threshold},
            {"sent_len_slope", scoring.sent_len_slope},
            {"sent_len_cap", scoring.sent_len_cap},
            {"word_weight", scoring.word_weight},
            {"entity_weight", scoring.entity_weight},
            {"length_penalized_origins", scoring.length_penalized_origins}}}};
}

std::string profile_key(std::string_view user_id) {
  if (LtmStore::valid_key(user_id)) return std::string(user_id);
  char buf[24];
  std::snprintf(buf, sizeof buf, "u%016llx",
                static_cast<unsigned long long>(stable_hash(user_id)));
  return buf;
}

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
  if (!config_.ltm_dir.empty()) {
    ltm_ = std::make_unique<LtmStore>(config_.ltm_dir);
    ltm_->register_defaults();
  }
  resources_ = Resources::load(config_.data_dir, ltm_.get());
  analyzer_ = std::make_unique<Analyzer>(resources_->lexicons, config_.clarification_threshold);
  register_builtin_modules(modules_, *resources_);
  auto env = FlowEnvironment::from(resources_->functions, modules_);
  auto dir = config_.flow_dir.empty() ? resources_->flow_dir() : config_.flow_dir;
  flows_ = std::make_shared<const FlowSet>(load_flows(dir, env));
  modules_.add(make_flow_module(flows_));
  modules_.add(make_out_of_domain_module());
}

SessionState Engine::open_session(std::string session_id, std::string user_id,
                                  std::uint64_t seed) const {
  SessionState s;
  s.session_id = std::move(session_id);
  s.user_id = std::move(user_id);
  s.rng_seed = seed;
  std::optional<LtmRecord> rec;
  if (ltm_ && !s.user_id.empty()) rec = ltm_->get("user_profiles", profile_key(s.user_id));
  if (rec) {
    s.agent_profile = rec->payload.at("profile").get<OpinionProfile>();
    if (rec->payload.contains("user_name") && rec->payload["user_name"].is_string()) {
      s.user_name = rec->payload["user_name"].get<std::string>();
    }
  } else {
    s.agent_profile = seed_profile(*resources_, s.user_id);
  }
  return s;
}

void Engine::end_session(SessionState& session) const {
  if (session.closed) return;
  session.closed = true;
  if (!ltm_) return;
  nlohmann::json summary = {{"session_id", session.session_id},
                            {"user_id", session.user_id},
                            {"turn_count", session.turn_count},
                            {"explored_topics", session.explored_topics},
                            {"module_turns", session.module_turns},
                            {"flow_turns", session.flow_turns},
                            {"flows_prompted", session.flows_prompted},
                            {"utilized_flows", utilized_flows(session)}};
  if (LtmStore::valid_key(session.session_id)) {
    ltm_->put({"session_summaries", session.session_id, summary, ""});
  } else {
    ltm_->put({"session_summaries", profile_key(session.session_id), summary, ""});
  }
  if (!session.user_id.empty()) {
    nlohmann::json profile = {{"user_id", session.user_id}, {"profile", session.agent_profile}};
    if (session.user_name) profile["user_name"] = *session.user_name;
    ltm_->put({"user_profiles", profile_key(session.user_id), profile, ""});
  }
}

TurnResult Engine::process_turn(const SessionState& session, const AsrInput& input) const {
  if (session.closed) throw StateError("session '" + session.session_id + "' is closed");
  const auto& res = *resources_;
  const auto& lex = res.lexicons;

  auto analysis = analyzer_->analyze(input, session);
  analysis = analyzer_->resolve_coreference(analysis, session);

  TurnResult result;
  HistoryTurn user_turn{Speaker::User, analysis.primary_text, analysis, analysis.entities, ""};
  TurnEvent user_event;
  user_event.session_id = session.session_id;
  user_event.turn = user_turn;
  SessionState working = stm_update(session, user_event);
  working.offer.reset();
  working.pending_clarification = false;
  working.pending_stop_confirmation = false;

  // Snapshot the modules see. The previous offer and expectations stay
  // readable through `session`.
  SessionState snapshot = working;
  TurnContext ctx{analysis, snapshot, res, *analyzer_, modules_, session.rng_seed};

  std::vector<ResponseCandidate> pool;
  bool keep_expectations = false;
  bool keep_offer = false;

  // Priority intents.
  if (analysis.needs_clarification && !session.pending_clarification) {
    pool.push_back(priority("clarify", kClarify));
    working.pending_clarification = true;
    keep_expectations = keep_offer = true;
  } else if (session.pending_stop_confirmation &&
             analysis.dialogue_act == DialogueAct::YesAnswer) {
    auto c = priority("stop", kGoodbye);
    c.end_session = true;
    pool.push_back(c);
  } else if (session.pending_stop_confirmation &&
             analysis.dialogue_act == DialogueAct::NoAnswer) {
    std::string prev;
    int seen = 0;
    for (auto it = session.history.rbegin(); it != session.history.rend(); ++it) {
      if (it->speaker == Speaker::Agent && ++seen == 2) {
        prev = it->text;
        break;
      }
    }
    pool.push_back(priority("stop:resume", prev.empty() ? kKeepGoing
                                                        : std::string(kKeepGoing) + " " + prev));
    keep_expectations = true;
  } else if (analysis.stop_kind == StopKind::Explicit ||
             (analysis.stop_kind == StopKind::Short && !session.activity &&
              !session.active_flow)) {
    auto c = priority("stop", kGoodbye);
    c.end_session = true;
    pool.push_back(c);
  } else if (analysis.stop_kind == StopKind::Short) {
    pool.push_back(priority("stop:confirm", kConfirmStop));
    working.pending_stop_confirmation = true;
    keep_expectations = true;
  } else if (analysis.dialogue_act == DialogueAct::RepeatRequest) {
    const auto* last = session.last_agent_turn();
    auto c = priority("repeat", last ? last->text : "I haven't said anything yet.");
    if (last) c.origin = last->origin.empty() ? std::string(kDialogueEngine) : last->origin;
    pool.push_back(c);
    keep_expectations = keep_offer = true;
  } else if (analysis.menu_request) {
    auto c = build_topic_menu(ctx, config_.menu_size);
    c.is_priority = true;
    pool.push_back(c);
  }

  bool flow_exited = false;
  if (pool.empty()) {
    // Offer from the previous turn.
    if (session.offer) {
      const auto& offer = *session.offer;
      if (analysis.dialogue_act == DialogueAct::YesAnswer) {
        if (offer.module == kMenu) {
          pool.push_back(games_menu(1.0));
        } else if (const auto* m = modules_.find(offer.module)) {
          if (auto c = m->start(ctx, offer.arg)) {
            c->base_confidence = c->confidence = 1.0;
            pool.push_back(*c);
          }
        }
      } else if (analysis.dialogue_act == DialogueAct::NoAnswer) {
        auto menu = build_topic_menu(ctx, config_.menu_size, 0.9);
        menu.origin = kDialogueEngine;
        menu.text = std::string(kDecline) + " " + menu.text;
        pool.push_back(menu);
      }
    }

    // Choice from a menu shown last turn.
    if (auto choice = menu_choice(analysis, menu_ids(session.expectations), modules_, lex)) {
      auto [module, arg] = split_topic(*choice);
      if (const auto* m = modules_.find(module)) {
        if (auto c = m->start(ctx, arg)) {
          c->base_confidence = c->confidence = 1.0;
          pool.push_back(*c);
        }
      }
    }

    if (has_any_phrase(analysis, {"play a game", "play games", "play some games", "play a different game",
                                  "what games", "another game"})) {
      pool.push_back(games_menu(0.9));
    }

    if (auto name = introduced_name(analysis.primary_text, lex)) {
      auto c = ResponseCandidate::make(
          kDialogueEngine, "Nice to meet you, " + *name + "! What would you like to talk about?",
          0.9);
      c.id = "name:intro";
      c.postconditions.push_back(RememberName{*name});
      pool.push_back(c);
    } else if (session.turn_count == 0 && session.user_name &&
               analysis.dialogue_act == DialogueAct::Greeting) {
      auto c = ResponseCandidate::make(
          kDialogueEngine,
          "Hi " + *session.user_name + ", welcome back! What would you like to talk about?", 0.9);
      c.id = "name:welcome";
      pool.push_back(c);
    }

    // An active flow that matches no edge exits before collection.
    if (snapshot.active_flow) {
      if (const auto* f = flows_->find(snapshot.active_flow->flow_id)) {
        if (std::holds_alternative<FlowExit>(advance_flow(*f, *snapshot.active_flow, ctx))) {
          flow_exited = true;
          bool at_root = snapshot.active_flow->node_id.empty();
          snapshot.active_flow.reset();
          working.active_flow.reset();
          if (at_root && analysis.dialogue_act == DialogueAct::NoAnswer) {
            auto menu = build_topic_menu(ctx, config_.menu_size, 0.9);
            menu.origin = kDialogueEngine;
            menu.text = std::string(kDecline) + " " + menu.text;
            menu.id = "flow:decline";
            pool.push_back(menu);
          }
        }
      } else {
        snapshot.active_flow.reset();
        working.active_flow.reset();
      }
    }

    for (const auto& m : modules_.all()) {
      auto cands = m->propose(ctx);
      for (auto& c : cands) pool.push_back(std::move(c));
    }
  }
  if (pool.empty()) throw StateError("empty candidate pool");

  std::optional<std::string> active;
  if (snapshot.active_flow) {
    active = kFlowModule;
  } else if (snapshot.activity && modules_.is_system_initiative(snapshot.activity->module)) {
    active = snapshot.activity->module;
  }
  ScoringContext sctx{analysis, active, snapshot.used_prompts, lex, config_.scoring};
  auto score_rng = ctx.rng_for("scoring");
  auto sel = select_response(pool, sctx, score_rng);
  auto winner = sel.winner;

  if (flow_exited && !winner.is_priority && winner.id != "flow:decline" &&
      !winner.text.starts_with("Moving on") && !winner.text.starts_with("Anyway")) {
    auto hedged = with_hedge(kFlowHedge, winner.text, lex);
    shift_pauses(winner.ssml_pauses, 0,
                 static_cast<long>(hedged.size()) - static_cast<long>(winner.text.size()));
    winner.text = std::move(hedged);
  }

  // Realization.
  auto recent = session.recent_agent_texts(config_.opener_window);
  auto real_rng = ctx.rng_for("realization");
  std::string varied = winner.is_priority && winner.id == "repeat"
                           ? winner.text
                           : vary_opener(winner.text, recent, lex, real_rng, config_.opener_window);
  if (varied != winner.text) {
    auto old_open = leading_opener(winner.text, lex);
    long delta = static_cast<long>(varied.size()) - static_cast<long>(winner.text.size());
    shift_pauses(winner.ssml_pauses, old_open ? old_open->length : 0, delta);
    winner.text = varied;
  }
  auto rendered = render_output(winner);

  // Postconditions, applied to the state that follows the realized reply.
  SessionState next = working;
  TurnEvent agent_event;
  agent_event.session_id = session.session_id;
  if (keep_offer) next.offer = session.offer;

  if (!winner.is_priority) {
    auto starts = started_activity(winner);
    bool from_flow = winner.origin == kFlowModule || winner.via == std::string(kFlowModule);
    if (starts && next.activity && next.activity->module != *starts) next.activity.reset();
    if (from_flow && next.activity && !starts) next.activity.reset();
    if (starts && next.active_flow && !from_flow) next.active_flow.reset();
    if (from_flow && next.active_flow && winner.flow_id &&
        next.active_flow->flow_id != *winner.flow_id) {
      next.active_flow.reset();
    }
    if (!from_flow && next.active_flow && next.active_flow->node_id.empty()) {
      // An armed flow prompt that the user did not take up.
      next.active_flow.reset();
    }
  }

  for (const auto& u : winner.postconditions) {
    std::visit(
        [&](const auto& op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, SetVar>) {
            if (next.active_flow) next.active_flow->vars[op.name] = op.value;
          } else if constexpr (std::is_same_v<T, CallFunction>) {
            res.functions.call_action(op.name, next, analysis);
          } else if constexpr (std::is_same_v<T, MarkTopicExplored>) {
            agent_event.explored_topics.push_back(op.topic);
          } else if constexpr (std::is_same_v<T, SetActivity>) {
            next.activity = op.state;
          } else if constexpr (std::is_same_v<T, EndActivity>) {
            next.activity.reset();
          } else if constexpr (std::is_same_v<T, SetFlow>) {
            next.active_flow = op.state;
            auto& v = next.flow_visited[op.state.flow_id];
            v.insert(op.state.visited.begin(), op.state.visited.end());
          } else if constexpr (std::is_same_v<T, ExitFlow>) {
            next.active_flow.reset();
          } else if constexpr (std::is_same_v<T, RecordFact>) {
            agent_event.fact_ids.push_back(op.id);
          } else if constexpr (std::is_same_v<T, MakeOffer>) {
            next.offer = op.offer;
          } else if constexpr (std::is_same_v<T, RememberName>) {
            next.user_name = op.name;
          }
        },
        u);
  }

  if (winner.is_prompt && winner.prompt_id) agent_event.prompt_id = winner.prompt_id;
  if (winner.engaged) agent_event.engaged_module = winner.origin;
  bool flow_cand = winner.flow_id && (winner.origin == kFlowModule ||
                                      winner.via == std::string(kFlowModule));
  if (flow_cand) {
    bool continuing = session.active_flow && session.active_flow->flow_id == *winner.flow_id &&
                      !flow_exited;
    if (!continuing) agent_event.prompted_flow = *winner.flow_id;
    if (!winner.flow_prompt) agent_event.flow_turn = *winner.flow_id;
  }
  HistoryTurn agent_turn;
  agent_turn.speaker = Speaker::Agent;
  agent_turn.text = rendered.plain;
  agent_turn.mentions = analyzer_->find_entities(rendered.plain);
  agent_turn.origin = winner.origin;
  agent_event.turn = agent_turn;
  next = stm_update(next, agent_event);

  next.expectations = keep_expectations ? session.expectations : winner.expectations;

  result.response = winner;
  result.response.text = rendered.plain;
  result.reply = rendered.plain;
  result.reply_marked = rendered.marked;
  result.new_state = std::move(next);
  result.expectations = result.new_state.expectations;
  result.end_session = winner.end_session;
  result.flow_exited = flow_exited;
  result.prompted_flow = agent_event.prompted_flow;
  result.trace = std::move(sel.trace);
  result.analysis = std::move(analysis);
  result.warnings = std::move(rendered.warnings);
  return result;
}

nlohmann::json TurnResult::log_entry(const AsrInput& input) const {
  nlohmann::json pool = nlohmann::json::array();
  for (const auto& t : trace) pool.push_back(to_json(t));
  nlohmann::json j = {
      {"session_id", new_state.session_id},
      {"turn", new_state.turn_count},
      {"input", input},
      {"analysis",
       {{"dialogue_act", to_string(analysis.dialogue_act)},
        {"sentiment", analysis.sentiment},
        {"topic", analysis.topic ? nlohmann::json(*analysis.topic) : nlohmann::json()},
        {"asr_mean", analysis.asr_mean},
        {"primary_text", analysis.primary_text}}},
      {"pool", pool},
      {"winner",
       {{"id", response.id},
        {"origin", response.origin},
        {"via", response.via ? nlohmann::json(*response.via) : nlohmann::json()},
        {"confidence", response.confidence},
        {"priority", response.is_priority},
        {"topic", response.topic ? nlohmann::json(*response.topic) : nlohmann::json()}}},
      {"reply", reply},
      {"reply_marked", reply_marked},
      {"expectations", expectations},
      {"end_session", end_session},
      {"flow_exit", flow_exited},
      {"engaged_module", response.engaged ? nlohmann::json(response.origin) : nlohmann::json()},
      {"activity",
       new_state.activity ? nlohmann::json(new_state.activity->module) : nlohmann::json()},
      {"flow", new_state.active_flow ? nlohmann::json(new_state.active_flow->flow_id)
                                     : nlohmann::json()}};
  bool flow_cand = response.flow_id && (response.origin == kFlowModule ||
                                        response.via == std::string(kFlowModule));
  j["flow_turn"] = flow_cand && !response.flow_prompt ? nlohmann::json(*response.flow_id)
                                                      : nlohmann::json();
  j["prompted_flow"] = prompted_flow ? nlohmann::json(*prompted_flow) : nlohmann::json();
  j["flow_id"] = response.flow_id ? nlohmann::json(*response.flow_id) : nlohmann::json();
  j["flow_prompt"] = response.flow_prompt;
  return j;
}

}  // namespace socialbot
