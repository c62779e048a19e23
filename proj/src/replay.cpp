#include "socialbot/replay.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>

#include "socialbot/errors.hpp"
#include "socialbot/module.hpp"

namespace socialbot {

namespace {

using nlohmann::json;

AsrInput input_from(const json& t) {
  if (t.contains("hypotheses")) {
    AsrInput in;
    from_json(t.at("hypotheses"), in);
    if (in.hypotheses.empty()) throw InputError("turn has an empty hypotheses list");
    return in;
  }
  if (t.contains("text") && t["text"].is_string()) {
    return AsrInput::from_text(t["text"].get<std::string>());
  }
  throw InputError("turn needs 'text' or 'hypotheses'");
}

}  // namespace

ReplayScript ReplayScript::from_json(const json& j) {
  if (!j.is_object()) throw InputError("replay script must be an object");
  ReplayScript s;
  s.name = j.value("name", "");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) throw InputError("'seed' must be an integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  s.user_id = j.value("user_id", s.user_id);
  if (!j.contains("turns") || !j["turns"].is_array()) throw InputError("'turns' must be a list");
  for (std::size_t i = 0; i < j["turns"].size(); ++i) {
    const auto& t = j["turns"][i];
    ReplayTurn turn;
    try {
      turn.input = input_from(t);
    } catch (const json::exception& e) {
      throw InputError("turn " + std::to_string(i) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("turn " + std::to_string(i) + ": " + e.what());
    }
    if (t.contains("expect")) {
      const auto& e = t["expect"];
      TurnExpectation x;
      if (e.contains("origin")) x.origin = e["origin"].get<std::string>();
      if (e.contains("equals")) x.equals = e["equals"].get<std::string>();
      if (e.contains("text")) x.text = e["text"].get<std::string>();
      if (e.contains("contains")) x.contains = e["contains"].get<std::string>();
      if (e.contains("expectations")) {
        x.expectations = e["expectations"].get<std::vector<std::string>>();
      }
      if (e.contains("end_session")) x.end_session = e["end_session"].get<bool>();
      turn.expect = std::move(x);
    }
    s.turns.push_back(std::move(turn));
  }
  return s;
}

ReplayScript ReplayScript::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open replay script " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  auto s = from_json(j);
  if (s.name.empty()) s.name = path.stem().string();
  return s;
}

json ReplayScript::to_json() const {
  json turns = json::array();
  for (const auto& t : this->turns) {
    json jt = {{"hypotheses", json(t.input)}};
    if (t.expect) {
      json e = json::object();
      if (t.expect->origin) e["origin"] = *t.expect->origin;
      if (t.expect->equals) e["equals"] = *t.expect->equals;
      if (t.expect->text) e["text"] = *t.expect->text;
      if (t.expect->contains) e["contains"] = *t.expect->contains;
      if (t.expect->expectations) e["expectations"] = *t.expect->expectations;
      if (t.expect->end_session) e["end_session"] = *t.expect->end_session;
      jt["expect"] = e;
    }
    turns.push_back(std::move(jt));
  }
  return {{"name", name}, {"seed", seed}, {"user_id", user_id}, {"turns", turns}};
}

std::string format_transcript(const std::vector<TranscriptLine>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += "USER: " + l.user + "\n";
    out += "AGENT[" + l.origin + "]: " + l.agent + "\n";
  }
  return out;
}

std::vector<std::string> check_turn(const TurnExpectation& expect, const TurnResult& result) {
  std::vector<std::string> out;
  if (expect.origin && result.response.origin != *expect.origin) {
    out.push_back("origin: expected " + *expect.origin + ", got " + result.response.origin);
  }
  if (expect.equals && result.reply != *expect.equals) {
    out.push_back("text: expected \"" + *expect.equals + "\", got \"" + result.reply + "\"");
  }
  if (expect.text && !std::regex_search(result.reply, std::regex(*expect.text))) {
    out.push_back("text: /" + *expect.text + "/ does not match \"" + result.reply + "\"");
  }
  if (expect.contains && result.reply.find(*expect.contains) == std::string::npos) {
    out.push_back("text: missing \"" + *expect.contains + "\" in \"" + result.reply + "\"");
  }
  if (expect.expectations && *expect.expectations != result.expectations) {
    out.push_back("expectations: expected " + json(*expect.expectations).dump() + ", got " +
                  json(result.expectations).dump());
  }
  if (expect.end_session && *expect.end_session != result.end_session) {
    out.push_back(std::string("end_session: expected ") +
                  (*expect.end_session ? "true" : "false"));
  }
  return out;
}

ReplayResult run_replay(const Engine& engine, const ReplayScript& script,
                        const std::string& session_id) {
  ReplayResult r;
  auto state = engine.open_session(session_id, script.user_id, script.seed);
  for (std::size_t i = 0; i < script.turns.size(); ++i) {
    const auto& turn = script.turns[i];
    if (state.closed) {
      r.failures.push_back({i, "session already ended"});
      break;
    }
    auto res = engine.process_turn(state, turn.input);
    r.lines.push_back({turn.input.hypotheses.front().text, res.reply, res.response.origin});
    r.log.push_back(res.log_entry(turn.input));
    if (turn.expect) {
      for (auto& m : check_turn(*turn.expect, res)) r.failures.push_back({i, std::move(m)});
    }
    state = std::move(res.new_state);
    if (res.end_session) {
      r.ended = true;
      state.closed = true;
    }
  }
  return r;
}

void MetricsAccumulator::close_module_run() {
  if (run_module_ && run_len_ > 0) {
    auto& m = report_.modules[*run_module_];
    m.episodes++;
    m.turns += run_len_;
  }
  run_module_.reset();
  run_len_ = 0;
}

void MetricsAccumulator::close_topic_run() {
  if (run_topic_ && topic_len_ > 0) {
    auto& t = report_.recursive_topics[*run_topic_];
    t.episodes++;
    t.turns += topic_len_;
  }
  run_topic_.reset();
  topic_len_ = 0;
}

void MetricsAccumulator::close_flow_run() {
  if (flow_ && flow_len_ > 2) report_.flows[*flow_].utilized++;
  flow_.reset();
  flow_len_ = 0;
}

void MetricsAccumulator::add(const json& e) {
  auto opt = [&](const char* k) -> std::optional<std::string> {
    if (!e.contains(k) || !e[k].is_string()) return std::nullopt;
    return e[k].get<std::string>();
  };
  auto session = opt("session_id").value_or("");
  if (!session_ || *session_ != session) {
    close_module_run();
    close_topic_run();
    close_flow_run();
    session_ = session;
    report_.sessions++;
  }
  report_.turns++;

  auto engaged = opt("engaged_module");
  auto activity = opt("activity");
  std::optional<std::string> topic;
  if (e.contains("winner") && e["winner"].contains("topic") && e["winner"]["topic"].is_string()) {
    topic = e["winner"]["topic"].get<std::string>();
  }

  // Turns outside any module (menus, re-routes) neither count nor break a
  // run while the same activity is still open.
  if (engaged) {
    if (run_module_ != engaged) close_module_run();
    run_module_ = engaged;
    run_len_++;
    if (*engaged == kRecursive && topic) {
      if (run_topic_ != topic) close_topic_run();
      run_topic_ = topic;
      topic_len_++;
    } else {
      close_topic_run();
    }
  } else if (!activity || activity != run_module_) {
    close_module_run();
    close_topic_run();
  }

  if (auto p = opt("prompted_flow")) report_.flows[*p].prompted++;
  auto ft = opt("flow_turn");
  if (ft) {
    if (flow_ != ft) close_flow_run();
    flow_ = ft;
    flow_len_++;
  } else if (!opt("flow")) {
    close_flow_run();
  }
}

MetricsReport MetricsAccumulator::finish() {
  close_module_run();
  close_topic_run();
  close_flow_run();
  return report_;
}

MetricsReport compute_metrics(const std::vector<json>& log) {
  MetricsAccumulator acc;
  for (const auto& e : log) acc.add(e);
  return acc.finish();
}

json MetricsReport::to_json() const {
  json mods = json::object();
  for (const auto& [k, v] : modules) {
    mods[k] = {{"episodes", v.episodes}, {"turns", v.turns}, {"mean_turns", v.mean()}};
  }
  json fl = json::object();
  for (const auto& [k, v] : flows) fl[k] = {{"prompted", v.prompted}, {"utilized", v.utilized}};
  json rt = json::object();
  for (const auto& [k, v] : recursive_topics) {
    rt[k] = {{"episodes", v.episodes}, {"turns", v.turns}, {"mean_turns", v.mean()}};
  }
  return {{"sessions", sessions}, {"turns", turns}, {"modules", mods}, {"flows", fl},
          {"recursive_topics", rt}};
}

std::string MetricsReport::to_text() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "sessions " << sessions << ", turns " << turns << "\n\n";
  out << std::left << std::setw(24) << "module" << std::right << std::setw(10) << "episodes"
      << std::setw(8) << "turns" << std::setw(8) << "mean" << "\n";
  for (const auto& [k, v] : modules) {
    out << std::left << std::setw(24) << k << std::right << std::setw(10) << v.episodes
        << std::setw(8) << v.turns << std::setw(8) << v.mean() << "\n";
  }
  out << "\n" << std::left << std::setw(24) << "flow" << std::right << std::setw(10)
      << "prompted" << std::setw(10) << "utilized" << "\n";
  for (const auto& [k, v] : flows) {
    out << std::left << std::setw(24) << k << std::right << std::setw(10) << v.prompted
        << std::setw(10) << v.utilized << "\n";
  }
  out << "\n" << std::left << std::setw(24) << "recursive topic" << std::right << std::setw(10)
      << "episodes" << std::setw(8) << "turns" << std::setw(8) << "mean" << "\n";
  for (const auto& [k, v] : recursive_topics) {
    out << std::left << std::setw(24) << k << std::right << std::setw(10) << v.episodes
        << std::setw(8) << v.turns << std::setw(8) << v.mean() << "\n";
  }
  return out.str();
}

std::vector<json> read_turn_logs(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else if (fs::exists(path)) {
    files.push_back(path);
  } else {
    throw InputError("no such log path: " + path.string());
  }
  std::vector<json> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        out.push_back(json::parse(line));
      } catch (const json::parse_error& e) {
        throw InputError(f.string() + ":" + std::to_string(n) + ": " + e.what());
      }
    }
  }
  return out;
}

}  // namespace socialbot
