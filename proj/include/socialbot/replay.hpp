#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "socialbot/engine.hpp"

namespace socialbot {

struct TurnExpectation {
  std::optional<std::string> origin;
  std::optional<std::string> equals;    // whole reply
  std::optional<std::string> text;      // ECMAScript regex, searched
  std::optional<std::string> contains;  // literal substring
  std::optional<std::vector<std::string>> expectations;
  std::optional<bool> end_session;
};

struct ReplayTurn {
  AsrInput input;
  std::optional<TurnExpectation> expect;
};

struct ReplayScript {
  std::string name;
  std::uint64_t seed = 0;
  std::string user_id = "replay-user";
  std::vector<ReplayTurn> turns;

  /// {"seed", "user_id", "turns": [{"text"} | {"hypotheses"}, "expect"?]}
  static ReplayScript from_json(const nlohmann::json& j);
  static ReplayScript load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

struct TranscriptLine {
  std::string user;
  std::string agent;
  std::string origin;
};

/// "USER: ..." / "AGENT[origin]: ..." pairs, one line each.
std::string format_transcript(const std::vector<TranscriptLine>& lines);

struct ReplayFailure {
  std::size_t turn = 0;  // 0-based
  std::string message;
};

struct ReplayResult {
  std::vector<TranscriptLine> lines;
  std::vector<nlohmann::json> log;
  std::vector<ReplayFailure> failures;
  bool ended = false;

  bool ok() const { return failures.empty(); }
  std::string transcript() const { return format_transcript(lines); }
};

/// Returns a description of each way `result` misses `expect`.
std::vector<std::string> check_turn(const TurnExpectation& expect, const TurnResult& result);

/// Runs the script in a fresh session. Stops early when the bot ends the
/// session; remaining turns are reported as failures.
ReplayResult run_replay(const Engine& engine, const ReplayScript& script,
                        const std::string& session_id = "replay");

struct EpisodeStats {
  int episodes = 0;
  int turns = 0;
  double mean() const { return episodes == 0 ? 0.0 : static_cast<double>(turns) / episodes; }
};

struct FlowStats {
  int prompted = 0;
  int utilized = 0;
};

struct MetricsReport {
  std::map<std::string, EpisodeStats> modules;
  std::map<std::string, FlowStats> flows;
  std::map<std::string, EpisodeStats> recursive_topics;
  int sessions = 0;
  int turns = 0;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Aggregates turn-log lines. Lines of one session must be contiguous and in
/// turn order; a change of session_id closes every open run.
class MetricsAccumulator {
 public:
  void add(const nlohmann::json& entry);
  MetricsReport finish();

 private:
  void close_module_run();
  void close_topic_run();
  void close_flow_run();

  MetricsReport report_;
  std::optional<std::string> session_;
  std::optional<std::string> run_module_;
  std::optional<std::string> run_topic_;
  int run_len_ = 0;
  int topic_len_ = 0;
  std::optional<std::string> flow_;
  int flow_len_ = 0;
};

MetricsReport compute_metrics(const std::vector<nlohmann::json>& log);

/// Reads every `*.jsonl` file under `path` (or the single file), sorted.
std::vector<nlohmann::json> read_turn_logs(const std::filesystem::path& path);

}  // namespace socialbot
