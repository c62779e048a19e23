#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "socialbot/flow.hpp"
#include "socialbot/ltm.hpp"
#include "socialbot/module.hpp"
#include "socialbot/nlu.hpp"
#include "socialbot/packs.hpp"
#include "socialbot/scoring.hpp"

namespace socialbot {

struct EngineConfig {
  std::filesystem::path data_dir = default_resource_dir();
  std::filesystem::path flow_dir;  // empty: <data_dir>/flows
  std::filesystem::path ltm_dir;   // empty: nothing persisted
  double clarification_threshold = kDefaultClarificationThreshold;
  ScoringConfig scoring;
  std::size_t menu_size = 3;
  std::size_t opener_window = 2;

  /// Keys missing from `j` keep their defaults; unknown keys are rejected.
  static EngineConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct TurnResult {
  ResponseCandidate response;
  std::string reply;
  std::string reply_marked;
  SessionState new_state;
  std::vector<std::string> expectations;
  bool end_session = false;
  bool flow_exited = false;
  std::optional<std::string> prompted_flow;
  std::vector<ScoreTrace> trace;
  UtteranceAnalysis analysis;
  std::vector<std::string> warnings;

  /// One structured turn-log line: input, pool with scoring trace, winner,
  /// expectations and the engagement bookkeeping the metrics need.
  nlohmann::json log_entry(const AsrInput& input) const;
};

class Engine {
 public:
  explicit Engine(EngineConfig config);

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Loads the user's profile from LTM, or seeds and keeps it for later.
  SessionState open_session(std::string session_id, std::string user_id,
                            std::uint64_t seed) const;

  /// Runs one user turn against a session snapshot. Never touches LTM.
  TurnResult process_turn(const SessionState& session, const AsrInput& input) const;

  /// Writes the session summary and the user's profile to LTM and marks the
  /// session closed. A second call does nothing.
  void end_session(SessionState& session) const;

  const EngineConfig& config() const { return config_; }
  const Resources& resources() const { return *resources_; }
  const ModuleRegistry& modules() const { return modules_; }
  const FlowSet& flows() const { return *flows_; }
  const Analyzer& analyzer() const { return *analyzer_; }
  LtmStore* ltm() const { return ltm_.get(); }

 private:
  EngineConfig config_;
  std::unique_ptr<LtmStore> ltm_;
  std::shared_ptr<const Resources> resources_;
  std::shared_ptr<const FlowSet> flows_;
  std::unique_ptr<Analyzer> analyzer_;
  ModuleRegistry modules_;
};

/// Key under which a user's profile is stored.
std::string profile_key(std::string_view user_id);

}  // namespace socialbot
