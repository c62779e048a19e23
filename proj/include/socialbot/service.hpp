#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "socialbot/engine.hpp"
#include "socialbot/errors.hpp"

namespace httplib {
class Server;
}

namespace socialbot {

class SessionNotFound : public StateError {
 public:
  using StateError::StateError;
};

/// Another turn is already running on the session.
class TurnConflict : public StateError {
 public:
  using StateError::StateError;
};

struct ServiceOptions {
  std::chrono::milliseconds idle_timeout{std::chrono::minutes(10)};
  std::filesystem::path log_dir;  // empty: no turn logs
  std::function<std::uint64_t()> seed_source;  // default: std::random_device
};

/// Owns live sessions. Turns on different sessions run concurrently; two
/// turns on the same session are rejected with TurnConflict.
class SessionManager {
 public:
  using Clock = std::chrono::steady_clock;

  SessionManager(const Engine& engine, ServiceOptions options = {});
  ~SessionManager();

  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  struct Created {
    std::string session_id;
    std::string user_id;
    std::uint64_t seed = 0;
  };

  Created create(std::optional<std::string> user_id, std::optional<std::uint64_t> seed);
  TurnResult turn(const std::string& session_id, const AsrInput& input);
  nlohmann::json summary(const std::string& session_id) const;
  /// Ends the session: LTM summary, then removal.
  void close(const std::string& session_id);

  /// Ends sessions idle for longer than the timeout; returns how many.
  std::size_t sweep(Clock::time_point now = Clock::now());
  /// Ends every live session.
  void shutdown();

  std::size_t size() const;
  const Engine& engine() const { return engine_; }

 private:
  struct Live {
    std::mutex turn_mutex;
    SessionState state;
    Clock::time_point last_active;
  };

  std::shared_ptr<Live> find(const std::string& id) const;
  void finish(Live& live);
  void append_log(const std::string& id, const nlohmann::json& entry);
  std::string fresh_id();

  const Engine& engine_;
  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Live>> sessions_;
  std::mutex log_mutex_;
  std::uint64_t id_counter_ = 0;
};

/// JSON body for one turn response: reply, expectations and the scoring
/// trace the debug view shows.
nlohmann::json turn_response_json(const TurnResult& result);

struct HttpOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path ui_dir;  // served at / when set
};

/// The /v1 session API over a SessionManager.
class HttpService {
 public:
  HttpService(SessionManager& sessions, HttpOptions options);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds and serves on a background thread. Returns the bound port.
  int start();
  void stop();

 private:
  void routes();

  SessionManager& sessions_;
  HttpOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::thread sweeper_;
  std::mutex sweep_mutex_;
  std::condition_variable sweep_cv_;
  bool stopping_ = false;
  int bound_port_ = 0;
};

}  // namespace socialbot
