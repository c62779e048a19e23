#include "socialbot/service.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include <httplib.h>

namespace socialbot {

namespace {

using nlohmann::json;

std::uint64_t random_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

json error_body(std::string_view code, std::string_view message, json fields = json::array()) {
  return {{"error", {{"code", code}, {"message", message}, {"fields", std::move(fields)}}}};
}

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

struct BadRequest {
  std::string message;
  json fields;
};

json parse_body(const httplib::Request& req, bool allow_empty) {
  if (req.body.empty() || req.body.find_first_not_of(" \t\r\n") == std::string::npos) {
    if (allow_empty) return json::object();
    throw BadRequest{"request body is required", json::array()};
  }
  json j;
  try {
    j = json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw BadRequest{std::string("malformed JSON: ") + e.what(), json::array()};
  }
  if (!j.is_object()) throw BadRequest{"body must be a JSON object", json::array()};
  return j;
}

AsrInput parse_turn(const json& j) {
  json fields = json::array();
  for (const auto& [k, v] : j.items()) {
    if (k != "hypotheses" && k != "text") {
      fields.push_back({{"field", k}, {"problem", "unknown field"}});
    }
  }
  AsrInput input;
  if (j.contains("hypotheses")) {
    try {
      from_json(j["hypotheses"], input);
      if (input.hypotheses.empty()) {
        fields.push_back({{"field", "hypotheses"}, {"problem", "must not be empty"}});
      }
    } catch (const InputError& e) {
      fields.push_back({{"field", "hypotheses"}, {"problem", e.what()}});
    }
  } else if (j.contains("text")) {
    if (!j["text"].is_string()) {
      fields.push_back({{"field", "text"}, {"problem", "expected a string"}});
    } else {
      input = AsrInput::from_text(j["text"].get<std::string>());
    }
  } else {
    fields.push_back({{"field", "hypotheses"}, {"problem", "required"}});
  }
  if (!fields.empty()) throw BadRequest{"invalid turn body", fields};
  return input;
}

}  // namespace

SessionManager::SessionManager(const Engine& engine, ServiceOptions options)
    : engine_(engine), options_(std::move(options)) {
  if (!options_.seed_source) options_.seed_source = random_seed;
  if (!options_.log_dir.empty()) std::filesystem::create_directories(options_.log_dir);
}

SessionManager::~SessionManager() { shutdown(); }

std::string SessionManager::fresh_id() {
  char buf[32];
  std::uint64_t r = random_seed() ^ (++id_counter_ * 0x9E3779B97F4A7C15ULL);
  std::snprintf(buf, sizeof(buf), "s%016" PRIx64, r);
  return buf;
}

SessionManager::Created SessionManager::create(std::optional<std::string> user_id,
                                               std::optional<std::uint64_t> seed) {
  Created out;
  out.seed = seed ? *seed : options_.seed_source();
  std::lock_guard lock(mutex_);
  do {
    out.session_id = fresh_id();
  } while (sessions_.count(out.session_id));
  out.user_id = user_id.value_or("anon-" + out.session_id);
  auto live = std::make_shared<Live>();
  live->state = engine_.open_session(out.session_id, out.user_id, out.seed);
  live->last_active = Clock::now();
  sessions_[out.session_id] = live;
  return out;
}

std::shared_ptr<SessionManager::Live> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound("no session '" + id + "'");
  return it->second;
}

TurnResult SessionManager::turn(const std::string& session_id, const AsrInput& input) {
  auto live = find(session_id);
  std::unique_lock turn_lock(live->turn_mutex, std::try_to_lock);
  if (!turn_lock.owns_lock()) {
    throw TurnConflict("a turn is already in progress on session '" + session_id + "'");
  }
  if (live->state.closed) throw SessionNotFound("no session '" + session_id + "'");
  auto result = engine_.process_turn(live->state, input);
  live->state = result.new_state;
  live->last_active = Clock::now();
  append_log(session_id, result.log_entry(input));
  if (result.end_session) {
    finish(*live);
    std::lock_guard lock(mutex_);
    sessions_.erase(session_id);
  }
  return result;
}

json SessionManager::summary(const std::string& session_id) const {
  auto live = find(session_id);
  std::lock_guard turn_lock(live->turn_mutex);
  const auto& s = live->state;
  json history = json::array();
  for (const auto& t : s.history) {
    history.push_back({{"speaker", t.speaker == Speaker::User ? "user" : "agent"},
                       {"text", t.text},
                       {"origin", t.origin}});
  }
  return {{"session_id", s.session_id},
          {"user_id", s.user_id},
          {"seed", s.rng_seed},
          {"turn_count", s.turn_count},
          {"active_module", s.active_module() ? json(*s.active_module()) : json()},
          {"activity", s.activity ? json(s.activity->module) : json()},
          {"flow", s.active_flow ? json(*s.active_flow) : json()},
          {"expectations", s.expectations},
          {"explored_topics", s.explored_topics},
          {"module_turns", s.module_turns},
          {"flow_turns", s.flow_turns},
          {"history", history}};
}

void SessionManager::finish(Live& live) {
  if (!live.state.closed) engine_.end_session(live.state);
}

void SessionManager::close(const std::string& session_id) {
  auto live = find(session_id);
  std::unique_lock turn_lock(live->turn_mutex, std::try_to_lock);
  if (!turn_lock.owns_lock()) {
    throw TurnConflict("a turn is in progress on session '" + session_id + "'");
  }
  finish(*live);
  std::lock_guard lock(mutex_);
  sessions_.erase(session_id);
}

std::size_t SessionManager::sweep(Clock::time_point now) {
  std::vector<std::pair<std::string, std::shared_ptr<Live>>> idle;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [id, live] : sessions_) {
      std::unique_lock turn_lock(live->turn_mutex, std::try_to_lock);
      if (!turn_lock.owns_lock()) continue;
      if (now - live->last_active > options_.idle_timeout) idle.emplace_back(id, live);
    }
  }
  std::size_t n = 0;
  for (auto& [id, live] : idle) {
    std::unique_lock turn_lock(live->turn_mutex, std::try_to_lock);
    if (!turn_lock.owns_lock()) continue;
    finish(*live);
    std::lock_guard lock(mutex_);
    sessions_.erase(id);
    ++n;
  }
  return n;
}

void SessionManager::shutdown() {
  std::map<std::string, std::shared_ptr<Live>> all;
  {
    std::lock_guard lock(mutex_);
    all.swap(sessions_);
  }
  for (auto& [id, live] : all) {
    std::lock_guard turn_lock(live->turn_mutex);
    try {
      finish(*live);
    } catch (const std::exception& e) {
      std::cerr << "failed to close session " << id << ": " << e.what() << "\n";
    }
  }
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

void SessionManager::append_log(const std::string& id, const json& entry) {
  if (options_.log_dir.empty()) return;
  std::lock_guard lock(log_mutex_);
  std::ofstream out(options_.log_dir / (id + ".jsonl"), std::ios::app);
  out << entry.dump() << "\n";
}

json turn_response_json(const TurnResult& r) {
  json trace = json::array();
  for (const auto& t : r.trace) trace.push_back(to_json(t));
  return {{"session_id", r.new_state.session_id},
          {"turn", r.new_state.turn_count},
          {"reply", r.reply},
          {"reply_marked", r.reply_marked},
          {"expectations", r.expectations},
          {"end_session", r.end_session},
          {"origin_module", r.response.origin},
          {"winner_id", r.response.id},
          {"confidence", r.response.confidence},
          {"dialogue_act", to_string(r.analysis.dialogue_act)},
          {"trace", trace}};
}

HttpService::HttpService(SessionManager& sessions, HttpOptions options)
    : sessions_(sessions), options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()) {
  routes();
}

HttpService::~HttpService() { stop(); }

void HttpService::routes() {
  auto& srv = *server_;

  srv.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
    send(res, 200, {{"status", "ok"}});
  });

  srv.Post("/v1/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      auto body = parse_body(req, true);
      json fields = json::array();
      std::optional<std::string> user;
      std::optional<std::uint64_t> seed;
      for (const auto& [k, v] : body.items()) {
        if (k == "user_id") {
          if (v.is_string()) user = v.get<std::string>();
          else fields.push_back({{"field", k}, {"problem", "expected a string"}});
        } else if (k == "seed") {
          if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            seed = v.get<std::uint64_t>();
          } else {
            fields.push_back({{"field", k}, {"problem", "expected a non-negative integer"}});
          }
        } else {
          fields.push_back({{"field", k}, {"problem", "unknown field"}});
        }
      }
      if (!fields.empty()) throw BadRequest{"invalid session body", fields};
      auto c = sessions_.create(user, seed);
      send(res, 201, {{"session_id", c.session_id}, {"user_id", c.user_id}, {"seed", c.seed}});
    } catch (const BadRequest& e) {
      send(res, 400, error_body("bad_request", e.message, e.fields));
    }
  });

  srv.Post(R"(/v1/sessions/([^/]+)/turns)",
           [this](const httplib::Request& req, httplib::Response& res) {
             std::string id = req.matches[1];
             try {
               auto input = parse_turn(parse_body(req, false));
               send(res, 200, turn_response_json(sessions_.turn(id, input)));
             } catch (const BadRequest& e) {
               send(res, 400, error_body("bad_request", e.message, e.fields));
             } catch (const SessionNotFound& e) {
               send(res, 404, error_body("not_found", e.what()));
             } catch (const TurnConflict& e) {
               send(res, 409, error_body("conflict", e.what()));
             }
           });

  srv.Get(R"(/v1/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      send(res, 200, sessions_.summary(req.matches[1]));
    } catch (const SessionNotFound& e) {
      send(res, 404, error_body("not_found", e.what()));
    }
  });

  srv.Delete(R"(/v1/sessions/([^/]+))",
             [this](const httplib::Request& req, httplib::Response& res) {
               std::string id = req.matches[1];
               try {
                 sessions_.close(id);
                 send(res, 200, {{"session_id", id}, {"end_session", true}});
               } catch (const SessionNotFound& e) {
                 send(res, 404, error_body("not_found", e.what()));
               } catch (const TurnConflict& e) {
                 send(res, 409, error_body("conflict", e.what()));
               }
             });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                               std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const InputError& e) {
      send(res, 400, error_body("bad_request", e.what()));
    } catch (const std::exception& e) {
      send(res, 500, error_body("internal", e.what()));
    }
  });

  if (!options_.ui_dir.empty()) srv.set_mount_point("/", options_.ui_dir.string());
}

int HttpService::start() {
  if (options_.port == 0) {
    bound_port_ = server_->bind_to_any_port(options_.host);
  } else if (server_->bind_to_port(options_.host, options_.port)) {
    bound_port_ = options_.port;
  } else {
    bound_port_ = -1;
  }
  if (bound_port_ <= 0) {
    throw ConfigError("cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  sweeper_ = std::thread([this] {
    std::unique_lock lock(sweep_mutex_);
    while (!stopping_) {
      sweep_cv_.wait_for(lock, std::chrono::seconds(5));
      if (stopping_) break;
      lock.unlock();
      sessions_.sweep();
      lock.lock();
    }
  });
  server_->wait_until_ready();
  return bound_port_;
}

void HttpService::stop() {
  {
    std::lock_guard lock(sweep_mutex_);
    if (stopping_) return;
    stopping_ = true;
  }
  sweep_cv_.notify_all();
  server_->stop();
  if (thread_.joinable()) thread_.join();
  if (sweeper_.joinable()) sweeper_.join();
  sessions_.shutdown();
}

}  // namespace socialbot
