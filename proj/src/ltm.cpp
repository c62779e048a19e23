#include "socialbot/ltm.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "socialbot/errors.hpp"

namespace socialbot {

namespace fs = std::filesystem;

std::vector<std::string> default_namespaces() {
  return {"opinions",       "stories",       "facts",          "surveys",
          "turn_corpus",    "flows",         "user_profiles",  "session_summaries",
          "riddles",        "wyr",           "trivia",         "fast_money",
          "cities",         "adventures",    "knowledge_exact", "knowledge_encyclopedia",
          "knowledge_web",  "headlines"};
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

LtmStore::LtmStore(fs::path root) : root_(std::move(root)) {}

void LtmStore::register_namespace(std::string_view ns) {
  if (!valid_key(ns)) throw ConfigError("invalid namespace name '" + std::string(ns) + "'");
  std::lock_guard lock(mutex_);
  namespaces_.emplace(ns);
}

void LtmStore::register_defaults() {
  for (const auto& ns : default_namespaces()) register_namespace(ns);
}

bool LtmStore::has_namespace(std::string_view ns) const {
  std::lock_guard lock(mutex_);
  return namespaces_.find(ns) != namespaces_.end();
}

void LtmStore::require_namespace(std::string_view ns) const {
  if (!has_namespace(ns)) {
    throw StateError("LTM namespace '" + std::string(ns) + "' is not registered");
  }
}

bool LtmStore::valid_key(std::string_view key) {
  if (key.empty() || key.front() == '.') return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
  });
}

fs::path LtmStore::path_for(std::string_view ns, std::string_view key) const {
  if (!valid_key(key)) throw InputError("invalid LTM key '" + std::string(key) + "'");
  return root_ / std::string(ns) / (std::string(key) + ".doc");
}

std::string LtmStore::canonical(const nlohmann::json& doc) {
  // nlohmann's object type is an ordered std::map, so dump() is key-sorted.
  return doc.dump(2) + "\n";
}

std::optional<LtmRecord> LtmStore::get(std::string_view ns, std::string_view key) const {
  require_namespace(ns);
  auto path = path_for(ns, key);
  ++reads_;
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("corrupt LTM document " + path.string() + ": " + e.what());
  }
  LtmRecord record;
  record.ns = doc.value("namespace", std::string(ns));
  record.key = doc.value("key", std::string(key));
  record.payload = doc.value("payload", nlohmann::json());
  record.updated_at = doc.value("updated_at", "");
  return record;
}

void LtmStore::put(LtmRecord record) {
  require_namespace(record.ns);
  auto path = path_for(record.ns, record.key);
  if (record.updated_at.empty()) record.updated_at = utc_timestamp();
  nlohmann::json doc = {{"namespace", record.ns},
                        {"key", record.key},
                        {"payload", record.payload},
                        {"updated_at", record.updated_at}};
  std::string bytes = canonical(doc);

  fs::create_directories(path.parent_path());
  auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(tid) + "." +
         std::to_string(temp_counter_++);

  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) {
    throw StateError("cannot write " + tmp.string() + ": " + std::strerror(errno));
  }
  std::size_t done = 0;
  while (done < bytes.size()) {
    auto n = ::write(fd, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      fs::remove(tmp);
      throw StateError("write failed for " + tmp.string());
    }
    done += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  fs::rename(tmp, path);
  ++writes_;
}

std::vector<std::string> LtmStore::keys(std::string_view ns) const {
  require_namespace(ns);
  std::vector<std::string> out;
  auto dir = root_ / std::string(ns);
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".doc") continue;
    out.push_back(entry.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LtmRecord> LtmStore::load_all(std::string_view ns) const {
  std::vector<LtmRecord> out;
  for (const auto& key : keys(ns)) {
    if (auto rec = get(ns, key)) out.push_back(std::move(*rec));
  }
  return out;
}

}  // namespace socialbot
