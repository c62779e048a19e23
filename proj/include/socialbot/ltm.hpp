#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace socialbot {

struct LtmRecord {
  std::string ns;
  std::string key;
  nlohmann::json payload;
  std::string updated_at;  // ISO-8601 UTC; filled on put when empty

  bool operator==(const LtmRecord&) const = default;
};

/// Namespaces the shipped data packs and session teardown use.
std::vector<std::string> default_namespaces();

/// Embedded keyed document store: `<root>/<namespace>/<key>.doc`, one
/// canonical JSON document per key, written via temp file + fsync + rename.
class LtmStore {
 public:
  struct Stats {
    std::size_t reads = 0;
    std::size_t writes = 0;
  };

  explicit LtmStore(std::filesystem::path root);

  LtmStore(const LtmStore&) = delete;
  LtmStore& operator=(const LtmStore&) = delete;

  void register_namespace(std::string_view ns);
  void register_defaults();
  bool has_namespace(std::string_view ns) const;

  std::optional<LtmRecord> get(std::string_view ns, std::string_view key) const;
  void put(LtmRecord record);

  /// Sorted keys present in a namespace.
  std::vector<std::string> keys(std::string_view ns) const;
  std::vector<LtmRecord> load_all(std::string_view ns) const;

  Stats stats() const { return {reads_.load(), writes_.load()}; }
  const std::filesystem::path& root() const { return root_; }

  /// Byte-stable serialization used on disk and for round-trip checks.
  static std::string canonical(const nlohmann::json& doc);
  static bool valid_key(std::string_view key);

 private:
  void require_namespace(std::string_view ns) const;
  std::filesystem::path path_for(std::string_view ns, std::string_view key) const;

  std::filesystem::path root_;
  mutable std::mutex mutex_;
  std::set<std::string, std::less<>> namespaces_;
  mutable std::atomic<std::size_t> reads_{0};
  std::atomic<std::size_t> writes_{0};
  std::atomic<std::size_t> temp_counter_{0};
};

std::string utc_timestamp();

}  // namespace socialbot
