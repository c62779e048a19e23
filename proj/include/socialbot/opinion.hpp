#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace socialbot {

enum class Polarity { Love, Like, Dislike, Hate };

std::string_view to_string(Polarity p);
std::optional<Polarity> parse_polarity(std::string_view name);

struct Opinion {
  std::string entity;    // canonical id
  std::string category;  // "film", "color", ...; favorites are looked up by it
  Polarity polarity = Polarity::Like;
  std::string statement;
  std::string justification;

  bool operator==(const Opinion&) const = default;
};

/// The agent's personality: one opinion per entity, chosen once per user.
struct OpinionProfile {
  std::map<std::string, Opinion> opinions;
  bool seeded = false;

  const Opinion* find(std::string_view entity) const;
  /// The Love opinion held for a category, if any.
  const Opinion* favorite(std::string_view category) const;

  bool operator==(const OpinionProfile&) const = default;
};

void to_json(nlohmann::json& j, const Opinion& o);
void from_json(const nlohmann::json& j, Opinion& o);
void to_json(nlohmann::json& j, const OpinionProfile& p);
void from_json(const nlohmann::json& j, OpinionProfile& p);

}  // namespace socialbot
