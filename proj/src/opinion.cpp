#include "socialbot/opinion.hpp"

namespace socialbot {

std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::Love: return "Love";
    case Polarity::Like: return "Like";
    case Polarity::Dislike: return "Dislike";
    case Polarity::Hate: return "Hate";
  }
  return "Like";
}

std::optional<Polarity> parse_polarity(std::string_view name) {
  if (name == "Love") return Polarity::Love;
  if (name == "Like") return Polarity::Like;
  if (name == "Dislike") return Polarity::Dislike;
  if (name == "Hate") return Polarity::Hate;
  return std::nullopt;
}

const Opinion* OpinionProfile::find(std::string_view entity) const {
  auto it = opinions.find(std::string(entity));
  return it == opinions.end() ? nullptr : &it->second;
}

const Opinion* OpinionProfile::favorite(std::string_view category) const {
  for (const auto& [id, op] : opinions) {
    if (op.category == category && op.polarity == Polarity::Love) return &op;
  }
  return nullptr;
}

void to_json(nlohmann::json& j, const Opinion& o) {
  j = nlohmann::json{{"entity", o.entity},
                     {"category", o.category},
                     {"polarity", to_string(o.polarity)},
                     {"statement", o.statement},
                     {"justification", o.justification}};
}

void from_json(const nlohmann::json& j, Opinion& o) {
  o.entity = j.at("entity").get<std::string>();
  o.category = j.value("category", "");
  o.polarity =
      parse_polarity(j.at("polarity").get<std::string>()).value_or(Polarity::Like);
  o.statement = j.at("statement").get<std::string>();
  o.justification = j.at("justification").get<std::string>();
}

void to_json(nlohmann::json& j, const OpinionProfile& p) {
  j = nlohmann::json{{"seeded", p.seeded}, {"opinions", nlohmann::json::object()}};
  for (const auto& [id, op] : p.opinions) j["opinions"][id] = op;
}

void from_json(const nlohmann::json& j, OpinionProfile& p) {
  p.seeded = j.value("seeded", false);
  p.opinions.clear();
  if (j.contains("opinions")) {
    for (const auto& [id, op] : j.at("opinions").items()) {
      p.opinions[id] = op.get<Opinion>();
    }
  }
}

}  // namespace socialbot
