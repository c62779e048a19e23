#include "socialbot/types.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "socialbot/errors.hpp"

namespace socialbot {

namespace {

constexpr std::array<std::pair<DialogueAct, std::string_view>, 9> kActs = {{
    {DialogueAct::Question, "Question"},
    {DialogueAct::Statement, "Statement"},
    {DialogueAct::Command, "Command"},
    {DialogueAct::YesAnswer, "YesAnswer"},
    {DialogueAct::NoAnswer, "NoAnswer"},
    {DialogueAct::StopRequest, "StopRequest"},
    {DialogueAct::RepeatRequest, "RepeatRequest"},
    {DialogueAct::Greeting, "Greeting"},
    {DialogueAct::Other, "Other"},
}};

constexpr std::array<std::pair<EntityType, std::string_view>, 5> kTypes = {{
    {EntityType::Person, "Person"},
    {EntityType::Place, "Place"},
    {EntityType::MediaTitle, "MediaTitle"},
    {EntityType::Concept, "Concept"},
    {EntityType::Other, "Other"},
}};

}  // namespace

std::string_view to_string(DialogueAct act) {
  for (const auto& [value, name] : kActs) {
    if (value == act) return name;
  }
  return "Other";
}

std::optional<DialogueAct> parse_dialogue_act(std::string_view name) {
  for (const auto& [value, label] : kActs) {
    if (label == name) return value;
  }
  return std::nullopt;
}

std::string_view to_string(EntityType type) {
  for (const auto& [value, name] : kTypes) {
    if (value == type) return name;
  }
  return "Other";
}

std::optional<EntityType> parse_entity_type(std::string_view name) {
  for (const auto& [value, label] : kTypes) {
    if (label == name) return value;
  }
  return std::nullopt;
}

bool UtteranceAnalysis::has_entity(std::string_view canonical_id) const {
  return std::any_of(entities.begin(), entities.end(), [&](const auto& e) {
    return e.canonical_id == canonical_id;
  });
}

void to_json(nlohmann::json& j, const EntityMention& m) {
  j = nlohmann::json{{"surface", m.surface},
                     {"canonical_id", m.canonical_id},
                     {"entity_type", to_string(m.entity_type)},
                     {"display", m.display},
                     {"hypothesis", m.hypothesis},
                     {"span", {m.begin, m.end}}};
}

void from_json(const nlohmann::json& j, EntityMention& m) {
  m.surface = j.at("surface").get<std::string>();
  m.canonical_id = j.at("canonical_id").get<std::string>();
  m.entity_type = parse_entity_type(j.at("entity_type").get<std::string>())
                      .value_or(EntityType::Other);
  m.display = j.value("display", m.surface);
  m.hypothesis = j.value("hypothesis", std::size_t{0});
  const auto& span = j.at("span");
  m.begin = span.at(0).get<std::size_t>();
  m.end = span.at(1).get<std::size_t>();
}

void to_json(nlohmann::json& j, const UtteranceAnalysis& a) {
  j = nlohmann::json{{"primary_text", a.primary_text},
                     {"all_texts", a.all_texts},
                     {"tokens", a.tokens},
                     {"content_words", a.content_words},
                     {"dialogue_act", to_string(a.dialogue_act)},
                     {"sentiment", a.sentiment},
                     {"entities", a.entities},
                     {"asr_mean", a.asr_mean},
                     {"needs_clarification", a.needs_clarification},
                     {"unresolved_reference", a.unresolved_reference}};
  j["topic"] = a.topic ? nlohmann::json(*a.topic) : nlohmann::json();
  if (a.resolved_query) j["resolved_query"] = *a.resolved_query;
}

void from_json(const nlohmann::json& j, UtteranceAnalysis& a) {
  a.primary_text = j.at("primary_text").get<std::string>();
  a.all_texts = j.at("all_texts").get<std::vector<std::string>>();
  a.tokens = j.at("tokens").get<std::vector<std::string>>();
  a.content_words = j.at("content_words").get<std::vector<std::string>>();
  a.dialogue_act = parse_dialogue_act(j.at("dialogue_act").get<std::string>())
                       .value_or(DialogueAct::Other);
  a.sentiment = j.at("sentiment").get<double>();
  a.entities = j.at("entities").get<std::vector<EntityMention>>();
  a.asr_mean = j.at("asr_mean").get<double>();
  a.needs_clarification = j.at("needs_clarification").get<bool>();
  a.unresolved_reference = j.value("unresolved_reference", false);
  if (j.contains("topic") && !j.at("topic").is_null()) {
    a.topic = j.at("topic").get<std::string>();
  }
  if (j.contains("resolved_query")) {
    a.resolved_query = j.at("resolved_query").get<std::string>();
  }
}

void to_json(nlohmann::json& j, const AsrInput& input) {
  j = nlohmann::json::array();
  for (const auto& h : input.hypotheses) {
    j.push_back({{"text", h.text}, {"score", h.score}});
  }
}

void from_json(const nlohmann::json& j, AsrInput& input) {
  if (!j.is_array()) throw InputError("hypotheses: expected an array");
  input.hypotheses.clear();
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& h = j[i];
    if (!h.is_object() || !h.contains("text") || !h["text"].is_string()) {
      throw InputError("hypotheses[" + std::to_string(i) +
                       "].text: expected a string");
    }
    double score = 1.0;
    if (h.contains("score")) {
      if (!h["score"].is_number()) {
        throw InputError("hypotheses[" + std::to_string(i) +
                         "].score: expected a number");
      }
      score = h["score"].get<double>();
    }
    input.hypotheses.push_back({h["text"].get<std::string>(), score});
  }
}

}  // namespace socialbot
