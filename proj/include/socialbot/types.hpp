#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace socialbot {

enum class DialogueAct {
  Question,
  Statement,
  Command,
  YesAnswer,
  NoAnswer,
  StopRequest,
  RepeatRequest,
  Greeting,
  Other
};

std::string_view to_string(DialogueAct act);
std::optional<DialogueAct> parse_dialogue_act(std::string_view name);

enum class EntityType { Person, Place, MediaTitle, Concept, Other };

std::string_view to_string(EntityType type);
std::optional<EntityType> parse_entity_type(std::string_view name);

/// How a stop request was phrased. Short forms ("stop", "cancel") are
/// guarded by a confirmation turn while an activity is running.
enum class StopKind { None, Short, Explicit };

struct AsrHypothesis {
  std::string text;
  double score = 1.0;
};

/// ASR n-best list. The first entry is the top hypothesis.
struct AsrInput {
  std::vector<AsrHypothesis> hypotheses;

  static AsrInput from_text(std::string text, double score = 1.0) {
    return AsrInput{{AsrHypothesis{std::move(text), score}}};
  }
};

struct EntityMention {
  std::string surface;
  std::string canonical_id;
  EntityType entity_type = EntityType::Other;
  std::string display;
  std::size_t hypothesis = 0;  // index into AsrInput::hypotheses
  std::size_t begin = 0;       // token span [begin, end) in that hypothesis
  std::size_t end = 0;

  bool operator==(const EntityMention&) const = default;
};

struct UtteranceAnalysis {
  std::string primary_text;
  std::vector<std::string> all_texts;
  std::vector<std::string> tokens;
  std::vector<std::string> content_words;
  DialogueAct dialogue_act = DialogueAct::Other;
  StopKind stop_kind = StopKind::None;
  bool menu_request = false;
  double sentiment = 0.0;
  std::vector<EntityMention> entities;
  std::optional<std::string> topic;
  double asr_mean = 1.0;
  bool needs_clarification = false;
  bool unresolved_reference = false;
  std::optional<std::string> resolved_query;

  bool operator==(const UtteranceAnalysis&) const = default;

  bool has_entity(std::string_view canonical_id) const;
};

void to_json(nlohmann::json& j, const EntityMention& m);
void from_json(const nlohmann::json& j, EntityMention& m);
void to_json(nlohmann::json& j, const UtteranceAnalysis& a);
void from_json(const nlohmann::json& j, UtteranceAnalysis& a);
void to_json(nlohmann::json& j, const AsrInput& input);
void from_json(const nlohmann::json& j, AsrInput& input);

}  // namespace socialbot
