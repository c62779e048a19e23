#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socialbot/candidate.hpp"
#include "socialbot/nlu.hpp"
#include "socialbot/packs.hpp"
#include "socialbot/scoring.hpp"
#include "socialbot/session.hpp"
#include "socialbot/types.hpp"

namespace socialbot {

// Module ids.
inline constexpr const char* kOpinions = "opinions";
inline constexpr const char* kQuestionAnswering = "question_answering";
inline constexpr const char* kRetrieval = "retrieval";
inline constexpr const char* kOutOfDomain = "out_of_domain";
inline constexpr const char* kStorytelling = "storytelling";
inline constexpr const char* kRecursive = "recursive";
inline constexpr const char* kHeadlines = "headlines";
inline constexpr const char* kTextAdventure = "text_adventure";
inline constexpr const char* kCityNames = "city_names";
inline constexpr const char* kFastMoney = "fast_money";
inline constexpr const char* kJeopardy = "jeopardy";
inline constexpr const char* kNim = "nim";
inline constexpr const char* kSurvey = "survey";
inline constexpr const char* kRiddles = "riddles";
inline constexpr const char* kWouldYouRather = "wyr";
inline constexpr const char* kDialogueEngine = "dialogue_engine";
inline constexpr const char* kMenu = "menu";

class ModuleRegistry;

/// Everything a module may read while proposing; the session is a frozen
/// snapshot for the whole turn.
struct TurnContext {
  const UtteranceAnalysis& analysis;
  const SessionState& session;
  const Resources& resources;
  const Analyzer& analyzer;
  const ModuleRegistry& modules;
  std::uint64_t turn_seed = 0;

  /// Independent deterministic stream per (session seed, turn, module).
  Rng rng_for(std::string_view module) const;
  const ActivityState* activity(std::string_view module) const;
};

/// An entry the topic menu can offer; `label` is what the user can say back.
struct MenuTopic {
  std::string id;
  std::string label;
};

class DialogueModule {
 public:
  virtual ~DialogueModule() = default;
  virtual std::string id() const = 0;
  /// System-initiative modules hold the conversation while active.
  virtual bool system_initiative() const { return false; }
  virtual std::vector<ResponseCandidate> propose(const TurnContext& ctx) const = 0;
  /// Structured QA from the module's own data while it is active.
  virtual std::optional<ResponseCandidate> answer(const TurnContext&) const {
    return std::nullopt;
  }
  /// Begins the activity (offer accepted, flow delegation, menu choice).
  virtual std::optional<ResponseCandidate> start(const TurnContext&, std::string_view) const {
    return std::nullopt;
  }
  /// Accepted `start` arguments; empty means any argument (or none) is fine.
  virtual std::vector<std::string> start_args() const { return {}; }
  virtual std::vector<MenuTopic> menu_topics() const { return {}; }
};

class ModuleRegistry {
 public:
  void add(std::unique_ptr<DialogueModule> module);
  const DialogueModule* find(std::string_view id) const;
  bool is_system_initiative(std::string_view id) const;
  const std::vector<std::unique_ptr<DialogueModule>>& all() const { return modules_; }
  std::vector<std::string> ids() const;

 private:
  std::vector<std::unique_ptr<DialogueModule>> modules_;
};

/// Registers the built-in modules in collection order. The flow runtime and
/// the out-of-domain fallback are added afterwards by the engine, so the
/// fallback always comes last.
void register_builtin_modules(ModuleRegistry& registry, const Resources& resources);

// Small helpers shared by module implementations.
std::uint64_t stable_hash(std::string_view text);
bool has_any_phrase(const UtteranceAnalysis& a, const std::vector<std::string>& phrases);
bool has_token(const UtteranceAnalysis& a, std::string_view token);
ResponseCandidate prompt_candidate(std::string origin, std::string text, double base,
                                   std::string prompt_id);

}  // namespace socialbot
