#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "socialbot/candidate.hpp"
#include "socialbot/errors.hpp"
#include "socialbot/expectation.hpp"
#include "socialbot/module.hpp"

namespace socialbot {

struct FlowSay {
  std::string tmpl;  // {var} placeholders
};

struct FlowDelegate {
  std::string module;
  std::string arg;
};

using FlowAction = std::variant<std::monostate, FlowSay, FlowDelegate>;

struct FlowEdge {
  std::string expectation;
  std::string target;
  int line = 0;
};

/// Node postconditions: `set`, `call` and `explore` lines.
struct FlowPost {
  enum class Kind { Set, Call, Explore } kind = Kind::Set;
  std::string name;
  std::string value;  // template for Set
  int line = 0;
};

struct FlowNode {
  std::string id;
  FlowAction action;
  int action_count = 0;
  int action_line = 0;
  std::vector<FlowPost> posts;
  std::vector<FlowEdge> edges;
  int line = 0;
};

struct FlowDef {
  std::string id;
  std::string topic;
  std::string label;
  std::vector<std::string> adjacent;
  std::vector<std::string> triggers;
  std::string prompt;
  std::vector<FlowEdge> entries;  // root edges; their targets are the subroots
  std::vector<FlowNode> nodes;    // declaration order
  std::map<std::string, Expectation> expectations;
  std::map<std::string, int> expectation_lines;
  std::string file;
  int line = 0;

  const FlowNode* node(std::string_view id) const;
  std::vector<std::string> subroots() const;
  /// Published after the agent speaks at `node_id` (root when empty).
  std::vector<std::string> expectation_ids(std::string_view node_id) const;
};

struct FlowDiagnostic {
  std::string file;
  int line = 0;
  std::string rule;
  std::string message;

  nlohmann::json to_json() const;
};

/// Placeholders always bound at render time.
inline const std::set<std::string> kBuiltinFlowVars = {"user_text", "entity", "topic"};

std::set<std::string> template_vars(std::string_view tmpl);
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars);

/// Parses one flow document. Syntax problems are appended to `diags`;
/// returns nullopt when the document could not be read at all.
std::optional<FlowDef> parse_flow(std::string_view text, const std::string& file,
                                  std::vector<FlowDiagnostic>& diags);

/// What the validator needs to know about the running system.
struct FlowEnvironment {
  const FunctionRegistry* functions = nullptr;
  /// module id -> accepted start args (empty = any)
  std::map<std::string, std::vector<std::string>> modules;

  static FlowEnvironment from(const FunctionRegistry& functions, const ModuleRegistry& modules);
};

std::vector<FlowDiagnostic> validate_flow(const FlowDef& flow, const FlowEnvironment& env);

class FlowSet {
 public:
  std::vector<FlowDef> flows;

  const FlowDef* find(std::string_view id) const;
  std::size_t size() const { return flows.size(); }
};

struct FlowLoadReport {
  FlowSet set;
  std::vector<FlowDiagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

/// Parses and validates every `*.flow` file under `dir` (sorted by name).
FlowLoadReport check_flows(const std::filesystem::path& dir, const FlowEnvironment& env);

class FlowLoadError : public ConfigError {
 public:
  explicit FlowLoadError(std::vector<FlowDiagnostic> diags);
  const std::vector<FlowDiagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<FlowDiagnostic> diags_;
};

/// `check_flows`, throwing FlowLoadError listing every violation.
FlowSet load_flows(const std::filesystem::path& dir, const FlowEnvironment& env);

struct FlowEmit {
  ResponseCandidate candidate;
};
struct FlowExit {};
using FlowAdvance = std::variant<FlowEmit, FlowExit>;

/// One step of an active flow: first matching edge wins; no match exits.
FlowAdvance advance_flow(const FlowDef& flow, const FlowState& state, const TurnContext& ctx);

std::unique_ptr<DialogueModule> make_flow_module(std::shared_ptr<const FlowSet> flows);

inline constexpr double kFlowTrigger = 1.0;
inline constexpr double kFlowAdjacent = 0.6;

}  // namespace socialbot
