#include <algorithm>

#include "socialbot/flow.hpp"

namespace socialbot {

namespace {

std::string explored_key(const FlowDef& f) { return std::string(kFlowModule) + ":" + f.id; }

std::map<std::string, std::string> render_vars(const FlowDef& f, const FlowState& state,
                                               const TurnContext& ctx) {
  auto vars = state.vars;
  vars["user_text"] = ctx.analysis.primary_text;
  vars["entity"] = ctx.analysis.entities.empty() ? std::string("that")
                                                 : ctx.analysis.entities.front().display;
  vars["topic"] = f.label;
  return vars;
}

// Moves into `node`, running its action. Nullopt when a delegation fails.
std::optional<ResponseCandidate> enter_node(const FlowDef& f, const FlowState& from,
                                            const FlowNode& node, const TurnContext& ctx) {
  FlowState next = from;
  next.flow_id = f.id;
  next.node_id = node.id;
  next.visited.insert(node.id);
  auto vars = render_vars(f, from, ctx);

  std::vector<StateUpdate> posts;
  posts.push_back(SetFlow{next});
  posts.push_back(MarkTopicExplored{explored_key(f)});
  for (const auto& p : node.posts) {
    switch (p.kind) {
      case FlowPost::Kind::Set:
        posts.push_back(SetVar{p.name, render_template(p.value, vars)});
        break;
      case FlowPost::Kind::Call:
        posts.push_back(CallFunction{p.name});
        break;
      case FlowPost::Kind::Explore:
        posts.push_back(MarkTopicExplored{p.name});
        break;
    }
  }

  if (const auto* d = std::get_if<FlowDelegate>(&node.action)) {
    const auto* target = ctx.modules.find(d->module);
    if (!target) return std::nullopt;
    auto c = target->start(ctx, d->arg);
    if (!c) return std::nullopt;
    posts.push_back(ExitFlow{});
    c->postconditions.insert(c->postconditions.begin(), posts.begin(), posts.end());
    c->via = kFlowModule;
    c->flow_id = f.id;
    return c;
  }

  const auto& say = std::get<FlowSay>(node.action);
  auto c = ResponseCandidate::make(kFlowModule, render_template(say.tmpl, vars), kFlowTrigger);
  c.id = "flow:" + f.id + ":" + node.id;
  c.topic = f.topic;
  c.flow_id = f.id;
  c.engaged = true;
  if (node.edges.empty()) {
    posts.push_back(ExitFlow{});
  } else {
    c.expectations = f.expectation_ids(node.id);
  }
  c.postconditions = std::move(posts);
  return c;
}

ResponseCandidate flow_prompt(const FlowDef& f, const TurnContext& ctx, double base) {
  FlowState armed;
  armed.flow_id = f.id;
  if (auto it = ctx.session.flow_visited.find(f.id); it != ctx.session.flow_visited.end()) {
    armed.visited = it->second;
  }
  auto c = prompt_candidate(kFlowModule, render_template(f.prompt, render_vars(f, armed, ctx)),
                            base, "flow:" + f.id);
  c.topic = f.topic;
  c.flow_id = f.id;
  c.flow_prompt = true;
  c.postconditions.push_back(SetFlow{armed});
  c.expectations = f.expectation_ids("");
  return c;
}

FlowState fresh_state(const FlowDef& f, const TurnContext& ctx) {
  FlowState s;
  s.flow_id = f.id;
  if (auto it = ctx.session.flow_visited.find(f.id); it != ctx.session.flow_visited.end()) {
    s.visited = it->second;
  }
  return s;
}

const FlowNode* first_unvisited_subroot(const FlowDef& f, const FlowState& state) {
  auto roots = f.subroots();
  for (const auto& r : roots) {
    if (!state.visited.count(r)) return f.node(r);
  }
  return roots.empty() ? nullptr : f.node(roots.front());
}

class FlowModule : public DialogueModule {
 public:
  explicit FlowModule(std::shared_ptr<const FlowSet> flows) : flows_(std::move(flows)) {}

  std::string id() const override { return kFlowModule; }

  std::vector<std::string> start_args() const override {
    std::vector<std::string> out;
    for (const auto& f : flows_->flows) out.push_back(f.id);
    return out;
  }

  std::vector<MenuTopic> menu_topics() const override {
    std::vector<MenuTopic> out;
    for (const auto& f : flows_->flows) out.push_back({explored_key(f), f.label});
    return out;
  }

  std::optional<ResponseCandidate> start(const TurnContext& ctx,
                                         std::string_view arg) const override {
    const auto* f = flows_->find(arg);
    if (!f) return std::nullopt;
    auto state = fresh_state(*f, ctx);
    if (const auto* n = first_unvisited_subroot(*f, state)) {
      if (auto c = enter_node(*f, state, *n, ctx)) return c;
    }
    return flow_prompt(*f, ctx, kFlowTrigger);
  }

  std::vector<ResponseCandidate> propose(const TurnContext& ctx) const override {
    const auto& a = ctx.analysis;
    if (ctx.session.active_flow) {
      const auto* f = flows_->find(ctx.session.active_flow->flow_id);
      if (!f) return {};
      auto adv = advance_flow(*f, *ctx.session.active_flow, ctx);
      if (auto* e = std::get_if<FlowEmit>(&adv)) return {e->candidate};
      return {};
    }
    std::vector<ResponseCandidate> out;
    for (const auto& f : flows_->flows) {
      if (has_any_phrase(a, f.triggers)) {
        auto state = fresh_state(f, ctx);
        bool entered = false;
        for (const auto& e : f.entries) {
          if (!match_expectation(f.expectations.at(e.expectation), a, ctx.session,
                                 ctx.resources.functions)) {
            continue;
          }
          if (auto c = enter_node(f, state, *f.node(e.target), ctx)) {
            out.push_back(std::move(*c));
            entered = true;
          }
          break;
        }
        if (!entered) out.push_back(flow_prompt(f, ctx, kFlowTrigger));
      } else if (a.topic && a.dialogue_act != DialogueAct::Question &&
                 (*a.topic == f.topic ||
                  std::find(f.adjacent.begin(), f.adjacent.end(), *a.topic) != f.adjacent.end())) {
        out.push_back(flow_prompt(f, ctx, kFlowAdjacent));
      }
    }
    return out;
  }

 private:
  std::shared_ptr<const FlowSet> flows_;
};

}  // namespace

FlowAdvance advance_flow(const FlowDef& f, const FlowState& state, const TurnContext& ctx) {
  const std::vector<FlowEdge>* edges = &f.entries;
  if (!state.node_id.empty()) {
    const auto* n = f.node(state.node_id);
    if (!n) return FlowExit{};
    edges = &n->edges;
  }
  for (const auto& e : *edges) {
    auto it = f.expectations.find(e.expectation);
    if (it == f.expectations.end()) continue;
    if (!match_expectation(it->second, ctx.analysis, ctx.session, ctx.resources.functions)) {
      continue;
    }
    const auto* target = f.node(e.target);
    if (!target) return FlowExit{};
    if (auto c = enter_node(f, state, *target, ctx)) return FlowEmit{std::move(*c)};
    return FlowExit{};
  }
  if (state.node_id.empty() && ctx.analysis.dialogue_act == DialogueAct::YesAnswer) {
    if (const auto* n = first_unvisited_subroot(f, state)) {
      if (auto c = enter_node(f, state, *n, ctx)) return FlowEmit{std::move(*c)};
    }
  }
  return FlowExit{};
}

std::unique_ptr<DialogueModule> make_flow_module(std::shared_ptr<const FlowSet> flows) {
  return std::make_unique<FlowModule>(std::move(flows));
}

}  // namespace socialbot
