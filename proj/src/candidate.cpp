#include "socialbot/candidate.hpp"

namespace socialbot {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

nlohmann::json describe(const StateUpdate& update) {
  return std::visit(
      Overloaded{
          [](const SetVar& u) -> nlohmann::json {
            return {{"op", "set_var"}, {"name", u.name}, {"value", u.value}};
          },
          [](const CallFunction& u) -> nlohmann::json {
            return {{"op", "call"}, {"name", u.name}};
          },
          [](const MarkTopicExplored& u) -> nlohmann::json {
            return {{"op", "mark_explored"}, {"topic", u.topic}};
          },
          [](const SetActivity& u) -> nlohmann::json {
            return {{"op", "set_activity"}, {"module", u.state.module}};
          },
          [](const EndActivity&) -> nlohmann::json { return {{"op", "end_activity"}}; },
          [](const SetFlow& u) -> nlohmann::json {
            return {{"op", "set_flow"}, {"flow", u.state.flow_id}, {"node", u.state.node_id}};
          },
          [](const ExitFlow&) -> nlohmann::json { return {{"op", "exit_flow"}}; },
          [](const RecordFact& u) -> nlohmann::json {
            return {{"op", "record_fact"}, {"id", u.id}};
          },
          [](const MakeOffer& u) -> nlohmann::json {
            return {{"op", "offer"}, {"module", u.offer.module}, {"arg", u.offer.arg}};
          },
          [](const RememberName& u) -> nlohmann::json {
            return {{"op", "remember_name"}, {"name", u.name}};
          },
      },
      update);
}

}  // namespace socialbot
