#include "socialbot/repl.hpp"

#include <iomanip>
#include <istream>
#include <ostream>

#include "socialbot/errors.hpp"
#include "socialbot/text.hpp"

namespace socialbot {

AsrInput parse_hypotheses(std::string_view text) {
  AsrInput in;
  for (const auto& part : split(text, ';')) {
    auto item = trim(part);
    if (item.empty()) continue;
    double score = 1.0;
    auto bar = item.rfind('|');
    std::string text = item;
    if (bar != std::string::npos) {
      text = trim(item.substr(0, bar));
      try {
        std::size_t used = 0;
        score = std::stod(item.substr(bar + 1), &used);
      } catch (const std::exception&) {
        throw InputError("bad score in '" + item + "'");
      }
    }
    in.hypotheses.push_back({text, score});
  }
  if (in.hypotheses.empty()) throw InputError("no hypotheses given");
  return in;
}

int run_repl(const Engine& engine, std::istream& in, std::ostream& out, ReplOptions opt) {
  int turns = 0;
  int session_no = 0;
  auto open = [&] {
    return engine.open_session("repl-" + std::to_string(++session_no), opt.user_id, opt.seed);
  };
  auto state = open();
  std::string line;
  while (true) {
    if (opt.prompt) out << "> " << std::flush;
    if (!std::getline(in, line)) break;
    auto cmd = trim(line);
    if (cmd.empty()) continue;

    AsrInput input;
    if (cmd[0] == '/') {
      std::string_view rest = cmd;
      auto space = rest.find(' ');
      std::string name(rest.substr(0, space));
      std::string arg = space == std::string_view::npos ? "" : trim(rest.substr(space + 1));
      if (name == "/quit" || name == "/exit") break;
      if (name == "/seed") {
        try {
          opt.seed = std::stoull(arg);
        } catch (const std::exception&) {
          out << "usage: /seed N\n";
          continue;
        }
        engine.end_session(state);
        state = open();
        out << "(new session, seed " << opt.seed << ")\n";
        continue;
      }
      if (name == "/state") {
        out << nlohmann::json(state).dump(2) << "\n";
        continue;
      }
      if (name == "/trace") {
        opt.trace = !opt.trace;
        out << "(trace " << (opt.trace ? "on" : "off") << ")\n";
        continue;
      }
      if (name == "/hypotheses") {
        try {
          input = parse_hypotheses(arg);
        } catch (const InputError& e) {
          out << "error: " << e.what() << "\n";
          continue;
        }
      } else {
        out << "unknown command " << name << "\n";
        continue;
      }
    } else {
      input = AsrInput::from_text(std::string(cmd));
    }

    if (state.closed) state = open();
    auto res = engine.process_turn(state, input);
    ++turns;
    if (opt.echo) out << "USER: " << input.hypotheses.front().text << "\n";
    out << "AGENT[" << res.response.origin << "]: " << res.reply << "\n";
    if (opt.trace) {
      for (const auto& t : res.trace) {
        out << "  " << std::fixed << std::setprecision(3) << t.final_confidence << "  "
            << t.origin << "  " << t.id << (t.filtered ? "  (filtered)" : "") << "\n";
      }
    }
    state = std::move(res.new_state);
    if (res.end_session) {
      engine.end_session(state);
      out << "(session ended)\n";
    }
  }
  engine.end_session(state);
  return turns;
}

}  // namespace socialbot
