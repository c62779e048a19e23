// socialbot command line: chat, serve, replay, validate flows, ingest, metrics.
#include <csignal>
#include <fstream>
#include <iostream>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "socialbot/engine.hpp"
#include "socialbot/errors.hpp"
#include "socialbot/ltm.hpp"
#include "socialbot/repl.hpp"
#include "socialbot/replay.hpp"
#include "socialbot/service.hpp"
#include "socialbot/text.hpp"

using namespace socialbot;
using nlohmann::json;

namespace {

struct Common {
  std::string data_dir;
  std::string flow_dir;
  std::string ltm_dir;
  std::string config;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json config_section(const Common& c, const char* name) {
  if (c.config.empty()) return json::object();
  auto j = read_json_file(c.config);
  if (!j.is_object()) throw ConfigError(c.config + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (k != "engine" && k != "service") throw ConfigError(c.config + ": unknown section '" + k + "'");
  }
  return j.value(name, json::object());
}

EngineConfig engine_config(const Common& c) {
  auto cfg = EngineConfig::from_json(config_section(c, "engine"));
  if (!c.data_dir.empty()) cfg.data_dir = c.data_dir;
  if (!c.flow_dir.empty()) cfg.flow_dir = c.flow_dir;
  if (!c.ltm_dir.empty()) cfg.ltm_dir = c.ltm_dir;
  return cfg;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--data-dir", c.data_dir, "Resource directory (lexicons, packs, flows)");
  cmd->add_option("--flow-dir", c.flow_dir, "Flow directory (default <data-dir>/flows)");
  cmd->add_option("--ltm-dir", c.ltm_dir, "Long-term memory directory");
  cmd->add_option("--config", c.config, "JSON config with 'engine' and 'service' sections");
}

int cmd_repl(const Common& c, std::uint64_t seed, const std::string& user, bool trace) {
  Engine engine(engine_config(c));
  ReplOptions opt;
  opt.seed = seed;
  opt.user_id = user;
  opt.trace = trace;
  bool tty = isatty(STDIN_FILENO) != 0;
  opt.prompt = tty;
  opt.echo = !tty;
  run_repl(engine, std::cin, std::cout, opt);
  return 0;
}

volatile std::sig_atomic_t g_stop = 0;
void on_signal(int) { g_stop = 1; }

int cmd_serve(const Common& c, HttpOptions http, std::string log_dir, int idle_seconds) {
  auto section = config_section(c, "service");
  for (const auto& [k, v] : section.items()) {
    if (k == "host") {
      if (http.host == "127.0.0.1") http.host = v.get<std::string>();
    } else if (k == "port") {
      if (http.port == 8080) http.port = v.get<int>();
    } else if (k == "ui_dir") {
      if (http.ui_dir.empty()) http.ui_dir = v.get<std::string>();
    } else if (k == "log_dir") {
      if (log_dir.empty()) log_dir = v.get<std::string>();
    } else if (k == "idle_timeout_s") {
      if (idle_seconds < 0) idle_seconds = v.get<int>();
    } else {
      throw ConfigError("service: unknown key '" + k + "'");
    }
  }
  Engine engine(engine_config(c));
  ServiceOptions sopt;
  sopt.log_dir = log_dir;
  if (idle_seconds >= 0) sopt.idle_timeout = std::chrono::seconds(idle_seconds);
  SessionManager sessions(engine, sopt);
  HttpService server(sessions, http);
  int port = server.start();
  std::cout << "listening on http://" << http.host << ":" << port << std::endl;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) ::usleep(100000);
  server.stop();
  return 0;
}

int cmd_replay(const Common& c, const std::vector<std::string>& scripts, const std::string& log_out,
               bool quiet) {
  Engine engine(engine_config(c));
  std::ofstream log;
  if (!log_out.empty()) {
    log.open(log_out);
    if (!log) throw ConfigError("cannot write " + log_out);
  }
  int failed = 0;
  for (const auto& path : scripts) {
    auto script = ReplayScript::load(path);
    auto r = run_replay(engine, script, "replay-" + script.name);
    if (!quiet) std::cout << "== " << script.name << "\n" << r.transcript();
    for (const auto& f : r.failures) {
      std::cout << script.name << ": turn " << f.turn + 1 << ": " << f.message << "\n";
    }
    std::cout << script.name << ": " << (r.ok() ? "ok" : "FAILED") << "\n";
    if (!r.ok()) ++failed;
    for (const auto& e : r.log) log << e.dump() << "\n";
  }
  return failed == 0 ? 0 : 1;
}

int cmd_validate(const Common& c, const std::string& dir, bool as_json) {
  Common base = c;
  Engine engine(engine_config(base));
  auto env = FlowEnvironment::from(engine.resources().functions, engine.modules());
  auto report = check_flows(dir, env);
  if (as_json) {
    json diags = json::array();
    for (const auto& d : report.diagnostics) diags.push_back(d.to_json());
    json flows = json::array();
    for (const auto& f : report.set.flows) flows.push_back(f.id);
    std::cout << json{{"ok", report.ok()}, {"flows", flows}, {"diagnostics", diags}}.dump(2)
              << "\n";
  } else {
    for (const auto& d : report.diagnostics) {
      std::cout << d.file << ":" << d.line << ": " << d.rule << ": " << d.message << "\n";
    }
    std::cout << report.set.size() << " valid flow(s), " << report.diagnostics.size()
              << " problem(s)\n";
  }
  return report.ok() ? 0 : 1;
}

// Accepts JSONL ({"stimulus","response","topic"?,"id"?}) or TSV
// (stimulus<TAB>response[<TAB>topic]).
int cmd_ingest(const std::string& file, const std::string& ltm_dir, const std::string& prefix) {
  if (ltm_dir.empty()) throw ConfigError("--ltm-dir is required");
  std::ifstream in(file);
  if (!in) throw InputError("cannot open " + file);
  LtmStore store(ltm_dir);
  store.register_namespace("turn_corpus");
  std::string line;
  int n = 0, added = 0;
  while (std::getline(in, line)) {
    ++n;
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::string stimulus, response, topic, id;
    if (t[0] == '{') {
      json j;
      try {
        j = json::parse(t);
        stimulus = j.at("stimulus").get<std::string>();
        response = j.at("response").get<std::string>();
        topic = j.value("topic", "");
        id = j.value("id", "");
      } catch (const json::exception& e) {
        throw InputError(file + ":" + std::to_string(n) + ": " + e.what());
      }
    } else {
      auto cols = split(t, '\t');
      if (cols.size() < 2) throw InputError(file + ":" + std::to_string(n) + ": need 2 columns");
      stimulus = trim(cols[0]);
      response = trim(cols[1]);
      if (cols.size() > 2) topic = trim(cols[2]);
    }
    if (stimulus.empty() || response.empty()) {
      throw InputError(file + ":" + std::to_string(n) + ": empty stimulus or response");
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06d", n);
    if (id.empty()) id = prefix + buf;
    store.put({"turn_corpus", id, json{{"stimulus", stimulus}, {"response", response},
                                       {"topic", topic}}, ""});
    ++added;
  }
  std::cout << "ingested " << added << " turn(s) into " << ltm_dir << "/turn_corpus\n";
  return 0;
}

int cmd_metrics(const std::string& path, bool as_json) {
  auto report = compute_metrics(read_turn_logs(path));
  if (as_json) {
    std::cout << report.to_json().dump(2) << "\n";
  } else {
    std::cout << report.to_text();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"socialbot: open-domain social chat engine"};
  app.require_subcommand(1);
  Common common;

  auto* repl = app.add_subcommand("repl", "Chat on the terminal");
  add_common(repl, common);
  std::uint64_t seed = 0;
  std::string user = "repl-user";
  bool trace = false;
  repl->add_option("--seed", seed, "Session seed");
  repl->add_option("--user", user, "User id");
  repl->add_flag("--trace", trace, "Show the scoring trace");

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  add_common(serve, common);
  HttpOptions http;
  std::string ui_dir, log_dir;
  int idle = -1;
  serve->add_option("--host", http.host, "Bind address");
  serve->add_option("--port", http.port, "Port (0 picks one)");
  serve->add_option("--ui-dir", ui_dir, "Static UI directory served at /");
  serve->add_option("--log-dir", log_dir, "Turn log directory");
  serve->add_option("--idle-timeout", idle, "Seconds before an idle session is closed");

  auto* replay = app.add_subcommand("replay", "Run replay scripts and check expectations");
  add_common(replay, common);
  std::vector<std::string> scripts;
  std::string log_out;
  bool quiet = false;
  replay->add_option("scripts", scripts, "Replay script(s)")->required()->check(CLI::ExistingFile);
  replay->add_option("--log-out", log_out, "Write turn logs (JSONL)");
  replay->add_flag("-q,--quiet", quiet, "Only print results");

  auto* validate = app.add_subcommand("validate-flows", "Check flow files");
  add_common(validate, common);
  std::string flow_check_dir;
  bool validate_json = false;
  validate->add_option("dir", flow_check_dir, "Directory of .flow files")
      ->required()
      ->check(CLI::ExistingDirectory);
  validate->add_flag("--json", validate_json, "JSON output");

  auto* ingest = app.add_subcommand("ingest-corpus", "Add conversation turns to the retrieval corpus");
  std::string ingest_file, ingest_ltm, prefix = "ingest";
  ingest->add_option("file", ingest_file, "JSONL or TSV file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--ltm-dir", ingest_ltm, "Long-term memory directory")->required();
  ingest->add_option("--prefix", prefix, "Key prefix");

  auto* metrics = app.add_subcommand("metrics", "Engagement metrics from turn logs");
  std::string logs;
  bool metrics_json = false;
  metrics->add_option("logs", logs, "Log file or directory")->required()->check(CLI::ExistingPath);
  metrics->add_flag("--json", metrics_json, "JSON output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*repl) return cmd_repl(common, seed, user, trace);
    if (*serve) {
      http.ui_dir = ui_dir;
      return cmd_serve(common, http, log_dir, idle);
    }
    if (*replay) return cmd_replay(common, scripts, log_out, quiet);
    if (*validate) return cmd_validate(common, flow_check_dir, validate_json);
    if (*ingest) return cmd_ingest(ingest_file, ingest_ltm, prefix);
    if (*metrics) return cmd_metrics(logs, metrics_json);
  } catch (const FlowLoadError& e) {
    for (const auto& d : e.diagnostics()) {
      std::cerr << d.file << ":" << d.line << ": " << d.rule << ": " << d.message << "\n";
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
