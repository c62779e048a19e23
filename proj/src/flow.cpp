#include "socialbot/flow.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <queue>
#include <sstream>

#include "socialbot/text.hpp"

namespace socialbot {

namespace {

bool is_ident(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

// Splits off the first whitespace-delimited word.
std::string_view next_word(std::string_view& rest) {
  std::size_t i = 0;
  while (i < rest.size() && std::isspace(static_cast<unsigned char>(rest[i]))) ++i;
  std::size_t j = i;
  while (j < rest.size() && !std::isspace(static_cast<unsigned char>(rest[j]))) ++j;
  auto w = rest.substr(i, j - i);
  rest = rest.substr(j);
  return w;
}

std::optional<std::string> unquote(std::string_view s) {
  auto t = trim(s);
  if (t.size() < 2 || t.front() != '"' || t.back() != '"') return std::nullopt;
  std::string out;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    if (t[i] == '\\' && i + 2 < t.size()) {
      out += t[++i];
    } else if (t[i] == '"') {
      return std::nullopt;
    } else {
      out += t[i];
    }
  }
  return out;
}

std::string strip_comment(std::string_view line) {
  bool in_q = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && in_q) {
      ++i;
      continue;
    }
    if (line[i] == '"') in_q = !in_q;
    if (line[i] == '#' && !in_q) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

std::vector<std::string> pipe_list(std::string_view rest) {
  std::vector<std::string> out;
  for (const auto& part : split(rest, '|')) {
    auto t = trim(part);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

// Parses "<EXP> -> <target>".
bool parse_arrow(std::string_view rest, FlowEdge& edge) {
  auto pos = rest.find("->");
  if (pos == std::string_view::npos) return false;
  edge.expectation = trim(rest.substr(0, pos));
  edge.target = trim(rest.substr(pos + 2));
  return is_ident(edge.expectation) && is_ident(edge.target);
}

}  // namespace

const FlowNode* FlowDef::node(std::string_view id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

std::vector<std::string> FlowDef::subroots() const {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (std::find(out.begin(), out.end(), e.target) == out.end()) out.push_back(e.target);
  }
  return out;
}

std::vector<std::string> FlowDef::expectation_ids(std::string_view node_id) const {
  const std::vector<FlowEdge>* edges = &entries;
  if (!node_id.empty()) {
    const auto* n = node(node_id);
    if (!n) return {};
    edges = &n->edges;
  }
  std::vector<std::string> out;
  for (const auto& e : *edges) {
    if (std::find(out.begin(), out.end(), e.expectation) == out.end()) {
      out.push_back(e.expectation);
    }
  }
  return out;
}

nlohmann::json FlowDiagnostic::to_json() const {
  return {{"file", file}, {"line", line}, {"rule", rule}, {"message", message}};
}

std::set<std::string> template_vars(std::string_view tmpl) {
  std::set<std::string> out;
  std::size_t pos = 0;
  while ((pos = tmpl.find('{', pos)) != std::string_view::npos) {
    auto end = tmpl.find('}', pos);
    if (end == std::string_view::npos) break;
    out.insert(std::string(tmpl.substr(pos + 1, end - pos - 1)));
    pos = end + 1;
  }
  return out;
}

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& vars) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    auto open = tmpl.find('{', pos);
    auto close = open == std::string_view::npos ? open : tmpl.find('}', open);
    if (close == std::string_view::npos) {
      out += tmpl.substr(pos);
      break;
    }
    out += tmpl.substr(pos, open - pos);
    auto it = vars.find(std::string(tmpl.substr(open + 1, close - open - 1)));
    if (it != vars.end()) out += it->second;
    pos = close + 1;
  }
  return out;
}

std::optional<FlowDef> parse_flow(std::string_view text, const std::string& file,
                                  std::vector<FlowDiagnostic>& diags) {
  FlowDef f;
  f.file = file;
  FlowNode* cur = nullptr;
  bool skip_body = false;  // inside a duplicate node, already reported
  auto err = [&](int line, std::string rule, std::string msg) {
    diags.push_back({file, line, std::move(rule), std::move(msg)});
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    auto line = trim(strip_comment(raw));
    if (line.empty()) continue;
    std::string_view rest = line;
    std::string kw(next_word(rest));
    std::string arg = trim(rest);

    auto need_node = [&]() {
      if (!cur && !skip_body) err(ln, "parse-error", "'" + kw + "' outside a node");
      return cur != nullptr;
    };

    if (kw == "flow") {
      if (!is_ident(arg)) {
        err(ln, "parse-error", "bad flow id '" + arg + "'");
      } else if (!f.id.empty()) {
        err(ln, "parse-error", "second 'flow' line in one file");
      } else {
        f.id = arg;
        f.line = ln;
      }
    } else if (kw == "topic") {
      if (!is_ident(arg)) err(ln, "parse-error", "bad topic '" + arg + "'");
      else f.topic = arg;
    } else if (kw == "label") {
      f.label = unquote(arg).value_or(arg);
    } else if (kw == "adjacent") {
      std::string_view r = arg;
      for (auto w = next_word(r); !w.empty(); w = next_word(r)) f.adjacent.emplace_back(w);
    } else if (kw == "triggers") {
      for (auto& t : pipe_list(arg)) f.triggers.push_back(std::move(t));
      if (f.triggers.empty()) err(ln, "parse-error", "empty trigger list");
    } else if (kw == "prompt") {
      auto q = unquote(arg);
      if (!q) err(ln, "parse-error", "prompt needs a quoted string");
      else f.prompt = *q;
    } else if (kw == "expect") {
      std::string_view r = arg;
      std::string id(next_word(r));
      std::string kind(next_word(r));
      if (!is_ident(id)) {
        err(ln, "parse-error", "bad expectation id '" + id + "'");
        continue;
      }
      Expectation e;
      e.id = id;
      bool ok = true;
      if (kind == "keywords") {
        std::string mode(next_word(r));
        if (mode != "any" && mode != "all") {
          err(ln, "invalid-expectation", "keyword mode must be any or all");
          ok = false;
        }
        KeywordSet ks;
        ks.match_all = mode == "all";
        for (const auto& p : pipe_list(r)) ks.phrases.push_back(tokenize(p));
        e.matcher = ks;
      } else if (kind == "act") {
        auto act = parse_dialogue_act(trim(r));
        if (!act) {
          err(ln, "invalid-expectation", "unknown dialogue act '" + trim(r) + "'");
          ok = false;
        } else {
          e.matcher = DialogueActIs{*act};
        }
      } else if (kind == "sentiment") {
        std::istringstream nums{std::string(r)};
        SentimentRange sr;
        if (!(nums >> sr.lo >> sr.hi)) {
          err(ln, "invalid-expectation", "sentiment needs two numbers");
          ok = false;
        }
        e.matcher = sr;
      } else if (kind == "predicate") {
        auto name = trim(r);
        if (!is_ident(name)) {
          err(ln, "parse-error", "bad predicate name");
          ok = false;
        }
        e.matcher = Predicate{name};
      } else {
        err(ln, "invalid-expectation", "unknown matcher '" + kind + "'");
        ok = false;
      }
      if (f.expectations.count(id)) {
        err(ln, "duplicate-expectation", "expectation '" + id + "' defined twice");
      } else if (ok) {
        f.expectations[id] = e;
        f.expectation_lines[id] = ln;
      } else {
        // Keep the id defined so edges do not also report it as dangling.
        f.expectations[id] = Expectation{id, KeywordSet{{{"\x01"}}, false}, true};
        f.expectation_lines[id] = -ln;
      }
    } else if (kw == "entry") {
      FlowEdge edge;
      edge.line = ln;
      if (!parse_arrow(arg, edge)) err(ln, "parse-error", "expected 'entry EXP -> node'");
      else f.entries.push_back(edge);
    } else if (kw == "node") {
      if (!is_ident(arg)) {
        err(ln, "parse-error", "bad node id '" + arg + "'");
        cur = nullptr;
        continue;
      }
      if (f.node(arg)) {
        err(ln, "duplicate-node", "node '" + arg + "' defined twice");
        skip_body = true;
        cur = nullptr;
        continue;
      }
      skip_body = false;
      f.nodes.push_back(FlowNode{arg, {}, 0, 0, {}, {}, ln});
      cur = &f.nodes.back();
    } else if (kw == "say") {
      if (!need_node()) continue;
      auto q = unquote(arg);
      if (!q) {
        err(ln, "parse-error", "say needs a quoted string");
        continue;
      }
      cur->action = FlowSay{*q};
      cur->action_count++;
      cur->action_line = ln;
    } else if (kw == "delegate") {
      if (!need_node()) continue;
      std::string_view r = arg;
      std::string module(next_word(r));
      if (!is_ident(module)) {
        err(ln, "parse-error", "delegate needs a module id");
        continue;
      }
      cur->action = FlowDelegate{module, trim(r)};
      cur->action_count++;
      cur->action_line = ln;
    } else if (kw == "set") {
      if (!need_node()) continue;
      auto eq = arg.find('=');
      std::string name = eq == std::string::npos ? "" : trim(arg.substr(0, eq));
      if (!is_ident(name)) {
        err(ln, "parse-error", "expected 'set name = value'");
        continue;
      }
      std::string value = trim(arg.substr(eq + 1));
      value = unquote(value).value_or(value);
      cur->posts.push_back({FlowPost::Kind::Set, name, value, ln});
    } else if (kw == "call") {
      if (!need_node()) continue;
      if (!is_ident(arg)) {
        err(ln, "parse-error", "call needs a function name");
        continue;
      }
      cur->posts.push_back({FlowPost::Kind::Call, arg, "", ln});
    } else if (kw == "explore") {
      if (!need_node()) continue;
      if (!is_ident(arg)) {
        err(ln, "parse-error", "explore needs a topic id");
        continue;
      }
      cur->posts.push_back({FlowPost::Kind::Explore, arg, "", ln});
    } else if (kw == "on") {
      if (!need_node()) continue;
      FlowEdge edge;
      edge.line = ln;
      if (!parse_arrow(arg, edge)) err(ln, "parse-error", "expected 'on EXP -> node'");
      else cur->edges.push_back(edge);
    } else {
      err(ln, "parse-error", "unknown directive '" + kw + "'");
    }
  }
  if (f.label.empty()) {
    f.label = f.topic;
    std::replace(f.label.begin(), f.label.end(), '_', ' ');
  }
  return f;
}

FlowEnvironment FlowEnvironment::from(const FunctionRegistry& functions,
                                      const ModuleRegistry& modules) {
  FlowEnvironment env;
  env.functions = &functions;
  for (const auto& m : modules.all()) env.modules[m->id()] = m->start_args();
  return env;
}

std::vector<FlowDiagnostic> validate_flow(const FlowDef& f, const FlowEnvironment& env) {
  std::vector<FlowDiagnostic> out;
  auto err = [&](int line, std::string rule, std::string msg) {
    out.push_back({f.file, line, std::move(rule), std::move(msg)});
  };

  if (f.id.empty()) err(1, "missing-field", "no 'flow <id>' line");
  if (f.topic.empty()) err(f.line, "missing-field", "no 'topic' line");
  if (f.triggers.empty()) err(f.line, "missing-field", "no 'triggers' line");
  if (f.prompt.empty()) err(f.line, "missing-field", "no 'prompt' line");
  if (f.entries.empty()) err(f.line, "missing-field", "no 'entry' edges");

  for (const auto& [id, e] : f.expectations) {
    int line = f.expectation_lines.at(id);
    if (line < 0) continue;  // already reported while parsing
    if (const auto* p = std::get_if<Predicate>(&e.matcher)) {
      if (env.functions && !env.functions->has_predicate(p->name)) {
        err(line, "unknown-function", "predicate '" + p->name + "' is not registered");
      }
      continue;
    }
    if (env.functions) {
      for (const auto& problem : check_expectation(e, *env.functions)) {
        err(line, "invalid-expectation", id + ": " + problem);
      }
    }
  }

  auto check_edge = [&](const FlowEdge& e) {
    if (!f.expectations.count(e.expectation)) {
      err(e.line, "dangling-expectation", "expectation '" + e.expectation + "' is not defined");
    }
    if (!f.node(e.target)) err(e.line, "unknown-node", "node '" + e.target + "' is not defined");
  };
  for (const auto& e : f.entries) check_edge(e);

  for (const auto& n : f.nodes) {
    for (const auto& e : n.edges) check_edge(e);
    if (n.action_count == 0) {
      err(n.line, "empty-action", "node '" + n.id + "' has no say or delegate");
    } else if (n.action_count > 1) {
      err(n.action_line, "parse-error", "node '" + n.id + "' has more than one action");
    }
    if (const auto* d = std::get_if<FlowDelegate>(&n.action)) {
      auto it = env.modules.find(d->module);
      if (it == env.modules.end() || d->module == kFlowModule) {
        err(n.action_line, "unknown-delegate", "module '" + d->module + "' is not registered");
      } else if (!d->arg.empty() && !it->second.empty() &&
                 std::find(it->second.begin(), it->second.end(), d->arg) == it->second.end()) {
        err(n.action_line, "unknown-delegate",
            "module '" + d->module + "' has no entry '" + d->arg + "'");
      }
      if (!n.edges.empty()) {
        err(n.edges.front().line, "parse-error",
            "node '" + n.id + "' delegates, so it cannot have edges");
      }
    }
    for (const auto& p : n.posts) {
      if (p.kind == FlowPost::Kind::Call && env.functions && !env.functions->has_action(p.name)) {
        err(p.line, "unknown-function", "function '" + p.name + "' is not registered");
      }
    }
  }

  // Reachability from the entry edges.
  std::set<std::string> reach;
  std::queue<std::string> todo;
  for (const auto& e : f.entries) {
    if (f.node(e.target) && reach.insert(e.target).second) todo.push(e.target);
  }
  while (!todo.empty()) {
    const auto* n = f.node(todo.front());
    todo.pop();
    for (const auto& e : n->edges) {
      if (f.node(e.target) && reach.insert(e.target).second) todo.push(e.target);
    }
  }
  for (const auto& n : f.nodes) {
    if (!reach.count(n.id)) {
      err(n.line, "unreachable-node", "node '" + n.id + "' cannot be reached from an entry");
    }
  }

  // Definitely-assigned variables: IN(n) is the intersection of OUT over
  // every way into n; the root contributes nothing.
  auto assigned = [&](const FlowNode& n) {
    std::set<std::string> s;
    for (const auto& p : n.posts) {
      if (p.kind == FlowPost::Kind::Set) s.insert(p.name);
      if (p.kind == FlowPost::Kind::Call && env.functions) {
        for (const auto& o : env.functions->action_outputs(p.name)) s.insert(o);
      }
    }
    return s;
  };
  std::set<std::string> universe;
  for (const auto& n : f.nodes) {
    auto a = assigned(n);
    universe.insert(a.begin(), a.end());
  }
  std::map<std::string, std::set<std::string>> in, outv;
  std::map<std::string, std::vector<std::string>> preds;
  std::set<std::string> entry_targets;
  for (const auto& e : f.entries) entry_targets.insert(e.target);
  for (const auto& n : f.nodes) {
    if (!reach.count(n.id)) continue;
    outv[n.id] = universe;
    for (const auto& e : n.edges) {
      if (reach.count(e.target)) preds[e.target].push_back(n.id);
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& n : f.nodes) {
      if (!reach.count(n.id)) continue;
      std::set<std::string> i;
      bool first = true;
      if (entry_targets.count(n.id)) first = false;  // root: empty set
      for (const auto& p : preds[n.id]) {
        if (first) {
          i = outv[p];
          first = false;
        } else {
          std::set<std::string> tmp;
          std::set_intersection(i.begin(), i.end(), outv[p].begin(), outv[p].end(),
                                std::inserter(tmp, tmp.begin()));
          i = std::move(tmp);
        }
      }
      auto o = i;
      auto a = assigned(n);
      o.insert(a.begin(), a.end());
      in[n.id] = i;
      if (o != outv[n.id]) {
        outv[n.id] = std::move(o);
        changed = true;
      }
    }
  }
  auto check_vars = [&](const FlowNode& n, std::string_view tmpl, int line) {
    for (const auto& v : template_vars(tmpl)) {
      if (kBuiltinFlowVars.count(v) || in[n.id].count(v)) continue;
      err(line, "unbound-var", "variable '" + v + "' may be unset in node '" + n.id + "'");
    }
  };
  auto check_prompt = [&]() {
    for (const auto& v : template_vars(f.prompt)) {
      if (!kBuiltinFlowVars.count(v)) err(f.line, "unbound-var", "prompt uses '" + v + "'");
    }
  };
  check_prompt();
  for (const auto& n : f.nodes) {
    if (!reach.count(n.id)) continue;
    if (const auto* s = std::get_if<FlowSay>(&n.action)) check_vars(n, s->tmpl, n.action_line);
    for (const auto& p : n.posts) {
      if (p.kind == FlowPost::Kind::Set) check_vars(n, p.value, p.line);
    }
  }
  return out;
}

const FlowDef* FlowSet::find(std::string_view id) const {
  for (const auto& f : flows) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

FlowLoadReport check_flows(const std::filesystem::path& dir, const FlowEnvironment& env) {
  namespace fs = std::filesystem;
  FlowLoadReport report;
  if (!fs::is_directory(dir)) {
    report.diagnostics.push_back({dir.string(), 0, "parse-error", "flow directory not found"});
    return report;
  }
  std::vector<fs::path> files;
  for (const auto& ent : fs::directory_iterator(dir)) {
    if (ent.is_regular_file() && ent.path().extension() == ".flow") files.push_back(ent.path());
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, std::string> seen;
  for (const auto& path : files) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::vector<FlowDiagnostic> diags;
    auto def = parse_flow(buf.str(), path.filename().string(), diags);
    if (def) {
      auto more = validate_flow(*def, env);
      diags.insert(diags.end(), more.begin(), more.end());
      if (!def->id.empty()) {
        if (auto it = seen.find(def->id); it != seen.end()) {
          diags.push_back({def->file, def->line, "duplicate-flow",
                           "flow '" + def->id + "' already defined in " + it->second});
        } else {
          seen[def->id] = def->file;
        }
      }
    }
    if (diags.empty() && def) {
      report.set.flows.push_back(std::move(*def));
    } else {
      report.diagnostics.insert(report.diagnostics.end(), diags.begin(), diags.end());
    }
  }
  return report;
}

namespace {
std::string summarize(const std::vector<FlowDiagnostic>& diags) {
  std::string s = "flow validation failed:";
  for (const auto& d : diags) {
    s += "\n  " + d.file + ":" + std::to_string(d.line) + ": [" + d.rule + "] " + d.message;
  }
  return s;
}
}  // namespace

FlowLoadError::FlowLoadError(std::vector<FlowDiagnostic> diags)
    : ConfigError(summarize(diags)), diags_(std::move(diags)) {}

FlowSet load_flows(const std::filesystem::path& dir, const FlowEnvironment& env) {
  auto report = check_flows(dir, env);
  if (!report.ok()) throw FlowLoadError(std::move(report.diagnostics));
  return std::move(report.set);
}

}  // namespace socialbot
