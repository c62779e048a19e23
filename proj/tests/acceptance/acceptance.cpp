// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "socialbot/activities.hpp"
#include "socialbot/engine.hpp"
#include "socialbot/flow.hpp"
#include "socialbot/ltm.hpp"
#include "socialbot/repl.hpp"
#include "socialbot/replay.hpp"
#include "socialbot/retrieval.hpp"
#include "socialbot/scoring.hpp"
#include "socialbot/service.hpp"
#include "socialbot/text.hpp"

namespace fs = std::filesystem;
using namespace socialbot;
using nlohmann::json;

namespace {

const fs::path kFixtures = SOCIALBOT_TEST_FIXTURES;

struct Outcome {
  bool ok = true;
  std::string detail;
  std::vector<std::string> problems;

  void check(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (problems.size() < 8) problems.push_back(what);
    }
  }
};

fs::path scratch_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("socialbot-accept-" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::unique_ptr<Engine> make_engine(const fs::path& ltm = {}, const fs::path& flows = {}) {
  EngineConfig cfg;
  cfg.ltm_dir = ltm;
  cfg.flow_dir = flows;
  return std::make_unique<Engine>(cfg);
}

const ScoreTrace* find_trace(const TurnResult& r, const std::string& id) {
  for (const auto& t : r.trace) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------

Outcome scoring_table() {
  Outcome o;
  auto start = std::chrono::steady_clock::now();
  struct Row {
    double base, context, loss, expected;
  };
  // Expected values worked out by hand.
  const std::vector<Row> rows = {
      {1.0, 0.0, 0.0, 1.0},   {0.6, 0.0, 0.0, 0.6},   {0.6, 0.3, 0.0, 0.6},
      {0.6, 0.75, 0.0, 0.75}, {0.6, 0.75, 0.15, 0.6}, {1.0, 0.0, 0.15, 0.85},
      {1.0, 0.2, 0.05, 0.95}, {0.9, 1.0, 0.0, 1.0},   {0.9, 1.0, 0.05, 0.95},
      {0.4, 0.0, 0.2, 0.2},   {0.3, 0.1, 0.45, 0.0},  {0.7, 0.0, 0.7, 0.0},
      {0.8, 0.5, 0.15, 0.65}, {0.7, 0.9, 0.35, 0.55}, {0.0, 0.0, 0.0, 0.0},
      {0.5, 0.5, 0.0, 0.5},   {0.6, 0.0, 0.2, 0.4},   {1.0, 1.0, 0.0, 1.0},
      {0.9, 0.0, 0.2, 0.7},   {0.7, 0.25, 0.15, 0.55}, {0.2, 0.65, 0.05, 0.6},
      {0.95, 0.0, 0.0, 0.95}, {0.6, 0.6, 0.0, 0.6},   {0.45, 0.3, 0.5, 0.0},
  };
  for (const auto& r : rows) {
    double got = updated_confidence(r.base, r.context, r.loss);
    std::ostringstream msg;
    msg << "(" << r.base << ", " << r.context << ", " << r.loss << ") -> " << got
        << ", expected " << r.expected;
    o.check(std::abs(got - r.expected) <= 1e-9, msg.str());
  }

  // The two anchored pools: a keyword-triggered flow starter at 1.0, and the
  // adjacent-topic starter at 0.6.
  auto engine = make_engine();
  auto s = engine->open_session("anchor", "anchor-user", 1);
  auto games = engine->process_turn(s, AsrInput::from_text("i like video games"));
  const auto* t = find_trace(games, "flow:video_games");
  o.check(t && t->base == 1.0 && t->final_confidence == 1.0,
          "\"i like video games\": video game flow starter not at 1.0");
  o.check(games.response.origin == kFlowModule, "\"i like video games\" not won by the flow");
  auto dogs = engine->process_turn(s, AsrInput::from_text("i like dogs"));
  t = find_trace(dogs, "flow:video_games");
  o.check(t && t->base == 0.6, "\"i like dogs\": video game starter not offered at 0.6");

  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.check(secs < 1.0, "took " + std::to_string(secs) + " s");
  o.detail = std::to_string(rows.size()) + " rows + 2 anchored pools";
  return o;
}

Outcome penalty_constants(const Engine& engine) {
  Outcome o;
  const auto& lex = engine.resources().lexicons;
  auto analysis = engine.analyzer().analyze_text("tell me something about jupiter");

  auto cand = [](std::string origin, std::string text) {
    return ResponseCandidate::make(std::move(origin), std::move(text), 0.5);
  };
  auto plain = cand("retrieval", "I went hiking last weekend.");
  auto own = cand("recursive", "Here is another fact.");
  auto via = cand("storytelling", "It was a dark night.");
  via.via = "recursive";
  auto prio = cand("dialogue_engine", "Okay, stopping.");
  prio.is_priority = true;
  auto prompt = cand("out_of_domain", "Do you want to hear some space facts?");
  prompt.is_prompt = true;
  prompt.prompt_id = "offer:space";
  auto other_prompt = prompt;
  other_prompt.prompt_id = "offer:science";
  auto not_prompt = cand("opinions", "I like jupiter.");
  not_prompt.prompt_id = "offer:space";  // id without the prompt flag

  std::set<std::string> none, used = {"offer:space"};
  ScoringConfig cfg;
  auto ctx_of = [&](std::optional<std::string> active, const std::set<std::string>& prompts) {
    return ScoringContext{analysis, std::move(active), prompts, lex, cfg};
  };
  auto idle = ctx_of(std::nullopt, none);
  auto busy = ctx_of(std::string("recursive"), none);
  auto repeat = ctx_of(std::nullopt, used);

  struct Case {
    const char* name;
    const ResponseCandidate* c;
    double incoherence;  // expected delta when a module is active
    double repeat;       // expected delta when the prompt id is used
  };
  const std::vector<Case> cases = {
      {"other module", &plain, 0.15, 0.0},     {"active module", &own, 0.0, 0.0},
      {"delegated by active", &via, 0.0, 0.0}, {"priority", &prio, 0.0, 0.0},
      {"used prompt", &prompt, 0.15, 0.05},    {"unused prompt", &other_prompt, 0.15, 0.0},
      {"id without prompt flag", &not_prompt, 0.15, 0.0},
  };
  for (const auto& k : cases) {
    auto base = loss(*k.c, idle);
    auto with_active = loss(*k.c, busy);
    auto with_used = loss(*k.c, repeat);
    double d_inc = with_active.total() - base.total();
    double d_rep = with_used.total() - base.total();
    o.check(std::abs(d_inc - k.incoherence) <= 1e-12 && with_active.repeat == base.repeat,
            std::string(k.name) + ": incoherence delta " + std::to_string(d_inc));
    o.check(std::abs(d_rep - k.repeat) <= 1e-12 && with_used.incoherence == base.incoherence,
            std::string(k.name) + ": repeat delta " + std::to_string(d_rep));

    // Same toggle seen through selection.
    Rng rng(1);
    std::vector<ResponseCandidate> pool = {*k.c};
    double f0 = select_response(pool, idle, rng).trace.front().final_confidence;
    double f1 = select_response(pool, busy, rng).trace.front().final_confidence;
    double f2 = select_response(pool, repeat, rng).trace.front().final_confidence;
    if (!k.c->is_priority) {
      o.check(std::abs((f0 - f1) - k.incoherence) <= 1e-12,
              std::string(k.name) + ": final drop " + std::to_string(f0 - f1));
      o.check(std::abs((f0 - f2) - k.repeat) <= 1e-12,
              std::string(k.name) + ": final drop " + std::to_string(f0 - f2));
    }
  }
  o.detail = std::to_string(cases.size()) + " candidates x 2 toggles";
  return o;
}

Outcome priority_dominance(const Engine& engine) {
  Outcome o;
  const auto& lex = engine.resources().lexicons;
  std::mt19937_64 gen(20240601);
  const std::vector<std::string> origins = {"retrieval", "opinions", "recursive", "storytelling",
                                            "out_of_domain", "question_answering", "flow_runtime"};
  const std::vector<std::string> words = {"jupiter", "pizza", "dogs", "movies", "mexico",
                                          "science", "games", "music", "stars", "books"};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int wins = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::string user = "i like " + words[gen() % words.size()] + " and " +
                       words[gen() % words.size()];
    auto analysis = engine.analyzer().analyze_text(user);
    std::vector<ResponseCandidate> pool;
    int n = 2 + static_cast<int>(gen() % 9);
    int prio_at = static_cast<int>(gen() % n);
    for (int i = 0; i < n; ++i) {
      std::string text = "We could talk about " + words[gen() % words.size()] + ".";
      auto c = ResponseCandidate::make(origins[gen() % origins.size()], text, unit(gen));
      c.id = "c" + std::to_string(i);
      if (i == prio_at) {
        c.is_priority = true;
        c.base_confidence = c.confidence = unit(gen) * 0.3;  // often the weakest
      }
      pool.push_back(c);
    }
    std::set<std::string> used;
    std::optional<std::string> active;
    if (gen() % 2) active = origins[gen() % origins.size()];
    ScoringContext ctx{analysis, active, used, lex, {}};
    Rng rng(gen());
    auto sel = select_response(pool, ctx, rng);
    bool ok = sel.winner.id == "c" + std::to_string(prio_at);
    wins += ok;
    o.check(ok, "trial " + std::to_string(trial) + ": winner " + sel.winner.id);
  }
  o.detail = std::to_string(wins) + "/1000 pools";
  return o;
}

Outcome tie_uniformity(const Engine& engine) {
  Outcome o;
  const auto& lex = engine.resources().lexicons;
  auto analysis = engine.analyzer().analyze_text("hello there");
  auto a = ResponseCandidate::make("retrieval", "First reply.", 0.7);
  a.id = "a";
  auto b = ResponseCandidate::make("opinions", "Second reply.", 0.7);
  b.id = "b";
  std::vector<ResponseCandidate> pool = {a, b};
  std::set<std::string> used;
  ScoringContext ctx{analysis, std::nullopt, used, lex, {}};
  Rng rng(12345);
  const int n = 10000;
  int first = 0;
  for (int i = 0; i < n; ++i) {
    auto sel = select_response(pool, ctx, rng);
    o.check(sel.tied == 2, "pool not tied");
    if (sel.winner.id == "a") ++first;
  }
  double share = static_cast<double>(first) / n;
  double e = n / 2.0;
  double chi2 = (first - e) * (first - e) / e + ((n - first) - e) * ((n - first) - e) / e;
  // One degree of freedom: p > 0.01 iff chi2 < 6.635.
  o.check(std::abs(share - 0.5) <= 0.02, "share " + std::to_string(share));
  o.check(chi2 < 6.635, "chi-square " + std::to_string(chi2));
  std::ostringstream d;
  d << first << "/" << n << " first, chi2 " << chi2;
  o.detail = d.str();
  return o;
}

Outcome flow_golden() {
  Outcome o;
  auto engine = make_engine({}, kFixtures / "flows" / "golden");
  auto s = engine->open_session("golden", "golden-user", 3);
  std::vector<std::string> all;
  for (char c = 'A'; c <= 'Z'; ++c) all.emplace_back(1, c);

  // Starter, then rows 1-8: A, C, B, then a turn matching nothing.
  auto r = engine->process_turn(s, AsrInput::from_text("let's walk the sample flow"));
  o.check(r.response.origin == kFlowModule, "starter not from the flow");
  o.check(r.expectations == all, "starter publishes " + json(r.expectations).dump());
  s = r.new_state;

  struct Row {
    const char* user;
    const char* reply;
    std::vector<std::string> expecting;
    const char* var;
  };
  const std::vector<Row> rows = {
      {"alpha", "Action A.", {"C", "D"}, "post_a"},
      {"charlie", "Action C.", {"B", "E"}, "post_c"},
      {"bravo", "Action B.", {"A"}, "post_b"},
  };
  int row = 1;
  for (const auto& x : rows) {
    r = engine->process_turn(s, AsrInput::from_text(x.user));
    std::string tag = "row " + std::to_string(row + 1) + ": ";
    o.check(r.reply == x.reply, tag + "reply \"" + r.reply + "\"");
    o.check(r.response.origin == kFlowModule, tag + "origin " + r.response.origin);
    o.check(r.expectations == x.expecting, tag + "expecting " + json(r.expectations).dump());
    const auto& f = r.new_state.active_flow;
    o.check(f && f->flow_id == "sample", tag + "flow not active");
    std::string letter(1, static_cast<char>(std::toupper(x.var[5])));
    o.check(f && f->vars.count(x.var) && f->vars.at(x.var) == letter,
            tag + "postcondition " + x.var + " not applied");
    s = r.new_state;
    row += 2;
  }
  r = engine->process_turn(s, AsrInput::from_text("nothing matches here"));
  o.check(r.flow_exited, "row 8: flow did not exit");
  o.check(!r.new_state.active_flow, "row 8: flow still active");
  o.check(r.response.origin != kFlowModule, "row 8: flow still answering");
  o.detail = "starter + 4 user turns";
  return o;
}

// User turns that exercise a flow's expectations.
std::vector<std::string> walk_vocabulary(const FlowSet& flows, const Resources& res) {
  std::vector<std::string> out = {"yes", "no", "sure", "nope", "i don't know", "maybe",
                                  "that is really cool", "i hate it", "i love it so much",
                                  "what do you think", "tell me more", "stop", "something else",
                                  "let's talk about something else", "hmm", "banana"};
  for (const auto& f : flows.flows) {
    out.push_back("let's talk about " + f.label);
    for (const auto& t : f.triggers) out.push_back("i like " + t);
    for (const auto& [id, e] : f.expectations) {
      if (const auto* k = std::get_if<KeywordSet>(&e.matcher)) {
        for (const auto& p : k->phrases) out.push_back(join(p, " "));
      }
    }
  }
  for (const auto& o : res.opinions) out.push_back("i really like " + o.entity);
  out.push_back("my favorite game is minecraft and i play it every day with my friends");
  out.push_back("i read harry potter");
  out.push_back("abraham lincoln");
  return out;
}

Outcome flow_validator(const Engine& engine) {
  Outcome o;
  auto env = FlowEnvironment::from(engine.resources().functions, engine.modules());

  int broken = 0;
  std::set<std::string> rules;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(kFixtures / "flows" / "broken")) {
    if (e.path().extension() == ".flow") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  static const std::regex kHeader(R"(^# expect-rule: ([a-z-]+))");
  for (const auto& p : files) {
    std::ifstream in(p);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    std::smatch m;
    if (!std::regex_search(text, m, kHeader)) {
      o.check(false, p.filename().string() + ": no expect-rule header");
      continue;
    }
    std::string want = m[1];
    auto dir = scratch_dir("broken-" + p.stem().string());
    fs::copy_file(p, dir / p.filename());
    auto report = check_flows(dir, env);
    bool hit = std::any_of(report.diagnostics.begin(), report.diagnostics.end(),
                           [&](const auto& d) { return d.rule == want; });
    o.check(!report.ok() && report.set.size() == 0, p.filename().string() + ": accepted");
    o.check(hit, p.filename().string() + ": rule " + want + " not reported");
    bool load_throws = false;
    try {
      load_flows(dir, env);
    } catch (const FlowLoadError&) {
      load_throws = true;
    }
    o.check(load_throws, p.filename().string() + ": load_flows did not fail");
    ++broken;
    rules.insert(want);
  }
  o.check(broken >= 10, "only " + std::to_string(broken) + " broken flows");

  auto shipped = check_flows(engine.config().data_dir / "flows", env);
  o.check(shipped.ok(), "shipped flows report problems");
  o.check(shipped.set.size() == 5, "expected 5 shipped flows, got " +
                                       std::to_string(shipped.set.size()));

  // Random walk: 10,000 turns across the shipped flows.
  auto vocab = walk_vocabulary(engine.flows(), engine.resources());
  std::mt19937_64 gen(77);
  int turns = 0, errors = 0, sessions = 0, flow_turns = 0;
  SessionState s;
  bool open = false;
  for (int i = 0; i < 10000; ++i) {
    if (!open || s.closed || gen() % 40 == 0) {
      s = engine.open_session("walk-" + std::to_string(sessions), "walker", gen());
      ++sessions;
      open = true;
      const auto& f = engine.flows().flows[gen() % engine.flows().size()];
      try {
        auto r = engine.process_turn(s, AsrInput::from_text("let's talk about " + f.label));
        s = r.new_state;
      } catch (const std::exception& e) {
        ++errors;
        o.check(false, std::string("runtime error: ") + e.what());
      }
    }
    const auto& text = vocab[gen() % vocab.size()];
    try {
      auto r = engine.process_turn(s, AsrInput::from_text(text));
      ++turns;
      if (r.new_state.active_flow) {
        ++flow_turns;
        const auto* f = engine.flows().find(r.new_state.active_flow->flow_id);
        o.check(f != nullptr, "unknown active flow");
        if (f) {
          const auto& node = r.new_state.active_flow->node_id;
          o.check(node.empty() || f->node(node), "active node " + node + " missing");
          for (const auto& id : r.expectations) {
            if (id.rfind("menu:", 0) == 0 || id.rfind("wyr:", 0) == 0) continue;
            o.check(f->expectations.count(id) > 0 || r.response.origin != kFlowModule,
                    "published undefined expectation " + id);
          }
        }
      }
      s = r.new_state;
      if (r.end_session) s.closed = true;
    } catch (const std::exception& e) {
      ++errors;
      o.check(false, std::string("runtime error: ") + e.what());
    }
  }
  o.check(errors == 0, std::to_string(errors) + " runtime errors");
  o.check(flow_turns > 1000, "walk spent only " + std::to_string(flow_turns) + " turns in flows");
  o.detail = std::to_string(broken) + " broken flows (" + std::to_string(rules.size()) +
             " rules), " + std::to_string(turns) + " walk turns, " +
             std::to_string(flow_turns) + " inside flows";
  return o;
}

Outcome nim_oracle() {
  Outcome o;
  auto start = std::chrono::steady_clock::now();
  std::map<std::vector<int>, bool> memo;
  // True when the player to move wins with best play (last stone wins).
  std::function<bool(const std::vector<int>&)> wins = [&](const std::vector<int>& p) {
    if (auto it = memo.find(p); it != memo.end()) return it->second;
    bool w = false;
    for (std::size_t i = 0; i < p.size() && !w; ++i) {
      for (int take = 1; take <= p[i] && !w; ++take) {
        auto q = p;
        q[i] -= take;
        if (!wins(q)) w = true;
      }
    }
    memo[p] = w;
    return w;
  };

  int positions = 0, winning = 0;
  for (int n = 1; n <= 3; ++n) {
    std::vector<int> p(n, 0);
    std::function<void(int)> rec = [&](int i) {
      if (i == n) {
        if (std::all_of(p.begin(), p.end(), [](int x) { return x == 0; })) return;
        ++positions;
        auto mv = nim_move(p);
        bool legal = mv.pile < p.size() && mv.take >= 1 && mv.take <= p[mv.pile];
        std::ostringstream pos;
        for (int x : p) pos << x << ' ';
        o.check(legal, "illegal move at " + pos.str());
        if (!legal) return;
        auto q = p;
        q[mv.pile] -= mv.take;
        if (wins(p)) {
          ++winning;
          o.check(!wins(q), "winning position " + pos.str() + "thrown away");
        }
        return;
      }
      for (int v = 0; v <= 7; ++v) {
        p[i] = v;
        rec(i + 1);
      }
    };
    rec(0);
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.check(secs < 10.0, "took " + std::to_string(secs) + " s");
  o.detail = std::to_string(positions) + " positions, " + std::to_string(winning) + " winning";
  return o;
}

Outcome bm25_oracle() {
  Outcome o;
  std::mt19937_64 gen(4242);
  const std::vector<std::string> vocab = {"apple", "river", "stone", "cloud", "piano",
                                          "tiger", "lemon", "ocean", "pencil", "rocket",
                                          "garden", "candle"};
  int queries = 0;
  for (int corpus = 0; corpus < 100; ++corpus) {
    Bm25Index index;
    std::vector<std::vector<std::string>> docs;
    int n = 1 + static_cast<int>(gen() % 20);
    for (int d = 0; d < n; ++d) {
      int len = 1 + static_cast<int>(gen() % 8);
      std::vector<std::string> words;
      for (int w = 0; w < len; ++w) words.push_back(vocab[gen() % vocab.size()]);
      docs.push_back(words);
      index.add({"d" + std::to_string(d), join(words, " "), "reply", "misc"});
    }
    double avgdl = 0;
    for (const auto& d : docs) avgdl += static_cast<double>(d.size());
    avgdl /= static_cast<double>(docs.size());

    for (int q = 0; q < 100; ++q) {
      std::vector<std::string> terms;
      int qlen = 1 + static_cast<int>(gen() % 4);
      for (int t = 0; t < qlen; ++t) {
        terms.push_back(gen() % 10 == 0 ? "zebra" : vocab[gen() % vocab.size()]);
      }
      std::set<std::string> uniq(terms.begin(), terms.end());

      // Exhaustive scoring of every document.
      std::vector<std::pair<std::size_t, double>> want;
      for (std::size_t d = 0; d < docs.size(); ++d) {
        double score = 0;
        bool any = false;
        for (const auto& term : uniq) {
          double tf = static_cast<double>(std::count(docs[d].begin(), docs[d].end(), term));
          if (tf == 0) continue;
          any = true;
          std::size_t df = 0;
          for (const auto& other : docs) {
            if (std::find(other.begin(), other.end(), term) != other.end()) ++df;
          }
          double N = static_cast<double>(docs.size());
          double idf = std::log(1.0 + (N - df + 0.5) / (df + 0.5));
          double k1 = 1.2, b = 0.75;
          double norm = 1.0 - b + b * static_cast<double>(docs[d].size()) / avgdl;
          score += idf * tf * (k1 + 1.0) / (tf + k1 * norm);
        }
        if (any) want.emplace_back(d, score);
      }
      std::stable_sort(want.begin(), want.end(), [](const auto& a, const auto& b) {
        if (std::abs(a.second - b.second) > 1e-9) return a.second > b.second;
        return a.first < b.first;
      });

      auto got = index.search(terms, std::nullopt, docs.size());
      bool same = got.size() == want.size();
      for (std::size_t i = 0; same && i < got.size(); ++i) {
        same = got[i].index == want[i].first && std::abs(got[i].score - want[i].second) <= 1e-9;
      }
      o.check(same, "corpus " + std::to_string(corpus) + " query " + std::to_string(q) +
                        " ranks differ");
      ++queries;
    }
  }
  o.detail = "100 corpora, " + std::to_string(queries) + " queries";
  return o;
}

std::vector<fs::path> replay_scripts() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(kFixtures / "replays")) {
    if (e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome conversation_replays(const Engine& engine) {
  Outcome o;
  int turns = 0;
  std::vector<std::string> names;
  for (const auto& p : replay_scripts()) {
    auto script = ReplayScript::load(p);
    auto r = run_replay(engine, script);
    for (const auto& f : r.failures) {
      o.check(false, script.name + " turn " + std::to_string(f.turn + 1) + ": " + f.message);
    }
    o.check(r.lines.size() == script.turns.size(), script.name + ": stopped early");
    turns += static_cast<int>(r.lines.size());
    names.push_back(script.name);
  }
  for (const char* want : {"opinions", "qa", "science", "wyr"}) {
    o.check(std::find(names.begin(), names.end(), want) != names.end(),
            std::string("missing replay ") + want);
  }
  o.detail = std::to_string(names.size()) + " scripts, " + std::to_string(turns) + " turns";
  return o;
}

// Cooperative user: names the first offered option, otherwise agrees.
std::string cooperative_reply(const std::string& agent) {
  auto colon = agent.rfind(':');
  if (colon != std::string::npos && agent.back() == '?') {
    std::string opts = agent.substr(colon + 1);
    auto cut = opts.find_first_of(",?");
    std::string first = trim(opts.substr(0, cut));
    if (first.rfind("or ", 0) == 0) first = first.substr(3);
    if (!first.empty()) return first;
  }
  return "yes";
}

Outcome engagement(const Engine& engine) {
  Outcome o;
  std::vector<json> log;
  auto run = [&](const std::string& sid, const std::string& opener, int max_turns) {
    auto s = engine.open_session(sid, "coop-" + sid, 11);
    auto input = AsrInput::from_text(opener);
    for (int i = 0; i < max_turns; ++i) {
      auto r = engine.process_turn(s, input);
      log.push_back(r.log_entry(input));
      s = r.new_state;
      if (r.end_session) break;
      input = AsrInput::from_text(cooperative_reply(r.reply));
    }
  };
  run("science", "i love science", 30);
  run("space", "tell me some space facts", 30);
  run("house", "which harry potter house am i", 30);
  auto m = compute_metrics(log);
  auto rec = m.modules[kRecursive];
  auto survey = m.modules[kSurvey];
  std::ostringstream d;
  d << std::fixed;
  d.precision(2);
  d << "recursive " << rec.mean() << " turns/episode (" << rec.episodes << "), survey "
    << survey.mean() << " (" << survey.episodes << ")";
  o.check(rec.episodes >= 2 && rec.mean() >= 5.0, "recursion below 5 turns: " + d.str());
  o.check(survey.episodes >= 1 && survey.mean() >= 4.0, "survey below 4 turns: " + d.str());
  o.detail = d.str();
  return o;
}

std::string http_transcript(int port, const ReplayScript& script, std::string& error) {
  httplib::Client cli("127.0.0.1", port);
  auto res = cli.Post("/v1/sessions",
                      json{{"user_id", script.user_id}, {"seed", script.seed}}.dump(),
                      "application/json");
  if (!res || res->status != 201) {
    error = "session create failed";
    return {};
  }
  auto id = json::parse(res->body).at("session_id").get<std::string>();
  std::vector<TranscriptLine> lines;
  for (const auto& t : script.turns) {
    auto r = cli.Post("/v1/sessions/" + id + "/turns",
                      json{{"hypotheses", json(t.input)}}.dump(), "application/json");
    if (!r || r->status != 200) {
      error = "turn failed";
      return {};
    }
    auto body = json::parse(r->body);
    lines.push_back({t.input.hypotheses.front().text, body.at("reply").get<std::string>(),
                     body.at("origin_module").get<std::string>()});
    if (body.at("end_session").get<bool>()) break;
  }
  cli.Delete("/v1/sessions/" + id);
  return format_transcript(lines);
}

Outcome determinism() {
  Outcome o;
  auto a = make_engine();
  auto b = make_engine();
  SessionManager sessions(*b);
  HttpService http(sessions, HttpOptions{"127.0.0.1", 0, {}});
  int port = http.start();
  int scripts = 0;
  for (const auto& p : replay_scripts()) {
    auto script = ReplayScript::load(p);
    for (std::uint64_t seed : {script.seed, std::uint64_t{99}}) {
      script.seed = seed;
      std::string tag = script.name + "@" + std::to_string(seed) + ": ";
      auto first = run_replay(*a, script).transcript();
      auto second = run_replay(*b, script).transcript();
      o.check(first == second, tag + "two runs differ");

      std::stringstream in, out;
      for (const auto& t : script.turns) in << t.input.hypotheses.front().text << "\n";
      ReplOptions ro;
      ro.seed = seed;
      ro.user_id = script.user_id;
      ro.echo = true;
      run_repl(*a, in, out, ro);
      o.check(out.str() == first, tag + "REPL transcript differs");

      std::string err;
      auto over_http = http_transcript(port, script, err);
      o.check(err.empty(), tag + "HTTP " + err);
      o.check(over_http == first, tag + "HTTP transcript differs");
      ++scripts;
    }
  }
  http.stop();
  o.detail = std::to_string(scripts) + " script/seed pairs x (rerun, REPL, HTTP)";
  return o;
}

Outcome stm_ltm() {
  Outcome o;
  auto ltm = scratch_dir("ltm");

  // Profile persistence across sessions and process-level restarts.
  OpinionProfile first_profile;
  {
    auto engine = make_engine(ltm);
    auto s = engine->open_session("p1", "returning-user", 5);
    first_profile = s.agent_profile;
    auto r = engine->process_turn(s, AsrInput::from_text("my name is ada"));
    s = r.new_state;
    o.check(s.user_name == std::optional<std::string>("Ada"), "name not learned");
    engine->end_session(s);
  }
  {
    auto engine = make_engine(ltm);
    auto s = engine->open_session("p2", "returning-user", 6);
    o.check(s.user_name == std::optional<std::string>("Ada"), "name not restored");
    o.check(s.agent_profile == first_profile, "opinion profile not restored");
    o.check(s.explored_topics.empty(), "explored topics leaked across sessions");
    auto r = engine->process_turn(s, AsrInput::from_text("hello"));
    o.check(r.reply.find("Ada") != std::string::npos, "greeting ignores the stored name");

    // Hot path: no persistent-store traffic between open and end.
    auto before = engine->ltm()->stats();
    s = r.new_state;
    for (const char* text : {"tell me a story", "yes", "what is your favorite color",
                             "i love science", "yes", "sure", "what is the capitol city of mexico",
                             "let's talk about video games", "yes", "minecraft", "play nim"}) {
      auto t = engine->process_turn(s, AsrInput::from_text(text));
      s = t.new_state;
    }
    auto after = engine->ltm()->stats();
    o.check(after.reads == before.reads, "hot path read the store " +
                                             std::to_string(after.reads - before.reads) +
                                             " times");
    o.check(after.writes == before.writes, "hot path wrote the store");
    engine->end_session(s);
    o.check(engine->ltm()->stats().writes > after.writes, "session end wrote nothing");
  }

  // Crash-restart: a writer killed mid-stream leaves only whole records.
  auto crash = scratch_dir("crash");
  int pipefd[2];
  if (::pipe(pipefd) != 0) {
    o.check(false, "pipe failed");
    return o;
  }
  pid_t child = ::fork();
  if (child == 0) {
    ::close(pipefd[0]);
    LtmStore store(crash);
    store.register_namespace("user_profiles");
    std::string big(4096, 'x');
    for (int i = 0;; ++i) {
      char key[32];
      std::snprintf(key, sizeof key, "user%05d", i);
      store.put({"user_profiles", key, json{{"n", i}, {"pad", big}}, ""});
      int committed = i;
      if (::write(pipefd[1], &committed, sizeof committed) != sizeof committed) ::_exit(1);
    }
  }
  ::close(pipefd[1]);
  int last = -1, got = 0;
  while (got < 200 && ::read(pipefd[0], &last, sizeof last) == sizeof last) ++got;
  ::kill(child, SIGKILL);
  ::waitpid(child, nullptr, 0);
  int extra = 0;
  while (::read(pipefd[0], &extra, sizeof extra) == sizeof extra) last = extra;
  ::close(pipefd[0]);

  LtmStore reopened(crash);
  reopened.register_namespace("user_profiles");
  int verified = 0;
  try {
    auto all = reopened.load_all("user_profiles");
    o.check(static_cast<int>(all.size()) >= last + 1,
            "lost committed records: " + std::to_string(all.size()) + " < " +
                std::to_string(last + 1));
    for (const auto& rec : all) {
      int n = rec.payload.at("n").get<int>();
      char key[32];
      std::snprintf(key, sizeof key, "user%05d", n);
      o.check(rec.key == key, "record " + rec.key + " holds the wrong payload");
      ++verified;
    }
  } catch (const std::exception& e) {
    o.check(false, std::string("reload failed: ") + e.what());
  }
  o.detail = "profile restored, 0 hot-path reads, " + std::to_string(verified) +
             " records intact after SIGKILL";
  return o;
}

}  // namespace

int main() {
  auto engine = make_engine();
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"confidence-update-table", [] { return scoring_table(); }},
      {"penalty-constants", [&] { return penalty_constants(*engine); }},
      {"priority-dominance", [&] { return priority_dominance(*engine); }},
      {"tie-break-uniformity", [&] { return tie_uniformity(*engine); }},
      {"flow-semantics-golden", [] { return flow_golden(); }},
      {"flow-validator", [&] { return flow_validator(*engine); }},
      {"nim-oracle", [] { return nim_oracle(); }},
      {"bm25-oracle", [] { return bm25_oracle(); }},
      {"conversation-replays", [&] { return conversation_replays(*engine); }},
      {"multi-turn-engagement", [&] { return engagement(*engine); }},
      {"determinism", [] { return determinism(); }},
      {"stm-ltm", [] { return stm_ltm(); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.problems.push_back(std::string("exception: ") + e.what());
    }
    double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("%s %-24s %s (%.0f ms)\n", o.ok ? "PASS" : "FAIL", c.name, o.detail.c_str(), ms);
    for (const auto& p : o.problems) std::printf("     - %s\n", p.c_str());
    if (!o.ok) ++failed;
  }
  fs::remove_all(fs::temp_directory_path() / ("socialbot-accept-" + std::to_string(::getpid())));
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
