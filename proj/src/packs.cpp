#include "socialbot/packs.hpp"

#include <algorithm>

#include "socialbot/errors.hpp"
#include "socialbot/nlu.hpp"
#include "socialbot/text.hpp"

namespace socialbot {

namespace {

using nlohmann::json;

std::string str(const json& j, const char* field, const LtmRecord& rec) {
  if (!j.contains(field) || !j[field].is_string()) {
    throw ConfigError(rec.ns + "/" + rec.key + ": missing string field '" + field + "'");
  }
  return j[field].get<std::string>();
}

std::vector<std::string> strings(const json& j, const char* field) {
  std::vector<std::string> out;
  if (!j.contains(field)) return out;
  for (const auto& v : j[field]) out.push_back(v.get<std::string>());
  return out;
}

std::vector<std::string> keyword_tokens(const json& j, const char* field) {
  std::vector<std::string> out;
  for (const auto& s : strings(j, field)) {
    for (auto& t : tokenize(s)) out.push_back(std::move(t));
  }
  return out;
}

FactTopic parse_fact_topic(const LtmRecord& rec) {
  const auto& p = rec.payload;
  FactTopic t;
  t.id = rec.key;
  t.name = str(p, "name", rec);
  t.keywords = strings(p, "keywords");
  t.offer = str(p, "offer", rec);
  for (const auto& f : p.at("facts")) {
    t.facts.push_back({f.at("id").get<std::string>(), f.at("text").get<std::string>()});
  }
  return t;
}

}  // namespace

double passage_sentiment(const Lexicons& lexicons, const std::vector<std::string>& sentences) {
  Analyzer analyzer(lexicons);
  double net = 0.0;
  for (const auto& s : sentences) net += analyzer.sentiment(tokenize(s));
  return net;
}

std::filesystem::path default_resource_dir() {
#ifdef SOCIALBOT_RESOURCE_DIR
  return SOCIALBOT_RESOURCE_DIR;
#else
  return "data";
#endif
}

const OpinionEntry* Resources::opinion_entry(std::string_view entity) const {
  for (const auto& o : opinions) {
    if (o.entity == entity) return &o;
  }
  return nullptr;
}

const FactTopic* Resources::fact_topic(std::string_view id) const {
  for (const auto& t : fact_topics) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

const Survey* Resources::survey(std::string_view id) const {
  for (const auto& s : surveys) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

const Story* Resources::story(std::string_view id) const {
  for (const auto& s : stories) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::shared_ptr<Resources> Resources::load(const std::filesystem::path& root,
                                           const LtmStore* corpus_store) {
  namespace fs = std::filesystem;
  auto res = std::make_shared<Resources>();
  res->root = root;
  res->lexicons = Lexicons::load(root / "lexicon");
  if (fs::exists(root / "lexicon" / "categories.tsv")) {
    for (const auto& row : read_tsv(root / "lexicon" / "categories.tsv")) {
      if (row.size() >= 2) res->opinion_categories[fold(row[0])] = row[1];
    }
  }

  LtmStore packs(root / "packs");
  packs.register_defaults();
  res->corpus = Bm25Index(res->lexicons.stopwords);

  try {
    for (const auto& rec : packs.load_all("opinions")) {
      const auto& p = rec.payload;
      OpinionEntry e;
      e.entity = str(p, "entity", rec);
      e.category = str(p, "category", rec);
      for (const auto& v : p.at("variants")) {
        auto pol = parse_polarity(v.at("polarity").get<std::string>());
        if (!pol) throw ConfigError(rec.ns + "/" + rec.key + ": bad polarity");
        e.variants.push_back({*pol, v.at("statement").get<std::string>(),
                              v.at("justification").get<std::string>()});
      }
      if (e.variants.empty()) {
        throw ConfigError(rec.ns + "/" + rec.key + ": no opinion variants");
      }
      res->opinions.push_back(std::move(e));
    }

    for (const auto& rec : packs.load_all("stories")) {
      const auto& p = rec.payload;
      Story s;
      s.id = rec.key;
      s.title = str(p, "title", rec);
      s.hook = str(p, "hook", rec);
      s.sentences = strings(p, "sentences");
      if (p.contains("qa")) {
        for (const auto& qa : p["qa"]) {
          s.qa_pairs.push_back({tokenize(qa.at("keywords").get<std::string>()),
                                qa.at("answer").get<std::string>()});
        }
      }
      if (s.sentences.empty()) throw ConfigError("stories/" + rec.key + ": no sentences");
      std::vector<std::string> all = s.sentences;
      all.push_back(s.hook);
      if (passage_sentiment(res->lexicons, all) < 0.0) {
        res->screened_stories.push_back(s.id);
        continue;
      }
      res->stories.push_back(std::move(s));
    }

    for (const auto& rec : packs.load_all("facts")) res->fact_topics.push_back(parse_fact_topic(rec));
    for (const auto& rec : packs.load_all("headlines")) {
      auto t = parse_fact_topic(rec);
      std::erase_if(t.facts, [&](const FactItem& f) {
        return passage_sentiment(res->lexicons, {f.text}) < 0.0;
      });
      res->headline_topics.push_back(std::move(t));
    }

    for (const auto& rec : packs.load_all("riddles")) {
      res->riddles.push_back(
          {rec.key, str(rec.payload, "question", rec), str(rec.payload, "answer", rec)});
    }

    for (const auto& rec : packs.load_all("wyr")) {
      const auto& p = rec.payload;
      WyrQuestion q;
      q.id = rec.key;
      q.question = str(p, "question", rec);
      q.options = strings(p, "options");
      if (q.options.size() != 2) throw ConfigError("wyr/" + rec.key + ": need two options");
      q.choice = p.value("choice", 0u);
      q.justification = str(p, "justification", rec);
      res->wyr.push_back(std::move(q));
    }

    for (const auto& rec : packs.load_all("surveys")) {
      const auto& p = rec.payload;
      Survey s;
      s.id = rec.key;
      s.title = str(p, "title", rec);
      s.triggers = strings(p, "triggers");
      s.categories = strings(p, "categories");
      for (const auto& q : p.at("questions")) {
        SurveyQuestion sq;
        sq.text = q.at("text").get<std::string>();
        for (const auto& o : q.at("options")) {
          SurveyOption opt;
          opt.label = o.at("label").get<std::string>();
          opt.keywords = keyword_tokens(o, "keywords");
          for (const auto& [cat, w] : o.at("weights").items()) {
            if (std::find(s.categories.begin(), s.categories.end(), cat) ==
                s.categories.end()) {
              throw ConfigError("surveys/" + rec.key + ": unknown category " + cat);
            }
            opt.weights[cat] = w.get<int>();
          }
          if (opt.weights.empty()) {
            throw ConfigError("surveys/" + rec.key + ": option without category");
          }
          sq.options.push_back(std::move(opt));
        }
        s.questions.push_back(std::move(sq));
      }
      for (const auto& [cat, text] : p.at("results").items()) {
        s.results[cat] = text.get<std::string>();
      }
      res->surveys.push_back(std::move(s));
    }

    for (const auto& rec : packs.load_all("trivia")) {
      const auto& p = rec.payload;
      res->trivia.push_back({rec.key, str(p, "category", rec), str(p, "question", rec),
                             str(p, "answer", rec)});
    }

    for (const auto& rec : packs.load_all("fast_money")) {
      FastMoneyPrompt fm;
      fm.id = rec.key;
      fm.prompt = str(rec.payload, "prompt", rec);
      for (const auto& a : rec.payload.at("answers")) {
        fm.answers.push_back({a.at("text").get<std::string>(), a.at("points").get<int>()});
      }
      res->fast_money.push_back(std::move(fm));
    }

    for (const auto& rec : packs.load_all("cities")) {
      for (auto& c : strings(rec.payload, "cities")) res->cities.push_back(std::move(c));
    }
    std::sort(res->cities.begin(), res->cities.end(),
              [](const auto& a, const auto& b) { return fold(a) < fold(b); });
    res->cities.erase(std::unique(res->cities.begin(), res->cities.end(),
                                  [](const auto& a, const auto& b) { return fold(a) == fold(b); }),
                      res->cities.end());

    for (const auto& rec : packs.load_all("adventures")) {
      const auto& p = rec.payload;
      Adventure a;
      a.id = rec.key;
      a.title = str(p, "title", rec);
      a.opening = str(p, "opening", rec);
      for (const auto& b : p.at("branches")) {
        a.branches.push_back({keyword_tokens(b, "keywords"),
                              b.at("continuation").get<std::string>()});
      }
      a.fallbacks = strings(p, "fallbacks");
      if (a.fallbacks.empty()) throw ConfigError("adventures/" + rec.key + ": no fallbacks");
      res->adventures.push_back(std::move(a));
    }

    auto add_turns = [&](const LtmStore& store) {
      for (const auto& rec : store.load_all("turn_corpus")) {
        const auto& p = rec.payload;
        res->corpus.add({rec.key, str(p, "stimulus", rec), str(p, "response", rec),
                         str(p, "topic", rec)});
      }
    };
    add_turns(packs);
    if (corpus_store && corpus_store->has_namespace("turn_corpus")) add_turns(*corpus_store);

    res->knowledge.add(ExactFactStore::from_ltm(packs));
    res->knowledge.add(EncyclopediaStore::from_ltm(packs));
    res->knowledge.add(WebAnswerStore::from_ltm(packs));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed data pack: ") + e.what());
  } catch (const InputError& e) {
    throw ConfigError(std::string("malformed data pack: ") + e.what());
  }
  return res;
}

}  // namespace socialbot
