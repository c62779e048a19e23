#include "socialbot/lexicon.hpp"

#include <fstream>

#include "socialbot/errors.hpp"
#include "socialbot/text.hpp"

namespace socialbot {

namespace {

std::optional<Cue> parse_cue(std::string_view name) {
  if (name == "wh") return Cue::Wh;
  if (name == "aux") return Cue::Aux;
  if (name == "imperative") return Cue::Imperative;
  if (name == "negator") return Cue::Negator;
  if (name == "yes") return Cue::Yes;
  if (name == "no") return Cue::No;
  if (name == "greeting") return Cue::Greeting;
  return std::nullopt;
}

std::optional<Intent> parse_intent(std::string_view name) {
  if (name == "stop_short") return Intent::StopShort;
  if (name == "stop_explicit") return Intent::StopExplicit;
  if (name == "repeat") return Intent::Repeat;
  if (name == "menu") return Intent::Menu;
  return std::nullopt;
}

std::string where(const std::filesystem::path& path, std::size_t row) {
  return path.string() + ": row " + std::to_string(row + 1);
}

}  // namespace

std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto trimmed = trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto cols = split(line, '\t');
    for (auto& c : cols) c = trim(c);
    rows.push_back(std::move(cols));
  }
  return rows;
}

Lexicons Lexicons::load(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw ConfigError("lexicon directory not found: " + dir.string());
  }
  Lexicons lex;
  auto table = [&](const char* name) -> std::optional<fs::path> {
    auto p = dir / name;
    if (fs::exists(p)) return p;
    return std::nullopt;
  };

  if (auto p = table("stopwords.tsv")) {
    for (const auto& row : read_tsv(*p)) lex.stopwords.insert(fold(row[0]));
  }
  if (auto p = table("sentiment.tsv")) {
    auto rows = read_tsv(*p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() < 2) throw ConfigError(where(*p, i) + ": missing value");
      lex.sentiment[fold(rows[i][0])] = std::stod(rows[i][1]);
    }
  }
  if (auto p = table("entities.tsv")) {
    auto rows = read_tsv(*p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (row.size() < 4) {
        throw ConfigError(where(*p, i) + ": expected surface, id, type, display");
      }
      auto type = parse_entity_type(row[2]);
      if (!type) throw ConfigError(where(*p, i) + ": unknown entity type " + row[2]);
      GazetteerEntry entry{row[1], *type, row[3]};
      lex.gazetteer.add(tokenize(row[0]), entry);
      lex.entities_by_id.try_emplace(entry.canonical_id, entry);
    }
  }
  if (auto p = table("synonyms.tsv")) {
    auto rows = read_tsv(*p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() < 2) throw ConfigError(where(*p, i) + ": missing synonym");
      if (!lex.entities_by_id.count(rows[i][0])) {
        throw ConfigError(where(*p, i) + ": unknown entity id " + rows[i][0]);
      }
      lex.synonyms[rows[i][0]].push_back(rows[i][1]);
    }
  }
  if (auto p = table("topics.tsv")) {
    auto rows = read_tsv(*p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() < 2) throw ConfigError(where(*p, i) + ": missing topic");
      const auto& topic = rows[i][1];
      auto it = std::find(lex.topic_order.begin(), lex.topic_order.end(), topic);
      std::size_t order = static_cast<std::size_t>(it - lex.topic_order.begin());
      if (it == lex.topic_order.end()) lex.topic_order.push_back(topic);
      lex.topics.add(tokenize(rows[i][0]), TopicHit{topic, order});
    }
  }
  if (auto p = table("cues.tsv")) {
    auto rows = read_tsv(*p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() < 2) throw ConfigError(where(*p, i) + ": missing cue");
      auto cue = parse_cue(rows[i][1]);
      if (!cue) throw ConfigError(where(*p, i) + ": unknown cue " + rows[i][1]);
      lex.cues.add(tokenize(rows[i][0]), *cue);
    }
  }
  if (auto p = table("intents.tsv")) {
    auto rows = read_tsv(*p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() < 2) throw ConfigError(where(*p, i) + ": missing intent");
      auto intent = parse_intent(rows[i][1]);
      if (!intent) throw ConfigError(where(*p, i) + ": unknown intent " + rows[i][1]);
      lex.intents.add(tokenize(rows[i][0]), *intent);
    }
  }
  if (auto p = table("explicit.tsv")) {
    for (const auto& row : read_tsv(*p)) {
      auto toks = tokenize(row[0]);
      if (toks.size() == 1) {
        lex.explicit_terms.insert(toks[0]);
      } else if (toks.size() > 1) {
        lex.explicit_phrases.push_back(std::move(toks));
      }
    }
  }
  if (auto p = table("openers.tsv")) {
    auto rows = read_tsv(*p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() < 2) throw ConfigError(where(*p, i) + ": missing class");
      lex.opener_classes[rows[i][1]].push_back(rows[i][0]);
      lex.opener_class_of[fold(rows[i][0])] = rows[i][1];
    }
  }
  return lex;
}

std::vector<std::string> Lexicons::content_words(
    std::span<const std::string> tokens) const {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (!is_stopword(t)) out.push_back(t);
  }
  return out;
}

std::optional<std::string> Lexicons::display_of(std::string_view canonical_id) const {
  auto it = entities_by_id.find(canonical_id);
  if (it == entities_by_id.end()) return std::nullopt;
  return it->second.display;
}

std::optional<EntityType> Lexicons::type_of(std::string_view canonical_id) const {
  auto it = entities_by_id.find(canonical_id);
  if (it == entities_by_id.end()) return std::nullopt;
  return it->second.type;
}

const std::vector<std::string>& Lexicons::synonyms_of(
    std::string_view canonical_id) const {
  static const std::vector<std::string> kNone;
  auto it = synonyms.find(canonical_id);
  return it == synonyms.end() ? kNone : it->second;
}

}  // namespace socialbot
