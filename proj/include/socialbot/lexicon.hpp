#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "socialbot/types.hpp"

namespace socialbot {

/// Multi-word phrase lookup keyed on token sequences, with leftmost-longest
/// matching.
template <class T>
class PhraseTable {
 public:
  struct Match {
    std::size_t begin = 0;
    std::size_t end = 0;
    const T* value = nullptr;
  };

  void add(std::vector<std::string> phrase, T value) {
    if (phrase.empty()) return;
    auto& bucket = by_first_[phrase.front()];
    bucket.push_back(Entry{std::move(phrase), std::move(value)});
    std::stable_sort(bucket.begin(), bucket.end(), [](const auto& a, const auto& b) {
      return a.phrase.size() > b.phrase.size();
    });
    ++size_;
  }

  std::optional<Match> match_at(std::span<const std::string> tokens,
                                std::size_t pos) const {
    if (pos >= tokens.size()) return std::nullopt;
    auto it = by_first_.find(tokens[pos]);
    if (it == by_first_.end()) return std::nullopt;
    for (const auto& entry : it->second) {
      if (pos + entry.phrase.size() > tokens.size()) continue;
      bool ok = true;
      for (std::size_t k = 1; k < entry.phrase.size(); ++k) {
        if (tokens[pos + k] != entry.phrase[k]) {
          ok = false;
          break;
        }
      }
      if (ok) return Match{pos, pos + entry.phrase.size(), &entry.value};
    }
    return std::nullopt;
  }

  /// Non-overlapping leftmost-longest scan.
  std::vector<Match> scan(std::span<const std::string> tokens) const {
    std::vector<Match> out;
    std::size_t pos = 0;
    while (pos < tokens.size()) {
      if (auto m = match_at(tokens, pos)) {
        out.push_back(*m);
        pos = m->end;
      } else {
        ++pos;
      }
    }
    return out;
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

 private:
  struct Entry {
    std::vector<std::string> phrase;
    T value;
  };
  std::unordered_map<std::string, std::vector<Entry>> by_first_;
  std::size_t size_ = 0;
};

struct GazetteerEntry {
  std::string canonical_id;
  EntityType type = EntityType::Other;
  std::string display;
};

enum class Cue { Wh, Aux, Imperative, Negator, Yes, No, Greeting };

enum class Intent { StopShort, StopExplicit, Repeat, Menu };

struct TopicHit {
  std::string topic;
  std::size_t order = 0;  // declaration order in the topic map, for ties
};

/// Line-oriented `term<TAB>value` data tables used by the NLU and scoring.
/// Every table is optional; missing files leave the table empty.
class Lexicons {
 public:
  static Lexicons load(const std::filesystem::path& dir);

  bool is_stopword(std::string_view token) const {
    return stopwords.count(std::string(token)) > 0;
  }
  std::vector<std::string> content_words(std::span<const std::string> tokens) const;

  /// Display name for a canonical entity id, if known.
  std::optional<std::string> display_of(std::string_view canonical_id) const;
  std::optional<EntityType> type_of(std::string_view canonical_id) const;
  const std::vector<std::string>& synonyms_of(std::string_view canonical_id) const;

  std::unordered_set<std::string> stopwords;
  std::unordered_map<std::string, double> sentiment;
  PhraseTable<GazetteerEntry> gazetteer;
  std::map<std::string, GazetteerEntry, std::less<>> entities_by_id;
  std::map<std::string, std::vector<std::string>, std::less<>> synonyms;
  PhraseTable<TopicHit> topics;
  std::vector<std::string> topic_order;
  PhraseTable<Cue> cues;
  PhraseTable<Intent> intents;
  std::unordered_set<std::string> explicit_terms;
  std::vector<std::vector<std::string>> explicit_phrases;
  std::map<std::string, std::vector<std::string>> opener_classes;  // class -> members
  std::map<std::string, std::string> opener_class_of;              // folded member -> class
};

/// Reads a `term<TAB>value...` file; blank lines and `#` comments skipped.
/// Each row is the list of tab-separated columns.
std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path& path);

}  // namespace socialbot
