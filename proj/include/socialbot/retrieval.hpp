#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "socialbot/candidate.hpp"
#include "socialbot/types.hpp"

namespace socialbot {

/// One crowd-sourced conversational turn: a user stimulus and a response.
struct TurnDocument {
  std::string id;
  std::string stimulus;
  std::string response;
  std::string topic;
};

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct ScoredDoc {
  std::size_t index = 0;
  double score = 0.0;
};

/// Inverted index over stimulus fields with Okapi BM25 ranking.
class Bm25Index {
 public:
  explicit Bm25Index(std::unordered_set<std::string> stopwords = {}, Bm25Params params = {});

  /// Throws InputError on an empty field or duplicate id.
  void add(TurnDocument doc);

  /// Documents with at least one query term, best first (ties by insertion
  /// order), optionally restricted to one topic, truncated to k.
  std::vector<ScoredDoc> search(std::span<const std::string> query_terms,
                                const std::optional<std::string>& topic,
                                std::size_t k) const;

  /// Index-side analysis: tokenize and drop stopwords.
  std::vector<std::string> terms(std::string_view text) const;

  /// Lucene-style non-negative idf: ln(1 + (N - df + 0.5) / (df + 0.5)).
  static double idf(std::size_t n_docs, std::size_t df);

  std::size_t size() const { return docs_.size(); }
  const TurnDocument& doc(std::size_t i) const { return docs_.at(i); }
  const Bm25Params& params() const { return params_; }
  double average_length() const;

 private:
  struct Posting {
    std::size_t doc;
    std::size_t tf;
  };
  std::unordered_set<std::string> stopwords_;
  Bm25Params params_;
  std::vector<TurnDocument> docs_;
  std::vector<std::size_t> lengths_;
  std::size_t total_length_ = 0;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::unordered_set<std::string> ids_;
};

/// Parses one JSON object per line with stimulus/response/topic (and an
/// optional id). Throws InputError with the line number on bad input.
std::vector<TurnDocument> parse_turn_documents(std::istream& in);

/// Top-k retrieval candidates; base confidence is `cap` times the min-max
/// normalized BM25 score within the result set.
std::vector<ResponseCandidate> retrieve_response(const Bm25Index& index,
                                                 const UtteranceAnalysis& analysis,
                                                 const std::optional<std::string>& topic,
                                                 std::size_t k = 3, double cap = 0.7);

}  // namespace socialbot
