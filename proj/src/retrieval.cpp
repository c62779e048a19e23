#include "socialbot/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "socialbot/errors.hpp"
#include "socialbot/text.hpp"

namespace socialbot {

Bm25Index::Bm25Index(std::unordered_set<std::string> stopwords, Bm25Params params)
    : stopwords_(std::move(stopwords)), params_(params) {}

std::vector<std::string> Bm25Index::terms(std::string_view text) const {
  std::vector<std::string> out;
  for (auto& t : tokenize(text)) {
    if (!stopwords_.count(t)) out.push_back(std::move(t));
  }
  return out;
}

void Bm25Index::add(TurnDocument doc) {
  if (doc.id.empty() || doc.stimulus.empty() || doc.response.empty() || doc.topic.empty()) {
    throw InputError("turn document '" + doc.id + "' has an empty field");
  }
  if (!ids_.insert(doc.id).second) {
    throw InputError("duplicate turn document id '" + doc.id + "'");
  }
  auto toks = terms(doc.stimulus);
  std::map<std::string, std::size_t> tf;
  for (const auto& t : toks) ++tf[t];
  std::size_t index = docs_.size();
  for (const auto& [term, count] : tf) postings_[term].push_back({index, count});
  lengths_.push_back(toks.size());
  total_length_ += toks.size();
  docs_.push_back(std::move(doc));
}

double Bm25Index::idf(std::size_t n_docs, std::size_t df) {
  double n = static_cast<double>(n_docs);
  double d = static_cast<double>(df);
  return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

double Bm25Index::average_length() const {
  if (docs_.empty()) return 0.0;
  return static_cast<double>(total_length_) / static_cast<double>(docs_.size());
}

std::vector<ScoredDoc> Bm25Index::search(std::span<const std::string> query_terms,
                                         const std::optional<std::string>& topic,
                                         std::size_t k) const {
  std::vector<ScoredDoc> out;
  if (docs_.empty() || k == 0) return out;
  std::vector<std::string> unique(query_terms.begin(), query_terms.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

  double avgdl = average_length();
  std::map<std::size_t, double> acc;
  for (const auto& term : unique) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    double w = idf(docs_.size(), it->second.size());
    for (const auto& p : it->second) {
      double tf = static_cast<double>(p.tf);
      double norm = 1.0 - params_.b +
                    params_.b * static_cast<double>(lengths_[p.doc]) / (avgdl > 0 ? avgdl : 1.0);
      acc[p.doc] += w * tf * (params_.k1 + 1.0) / (tf + params_.k1 * norm);
    }
  }
  for (const auto& [doc, score] : acc) {
    if (topic && docs_[doc].topic != *topic) continue;
    out.push_back({doc, score});
  }
  std::stable_sort(out.begin(), out.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.index < b.index;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

std::vector<TurnDocument> parse_turn_documents(std::istream& in) {
  std::vector<TurnDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    }
    auto field = [&](const char* name) -> std::string {
      if (!j.contains(name) || !j[name].is_string() || j[name].get<std::string>().empty()) {
        throw InputError("line " + std::to_string(line_no) + ": missing field '" + name + "'");
      }
      return j[name].get<std::string>();
    };
    TurnDocument d;
    d.stimulus = field("stimulus");
    d.response = field("response");
    d.topic = field("topic");
    d.id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>()
                                                   : "turn-" + std::to_string(line_no);
    docs.push_back(std::move(d));
  }
  return docs;
}

std::vector<ResponseCandidate> retrieve_response(const Bm25Index& index,
                                                 const UtteranceAnalysis& analysis,
                                                 const std::optional<std::string>& topic,
                                                 std::size_t k, double cap) {
  std::vector<ResponseCandidate> out;
  auto hits = index.search(index.terms(analysis.primary_text), topic, k);
  if (hits.empty()) return out;
  // Normalize over every matching document, not just the top k.
  auto all = index.search(index.terms(analysis.primary_text), topic, index.size());
  double hi = all.front().score;
  double lo = all.back().score;
  for (const auto& h : hits) {
    double norm = hi > lo ? (h.score - lo) / (hi - lo) : 1.0;
    const auto& doc = index.doc(h.index);
    auto c = ResponseCandidate::make("retrieval", doc.response, cap * norm);
    c.topic = doc.topic;
    c.id = "retrieval:" + doc.id;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace socialbot
