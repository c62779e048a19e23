#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socialbot/ltm.hpp"
#include "socialbot/types.hpp"

namespace socialbot {

enum class SourceKind { ExactFactStore, EncyclopediaSummaries, WebInstantAnswers };
enum class SourceMode { Fixture, Live };

std::string_view to_string(SourceKind kind);

/// One step of the question-answering search chain.
class KnowledgeSource {
 public:
  virtual ~KnowledgeSource() = default;
  virtual std::string name() const = 0;
  virtual SourceKind kind() const = 0;
  virtual SourceMode mode() const = 0;
  /// `query` is the coreference-resolved search string.
  virtual std::optional<std::string> answer(const UtteranceAnalysis& analysis,
                                            std::string_view query) const = 0;
};

/// (entity, attribute) -> answer sentence.
class ExactFactStore : public KnowledgeSource {
 public:
  struct Fact {
    std::string entity;
    std::vector<std::string> attribute;  // tokens that must all appear
    std::string answer;
  };

  void add(Fact fact) { facts_.push_back(std::move(fact)); }
  static std::unique_ptr<ExactFactStore> from_ltm(const LtmStore& store);

  std::string name() const override { return "exact_facts"; }
  SourceKind kind() const override { return SourceKind::ExactFactStore; }
  SourceMode mode() const override { return SourceMode::Fixture; }
  std::optional<std::string> answer(const UtteranceAnalysis& analysis,
                                    std::string_view query) const override;

 private:
  std::vector<Fact> facts_;
};

/// Entity summaries; answers "what is X" / "tell me about X".
class EncyclopediaStore : public KnowledgeSource {
 public:
  void add(std::string entity, std::string summary) {
    summaries_[std::move(entity)] = std::move(summary);
  }
  static std::unique_ptr<EncyclopediaStore> from_ltm(const LtmStore& store);

  std::string name() const override { return "encyclopedia"; }
  SourceKind kind() const override { return SourceKind::EncyclopediaSummaries; }
  SourceMode mode() const override { return SourceMode::Fixture; }
  std::optional<std::string> answer(const UtteranceAnalysis& analysis,
                                    std::string_view query) const override;
  std::optional<std::string> summary(std::string_view entity) const;

 private:
  std::map<std::string, std::string, std::less<>> summaries_;
};

/// Keyword-set instant answers.
class WebAnswerStore : public KnowledgeSource {
 public:
  struct Entry {
    std::vector<std::string> keywords;
    std::string answer;
  };

  void add(Entry e) { entries_.push_back(std::move(e)); }
  static std::unique_ptr<WebAnswerStore> from_ltm(const LtmStore& store);

  std::string name() const override { return "web_answers"; }
  SourceKind kind() const override { return SourceKind::WebInstantAnswers; }
  SourceMode mode() const override { return SourceMode::Fixture; }
  std::optional<std::string> answer(const UtteranceAnalysis& analysis,
                                    std::string_view query) const override;

 private:
  std::vector<Entry> entries_;
};

/// HTTP client for a live answer service: GET <url>?q=<query> returning
/// {"answer": "..."}. Any failure or timeout falls through as "no answer".
class LiveSource : public KnowledgeSource {
 public:
  LiveSource(std::string name, SourceKind kind, std::string url,
             std::chrono::milliseconds timeout = std::chrono::seconds(2));

  std::string name() const override { return name_; }
  SourceKind kind() const override { return kind_; }
  SourceMode mode() const override { return SourceMode::Live; }
  std::optional<std::string> answer(const UtteranceAnalysis& analysis,
                                    std::string_view query) const override;

 private:
  std::string name_;
  SourceKind kind_;
  std::string url_;
  std::chrono::milliseconds timeout_;
};

struct ChainAnswer {
  std::string text;
  std::string source;
};

/// Sources are always consulted exact facts -> encyclopedia -> web answers,
/// whatever order they were added in.
class KnowledgeChain {
 public:
  void add(std::unique_ptr<KnowledgeSource> source);
  std::optional<ChainAnswer> answer(const UtteranceAnalysis& analysis,
                                    std::string_view query) const;
  const EncyclopediaStore* encyclopedia() const;
  std::vector<std::string> order() const;

 private:
  std::vector<std::unique_ptr<KnowledgeSource>> sources_;
};

}  // namespace socialbot
