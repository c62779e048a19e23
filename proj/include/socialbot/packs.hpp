#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "socialbot/expectation.hpp"
#include "socialbot/knowledge.hpp"
#include "socialbot/lexicon.hpp"
#include "socialbot/ltm.hpp"
#include "socialbot/opinion.hpp"
#include "socialbot/retrieval.hpp"

namespace socialbot {

struct OpinionVariant {
  Polarity polarity = Polarity::Like;
  std::string statement;
  std::string justification;
};

/// Candidate opinions about one entity; a profile keeps exactly one.
struct OpinionEntry {
  std::string entity;
  std::string category;
  std::vector<OpinionVariant> variants;
};

struct QaPair {
  std::vector<std::string> keywords;  // content words that must all be present
  std::string answer;
};

struct Story {
  std::string id;
  std::string title;
  std::string hook;
  std::vector<std::string> sentences;
  std::vector<QaPair> qa_pairs;
};

struct FactItem {
  std::string id;
  std::string text;
};

/// Facts or headlines about one topic, served one per turn.
struct FactTopic {
  std::string id;
  std::string name;
  std::vector<std::string> keywords;
  std::string offer;
  std::vector<FactItem> facts;
};

struct Riddle {
  std::string id;
  std::string question;
  std::string answer;
};

struct WyrQuestion {
  std::string id;
  std::string question;
  std::vector<std::string> options;  // exactly two
  std::size_t choice = 0;
  std::string justification;
};

struct SurveyOption {
  std::string label;
  std::vector<std::string> keywords;
  std::map<std::string, int> weights;
};

struct SurveyQuestion {
  std::string text;
  std::vector<SurveyOption> options;
};

struct Survey {
  std::string id;
  std::string title;
  std::vector<std::string> triggers;
  std::vector<std::string> categories;  // declaration order breaks ties
  std::vector<SurveyQuestion> questions;
  std::map<std::string, std::string> results;
};

struct TriviaQuestion {
  std::string id;
  std::string category;
  std::string question;
  std::string answer;
};

struct FastMoneyAnswer {
  std::string text;
  int points = 0;
};

struct FastMoneyPrompt {
  std::string id;
  std::string prompt;
  std::vector<FastMoneyAnswer> answers;  // ranked, best first
};

struct AdventureBranch {
  std::vector<std::string> keywords;
  std::string continuation;
};

struct Adventure {
  std::string id;
  std::string title;
  std::string opening;
  std::vector<AdventureBranch> branches;
  std::vector<std::string> fallbacks;  // cycled when no branch matches
};

/// Read-only corpora loaded once at startup. Nothing here touches disk
/// after `load` returns.
struct Resources {
  std::filesystem::path root;
  Lexicons lexicons;
  std::map<std::string, std::string> opinion_categories;  // folded word -> category
  std::vector<OpinionEntry> opinions;
  std::vector<Story> stories;
  std::vector<std::string> screened_stories;  // dropped for negative tone
  std::vector<FactTopic> fact_topics;
  std::vector<FactTopic> headline_topics;
  std::vector<Riddle> riddles;
  std::vector<WyrQuestion> wyr;
  std::vector<Survey> surveys;
  std::vector<TriviaQuestion> trivia;
  std::vector<FastMoneyPrompt> fast_money;
  std::vector<std::string> cities;
  std::vector<Adventure> adventures;
  Bm25Index corpus;
  KnowledgeChain knowledge;
  FunctionRegistry functions = FunctionRegistry::with_builtins();

  std::filesystem::path flow_dir() const { return root / "flows"; }

  const OpinionEntry* opinion_entry(std::string_view entity) const;
  const FactTopic* fact_topic(std::string_view id) const;
  const Survey* survey(std::string_view id) const;
  const Story* story(std::string_view id) const;

  /// Loads `<root>/lexicon` and the packs under `<root>/packs`. Extra turn
  /// documents from `corpus_store` (the ingested turn_corpus namespace) are
  /// appended to the shipped corpus.
  static std::shared_ptr<Resources> load(const std::filesystem::path& root,
                                         const LtmStore* corpus_store = nullptr);
};

/// Net lexicon sentiment of a passage (sum of hits, negators applied).
double passage_sentiment(const Lexicons& lexicons, const std::vector<std::string>& sentences);

std::filesystem::path default_resource_dir();

}  // namespace socialbot
