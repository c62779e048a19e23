#include "socialbot/nlu.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>

#include "socialbot/errors.hpp"
#include "socialbot/text.hpp"

namespace socialbot {

namespace {

constexpr std::array<std::string_view, 10> kFillers = {
    "and", "so", "well", "oh", "um", "uh", "hmm", "but", "then", "alexa"};

constexpr std::array<std::string_view, 6> kStopNoise = {
    "alexa", "please", "just", "now", "right", "ok"};

bool is_filler(std::string_view t) {
  return std::find(kFillers.begin(), kFillers.end(), t) != kFillers.end();
}

enum class PronounClass { NonPerson, Person, Any };

struct PronounInfo {
  PronounClass cls;
  bool possessive;
  bool contracted;  // "it's" style
};

std::optional<PronounInfo> pronoun_info(std::string_view t) {
  if (t == "it") return PronounInfo{PronounClass::NonPerson, false, false};
  if (t == "its") return PronounInfo{PronounClass::NonPerson, true, false};
  if (t == "it's") return PronounInfo{PronounClass::NonPerson, false, true};
  if (t == "he" || t == "him") return PronounInfo{PronounClass::Person, false, false};
  if (t == "his") return PronounInfo{PronounClass::Person, true, false};
  if (t == "he's") return PronounInfo{PronounClass::Person, false, true};
  if (t == "she") return PronounInfo{PronounClass::Person, false, false};
  if (t == "her" || t == "hers") return PronounInfo{PronounClass::Person, true, false};
  if (t == "she's") return PronounInfo{PronounClass::Person, false, true};
  if (t == "they" || t == "them") return PronounInfo{PronounClass::Any, false, false};
  if (t == "their" || t == "theirs") return PronounInfo{PronounClass::Any, true, false};
  return std::nullopt;
}

bool compatible(PronounClass cls, EntityType type) {
  switch (cls) {
    case PronounClass::NonPerson: return type != EntityType::Person;
    case PronounClass::Person: return type == EntityType::Person;
    case PronounClass::Any: return true;
  }
  return false;
}

bool ends_with_question_mark(std::string_view raw) {
  auto t = trim(raw);
  return !t.empty() && t.back() == '?';
}

// Replaces the first whole-word, case-insensitive occurrence of `word` in
// `text`. Word characters match the tokenizer's.
std::string replace_word(const std::string& text, std::string_view word,
                         std::string_view replacement) {
  std::string folded = fold(text);
  // fold() can shrink multi-byte characters; only rewrite when lengths agree.
  if (folded.size() != text.size()) {
    folded = text;
    std::transform(folded.begin(), folded.end(), folded.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  }
  auto is_word = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '\'';
  };
  std::size_t pos = 0;
  while ((pos = folded.find(word, pos)) != std::string::npos) {
    bool left_ok = pos == 0 || !is_word(folded[pos - 1]);
    std::size_t end = pos + word.size();
    bool right_ok = end >= folded.size() || !is_word(folded[end]);
    if (left_ok && right_ok) {
      return text.substr(0, pos) + std::string(replacement) + text.substr(end);
    }
    pos = end;
  }
  return text;
}

}  // namespace

void validate_asr_input(const AsrInput& input) {
  if (input.hypotheses.empty()) {
    throw InputError("ASR input must contain at least one hypothesis");
  }
  for (std::size_t i = 0; i < input.hypotheses.size(); ++i) {
    double s = input.hypotheses[i].score;
    if (!(s >= 0.0 && s <= 1.0)) {
      throw InputError("hypotheses[" + std::to_string(i) + "].score must be in [0,1]");
    }
  }
}

double average_asr_confidence(const AsrInput& input) {
  validate_asr_input(input);
  double sum = 0.0;
  for (const auto& h : input.hypotheses) sum += h.score;
  return std::clamp(sum / static_cast<double>(input.hypotheses.size()), 0.0, 1.0);
}

Analyzer::Analyzer(const Lexicons& lexicons, double clarification_threshold)
    : lex_(lexicons), threshold_(clarification_threshold) {}

std::vector<EntityMention> Analyzer::find_entities(std::string_view text,
                                                   std::size_t hypothesis) const {
  auto tokens = tokenize(text);
  std::vector<EntityMention> out;
  for (const auto& m : lex_.gazetteer.scan(tokens)) {
    EntityMention e;
    e.surface = join(std::span(tokens).subspan(m.begin, m.end - m.begin), " ");
    e.canonical_id = m.value->canonical_id;
    e.entity_type = m.value->type;
    e.display = m.value->display;
    e.hypothesis = hypothesis;
    e.begin = m.begin;
    e.end = m.end;
    out.push_back(std::move(e));
  }
  return out;
}

DialogueAct Analyzer::classify(std::span<const std::string> tokens, std::string_view raw,
                               StopKind* stop_kind, bool* menu) const {
  if (stop_kind) *stop_kind = StopKind::None;
  if (menu) *menu = false;
  if (tokens.empty()) return DialogueAct::Other;

  bool has_short_stop = false;
  bool has_explicit_stop = false;
  bool has_repeat = false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto m = lex_.intents.match_at(tokens, i);
    if (!m) continue;
    switch (*m->value) {
      case Intent::StopExplicit: has_explicit_stop = true; break;
      case Intent::StopShort: has_short_stop = true; break;
      case Intent::Repeat: has_repeat = true; break;
      case Intent::Menu:
        if (menu) *menu = true;
        break;
    }
  }
  if (has_explicit_stop) {
    if (stop_kind) *stop_kind = StopKind::Explicit;
    return DialogueAct::StopRequest;
  }
  if (has_short_stop) {
    std::size_t meaningful = 0;
    for (const auto& t : tokens) {
      if (std::find(kStopNoise.begin(), kStopNoise.end(), t) == kStopNoise.end()) {
        ++meaningful;
      }
    }
    if (meaningful <= 2) {
      if (stop_kind) *stop_kind = StopKind::Short;
      return DialogueAct::StopRequest;
    }
  }
  if (has_repeat) return DialogueAct::RepeatRequest;

  // Leading yes/no phrases; a question in the remainder wins over them.
  std::size_t pos = 0;
  std::optional<Cue> polarity;
  while (pos < tokens.size()) {
    auto m = lex_.cues.match_at(tokens, pos);
    if (m && (*m->value == Cue::Yes || *m->value == Cue::No)) {
      if (!polarity) polarity = *m->value;
      pos = m->end;
    } else if (polarity && is_filler(tokens[pos])) {
      ++pos;
    } else {
      break;
    }
  }

  auto first_content = [&](std::size_t from) {
    while (from < tokens.size() && is_filler(tokens[from])) ++from;
    return from;
  };
  auto cue_at = [&](std::size_t i) -> std::optional<Cue> {
    auto m = lex_.cues.match_at(tokens, i);
    if (!m) return std::nullopt;
    return *m->value;
  };
  auto is_question_from = [&](std::size_t from) {
    std::size_t i = first_content(from);
    if (i >= tokens.size()) return false;
    auto cue = cue_at(i);
    if (cue == Cue::Wh) return true;
    if (cue == Cue::Aux && i + 1 < tokens.size()) return true;
    return false;
  };

  if (polarity) {
    if (pos >= tokens.size()) {
      return *polarity == Cue::Yes ? DialogueAct::YesAnswer : DialogueAct::NoAnswer;
    }
    if (!is_question_from(pos)) {
      return *polarity == Cue::Yes ? DialogueAct::YesAnswer : DialogueAct::NoAnswer;
    }
    return DialogueAct::Question;
  }

  if (cue_at(0) == Cue::Greeting && tokens.size() <= 4) return DialogueAct::Greeting;
  if (is_question_from(0) || ends_with_question_mark(raw)) return DialogueAct::Question;
  std::size_t i = first_content(0);
  if (i < tokens.size() && cue_at(i) == Cue::Imperative) return DialogueAct::Command;
  return DialogueAct::Statement;
}

double Analyzer::sentiment(std::span<const std::string> tokens) const {
  double sum = 0.0;
  int hits = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = lex_.sentiment.find(tokens[i]);
    if (it == lex_.sentiment.end()) continue;
    double v = it->second;
    for (std::size_t back = 1; back <= 2 && back <= i; ++back) {
      auto m = lex_.cues.match_at(tokens, i - back);
      if (m && *m->value == Cue::Negator) {
        v = -v;
        break;
      }
    }
    sum += v;
    ++hits;
  }
  if (hits == 0) return 0.0;
  return std::clamp(sum / hits, -1.0, 1.0);
}

std::optional<std::string> Analyzer::topic(std::span<const std::string> tokens) const {
  std::map<std::size_t, std::pair<std::string, int>> counts;  // order -> (topic, hits)
  for (const auto& m : lex_.topics.scan(tokens)) {
    auto& slot = counts[m.value->order];
    slot.first = m.value->topic;
    ++slot.second;
  }
  std::optional<std::string> best;
  int best_hits = 0;
  for (const auto& [order, entry] : counts) {
    if (entry.second > best_hits) {
      best = entry.first;
      best_hits = entry.second;
    }
  }
  return best;
}

UtteranceAnalysis Analyzer::analyze(const AsrInput& input, const SessionState&) const {
  validate_asr_input(input);
  UtteranceAnalysis a;
  a.primary_text = input.hypotheses.front().text;
  for (const auto& h : input.hypotheses) a.all_texts.push_back(h.text);
  a.tokens = tokenize(a.primary_text);
  a.content_words = lex_.content_words(a.tokens);
  a.dialogue_act = classify(a.tokens, a.primary_text, &a.stop_kind, &a.menu_request);
  a.sentiment = sentiment(a.tokens);
  a.topic = topic(a.tokens);
  std::set<std::string> seen;
  for (std::size_t h = 0; h < input.hypotheses.size(); ++h) {
    for (auto& e : find_entities(input.hypotheses[h].text, h)) {
      if (seen.insert(e.canonical_id).second) a.entities.push_back(std::move(e));
    }
  }
  a.asr_mean = average_asr_confidence(input);
  a.needs_clarification = a.asr_mean < threshold_;
  return a;
}

UtteranceAnalysis Analyzer::analyze_text(std::string_view text) const {
  return analyze(AsrInput::from_text(std::string(text)), SessionState{});
}

UtteranceAnalysis Analyzer::resolve_coreference(const UtteranceAnalysis& analysis,
                                                const SessionState& session) const {
  std::optional<std::size_t> pron_index;
  PronounInfo info{};
  for (std::size_t i = 0; i < analysis.tokens.size(); ++i) {
    if (auto p = pronoun_info(analysis.tokens[i])) {
      // "how is it that ..." has no referent.
      if (analysis.tokens[i] == "it" && i + 1 < analysis.tokens.size() &&
          analysis.tokens[i + 1] == "that") {
        continue;
      }
      pron_index = i;
      info = *p;
      break;
    }
  }
  if (!pron_index) return analysis;

  std::optional<EntityMention> antecedent;
  for (auto turn = session.history.rbegin();
       turn != session.history.rend() && !antecedent; ++turn) {
    std::vector<EntityMention> mentions = turn->mentions;
    if (mentions.empty() && turn->analysis) mentions = turn->analysis->entities;
    // Later spans in the same turn are more recent.
    std::stable_sort(mentions.begin(), mentions.end(),
                     [](const auto& x, const auto& y) { return x.end > y.end; });
    for (const auto& m : mentions) {
      if (m.hypothesis == 0 && compatible(info.cls, m.entity_type)) {
        antecedent = m;
        break;
      }
    }
  }

  if (!antecedent) {
    UtteranceAnalysis out = analysis;
    out.unresolved_reference = true;
    return out;
  }

  const std::string& pronoun = analysis.tokens[*pron_index];
  const std::string& name = antecedent->display;
  std::string replacement;
  if (info.possessive) {
    replacement = name + "'s";
  } else if (info.contracted) {
    // "what is it's population" is possessive; "it's big" is "it is".
    bool after_copula = *pron_index > 0 && (analysis.tokens[*pron_index - 1] == "is" ||
                                            analysis.tokens[*pron_index - 1] == "was");
    replacement = after_copula ? name + "'s" : name + " is";
  } else {
    replacement = name;
  }

  UtteranceAnalysis out = analysis;
  out.primary_text = replace_word(analysis.primary_text, pronoun, replacement);
  out.tokens = tokenize(out.primary_text);
  out.content_words = lex_.content_words(out.tokens);
  out.topic = topic(out.tokens);
  std::vector<EntityMention> entities = find_entities(out.primary_text, 0);
  std::set<std::string> seen;
  for (const auto& e : entities) seen.insert(e.canonical_id);
  for (const auto& e : analysis.entities) {
    if (e.hypothesis != 0 && seen.insert(e.canonical_id).second) entities.push_back(e);
  }
  out.entities = std::move(entities);
  out.unresolved_reference = false;
  out.resolved_query = search_query(out);
  return out;
}

std::string Analyzer::search_query(const UtteranceAnalysis& analysis) const {
  const EntityMention* entity = nullptr;
  for (const auto& e : analysis.entities) {
    if (e.hypothesis == 0) {
      entity = &e;
      break;
    }
  }
  if (!entity) return join(analysis.content_words, " ");
  std::set<std::string> entity_tokens;
  for (std::size_t i = entity->begin; i < entity->end && i < analysis.tokens.size(); ++i) {
    entity_tokens.insert(analysis.tokens[i]);
  }
  std::vector<std::string> attribute;
  for (const auto& w : analysis.content_words) {
    if (!entity_tokens.count(w)) attribute.push_back(w);
  }
  if (attribute.empty()) return entity->display;
  return join(attribute, " ") + " of " + entity->display;
}

}  // namespace socialbot
