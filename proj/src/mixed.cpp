#include "socialbot/mixed.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <regex>

#include "socialbot/text.hpp"

namespace socialbot {

namespace {

const std::array<std::string_view, 3> kUnsure = {
    "I'm not sure about that one.", "Hmm, I don't know the answer to that.",
    "That's a good question, but I'm not sure."};

const std::array<std::string_view, 2> kHedges = {"Moving on,", "Anyways,"};

bool is_solicitation(const UtteranceAnalysis& a) {
  return has_any_phrase(a, {"think of", "think about", "feel about", "opinion",
                            "do you like", "do you love", "do you hate", "how about"});
}

const EntityMention* first_entity(const UtteranceAnalysis& a) {
  for (const auto& e : a.entities) {
    if (e.hypothesis == 0) return &e;
  }
  return nullptr;
}

std::string swap_pronouns(std::string_view text) {
  static const std::map<std::string, std::string, std::less<>> kSwap = {
      {"i", "you"},         {"me", "you"},      {"my", "your"},   {"am", "are"},
      {"you", "I"},         {"your", "my"},     {"yours", "mine"}, {"mine", "yours"},
      {"myself", "yourself"}, {"yourself", "myself"}, {"i'm", "you're"}, {"you're", "I'm"}};
  std::vector<std::string> out;
  for (const auto& w : split(text, ' ')) {
    if (w.empty()) continue;
    auto it = kSwap.find(w);
    out.push_back(it == kSwap.end() ? w : it->second);
  }
  return join(out, " ");
}

std::string normalize_for_eliza(std::string_view text) {
  std::string folded = fold(text);
  std::string cleaned;
  for (char c : folded) {
    bool word = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'';
    cleaned.push_back(word ? c : ' ');
  }
  auto words = split(cleaned, ' ');
  std::erase_if(words, [](const std::string& w) { return w.empty(); });
  static const std::set<std::string> kLead = {"okay", "ok", "well", "so", "oh", "um",
                                              "uh", "alright", "hey", "and", "but", "hmm"};
  std::size_t i = 0;
  while (i < words.size() && kLead.count(words[i])) ++i;
  return join(std::span(words).subspan(i), " ");
}

std::size_t count_unsure(const SessionState& s) {
  std::size_t n = 0;
  for (const auto& t : s.history) {
    if (t.speaker != Speaker::Agent || t.origin != kQuestionAnswering) continue;
    for (auto u : kUnsure) {
      if (t.text == u) ++n;
    }
  }
  return n;
}

class OpinionsModule : public DialogueModule {
 public:
  std::string id() const override { return kOpinions; }
  std::vector<ResponseCandidate> propose(const TurnContext& ctx) const override {
    if (auto c = opinion_respond(ctx.analysis, ctx.session.agent_profile, ctx.resources)) {
      return {*c};
    }
    return {};
  }
};

class QuestionAnsweringModule : public DialogueModule {
 public:
  std::string id() const override { return kQuestionAnswering; }
  std::vector<ResponseCandidate> propose(const TurnContext& ctx) const override {
    const auto& a = ctx.analysis;
    bool tell_me_about = has_any_phrase(a, {"tell me about", "what do you know about"});
    if (a.dialogue_act != DialogueAct::Question && !tell_me_about) return {};
    return {answer_question(ctx)};
  }
};

class RetrievalModule : public DialogueModule {
 public:
  std::string id() const override { return kRetrieval; }
  std::vector<ResponseCandidate> propose(const TurnContext& ctx) const override {
    switch (ctx.analysis.dialogue_act) {
      case DialogueAct::YesAnswer:
      case DialogueAct::NoAnswer:
      case DialogueAct::StopRequest:
      case DialogueAct::RepeatRequest:
      case DialogueAct::Other:
        return {};
      default:
        break;
    }
    auto out = retrieve_response(ctx.resources.corpus, ctx.analysis, ctx.analysis.topic);
    if (out.empty() && ctx.analysis.topic) {
      out = retrieve_response(ctx.resources.corpus, ctx.analysis, std::nullopt);
    }
    for (auto& c : out) c.engaged = true;
    return out;
  }
};

class OutOfDomainModule : public DialogueModule {
 public:
  std::string id() const override { return kOutOfDomain; }
  std::vector<ResponseCandidate> propose(const TurnContext& ctx) const override {
    const auto& res = ctx.resources;
    const auto& a = ctx.analysis;
    if (const auto* e = first_entity(a)) {
      if (const auto* o = ctx.session.agent_profile.find(e->canonical_id)) {
        auto c = ResponseCandidate::make(id(), o->statement, 0.3);
        c.id = "ood:opinion";
        return {c};
      }
      if (e->entity_type == EntityType::Person || e->entity_type == EntityType::Place ||
          e->entity_type == EntityType::MediaTitle) {
        auto c = ResponseCandidate::make(id(), "What do you like about " + e->display + "?", 0.3);
        c.id = "ood:ask_more";
        return {c};
      }
      const auto& syn = res.lexicons.synonyms_of(e->canonical_id);
      if (!syn.empty()) {
        auto c = ResponseCandidate::make(id(), "Did you mean " + syn.front() + "?", 0.3);
        c.id = "ood:synonym";
        return {c};
      }
      if (const auto* enc = res.knowledge.encyclopedia()) {
        if (auto s = enc->summary(e->canonical_id)) {
          auto c = ResponseCandidate::make(id(), *s, 0.3);
          c.id = "ood:summary";
          return {c};
        }
      }
    }

    std::size_t hedges = 0;
    for (const auto& t : ctx.session.history) {
      if (t.speaker == Speaker::Agent && t.origin == kOutOfDomain &&
          (t.text.starts_with(kHedges[0]) || t.text.starts_with(kHedges[1]))) {
        ++hedges;
      }
    }
    auto hedge = kHedges[hedges % kHedges.size()];
    if (!ctx.session.used_prompts.count("offer:games")) {
      auto c = prompt_candidate(id(), with_hedge(hedge, "Would you like to play a game?",
                                                 res.lexicons),
                                0.3, "offer:games");
      c.postconditions.push_back(MakeOffer{Offer{kMenu, "games"}});
      c.expectations = {"offer:accept", "offer:decline"};
      return {c};
    }
    auto menu = build_topic_menu(ctx, 3, 0.3);
    menu.origin = id();
    menu.text = with_hedge(hedge, menu.text, res.lexicons);
    return {menu};
  }
};

}  // namespace

OpinionProfile seed_profile(const Resources& resources, std::string_view user_id) {
  std::uint64_t h = stable_hash(user_id);
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  Rng rng(seq);

  std::map<std::string, std::vector<const OpinionEntry*>> by_category;
  for (const auto& e : resources.opinions) by_category[e.category].push_back(&e);

  OpinionProfile profile;
  auto pick = [&](std::size_t n) {
    std::uniform_int_distribution<std::size_t> d(0, n - 1);
    return d(rng);
  };
  for (const auto& [category, entries] : by_category) {
    std::vector<const OpinionEntry*> lovable;
    for (const auto* e : entries) {
      if (std::any_of(e->variants.begin(), e->variants.end(),
                      [](const auto& v) { return v.polarity == Polarity::Love; })) {
        lovable.push_back(e);
      }
    }
    const OpinionEntry* favorite = lovable.empty() ? nullptr : lovable[pick(lovable.size())];
    for (const auto* e : entries) {
      std::vector<const OpinionVariant*> choices;
      for (const auto& v : e->variants) {
        bool love = v.polarity == Polarity::Love;
        if ((e == favorite) == love) choices.push_back(&v);
      }
      if (choices.empty()) continue;
      const auto* v = choices[pick(choices.size())];
      profile.opinions[e->entity] =
          Opinion{e->entity, e->category, v->polarity, v->statement, v->justification};
    }
  }
  profile.seeded = true;
  return profile;
}

std::optional<ResponseCandidate> opinion_respond(const UtteranceAnalysis& analysis,
                                                 const OpinionProfile& profile,
                                                 const Resources& resources) {
  auto make = [](std::string text, const std::string& entity) {
    auto c = ResponseCandidate::make(kOpinions, std::move(text), 0.9);
    c.id = "opinions:" + entity;
    c.engaged = true;
    return c;
  };

  if (has_token(analysis, "favorite") || has_token(analysis, "favourite") ||
      has_token(analysis, "fave")) {
    for (const auto& t : analysis.tokens) {
      auto it = resources.opinion_categories.find(t);
      if (it == resources.opinion_categories.end()) continue;
      if (const auto* o = profile.favorite(it->second)) return make(o->statement, o->entity);
      return std::nullopt;
    }
  }

  const EntityMention* entity = nullptr;
  const Opinion* held = nullptr;
  for (const auto& e : analysis.entities) {
    if (e.hypothesis != 0) continue;
    if (const auto* o = profile.find(e.canonical_id)) {
      entity = &e;
      held = o;
      break;
    }
  }
  if (!held) return std::nullopt;
  if (has_token(analysis, "why")) return make(held->justification, entity->canonical_id);
  if (analysis.dialogue_act == DialogueAct::Question && is_solicitation(analysis)) {
    return make(held->statement, entity->canonical_id);
  }
  return std::nullopt;
}

std::string eliza_reflect(std::string_view text) {
  struct Rule {
    std::regex pattern;
    std::string reply;  // {0} is the swapped capture
  };
  static const std::vector<Rule> kRules = [] {
    std::vector<Rule> r;
    auto add = [&](const char* re, const char* reply) {
      r.push_back({std::regex(re), reply});
    };
    add(R"((?:^| )you are (.+)$)", "Why do you think I am {0}?");
    add(R"((?:^| )you're (.+)$)", "Why do you think I am {0}?");
    add(R"(^are you (.+)$)", "Why do you want to know if I am {0}?");
    add(R"(^can you (.+)$)", "What makes you think I can {0}?");
    add(R"(^do you (.+)$)", "Why do you ask whether I {0}?");
    add(R"((?:^| )i am (.+)$)", "How long have you been {0}?");
    add(R"((?:^| )i'm (.+)$)", "How long have you been {0}?");
    add(R"((?:^| )i feel (.+)$)", "Why do you feel {0}?");
    add(R"(^what about (.+)$)", "What would you like to know about {0}?");
    add(R"(^why (.+)$)", "Why do you think {0}?");
    return r;
  }();
  std::string norm = normalize_for_eliza(text);
  for (const auto& rule : kRules) {
    std::smatch m;
    if (std::regex_search(norm, m, rule.pattern)) {
      std::string out = rule.reply;
      out.replace(out.find("{0}"), 3, swap_pronouns(m[1].str()));
      return out;
    }
  }
  return "Can you tell me a bit more about what you mean?";
}

ResponseCandidate answer_question(const TurnContext& ctx) {
  const auto& a = ctx.analysis;
  // A named entity is enough to go on even in a short question.
  if (a.content_words.size() < kElizaContentThreshold && a.entities.empty()) {
    auto c = ResponseCandidate::make(kQuestionAnswering, eliza_reflect(a.primary_text), 0.6);
    c.id = "qa:eliza";
    c.engaged = true;
    return c;
  }
  if (auto active = ctx.session.active_module(); active && *active != kFlowModule) {
    if (const auto* m = ctx.modules.find(*active)) {
      if (auto c = m->answer(ctx)) return *c;
    }
  }
  auto query = a.resolved_query.value_or(ctx.analyzer.search_query(a));
  if (auto hit = ctx.resources.knowledge.answer(a, query)) {
    auto c = ResponseCandidate::make(kQuestionAnswering, hit->text, 0.9);
    c.id = "qa:" + hit->source;
    c.engaged = true;
    return c;
  }
  auto text = kUnsure[count_unsure(ctx.session) % kUnsure.size()];
  auto c = ResponseCandidate::make(kQuestionAnswering, std::string(text), 0.4);
  c.id = "qa:unsure";
  c.engaged = true;
  return c;
}

std::unique_ptr<DialogueModule> make_opinions_module() {
  return std::make_unique<OpinionsModule>();
}
std::unique_ptr<DialogueModule> make_question_answering_module() {
  return std::make_unique<QuestionAnsweringModule>();
}
std::unique_ptr<DialogueModule> make_retrieval_module() {
  return std::make_unique<RetrievalModule>();
}
std::unique_ptr<DialogueModule> make_out_of_domain_module() {
  return std::make_unique<OutOfDomainModule>();
}

std::vector<MenuTopic> menu_topic_pool(const ModuleRegistry& modules) {
  std::vector<MenuTopic> out;
  for (const auto& m : modules.all()) {
    for (auto& t : m->menu_topics()) {
      bool dup = std::any_of(out.begin(), out.end(), [&](const auto& x) { return x.id == t.id; });
      if (!dup) out.push_back(std::move(t));
    }
  }
  return out;
}

std::vector<MenuTopic> pick_menu_topics(std::vector<MenuTopic> pool,
                                        const std::set<std::string>& explored, Rng& rng,
                                        std::size_t n) {
  std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::vector<MenuTopic> fresh;
  for (const auto& t : pool) {
    if (!explored.count(t.id)) fresh.push_back(t);
  }
  if (fresh.empty()) fresh = pool;
  for (std::size_t i = fresh.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> d(0, i - 1);
    std::swap(fresh[i - 1], fresh[d(rng)]);
  }
  if (fresh.size() > n) fresh.resize(n);
  return fresh;
}

std::string menu_sentence(const std::vector<MenuTopic>& topics, std::string_view lead) {
  if (topics.empty()) return "What would you like to talk about?";
  std::string list;
  for (std::size_t i = 0; i < topics.size(); ++i) {
    if (i > 0) list += topics.size() == 2 ? " or " : (i + 1 == topics.size() ? ", or " : ", ");
    list += topics[i].label;
  }
  return std::string(lead) + " " + list + ". Which one sounds good?";
}

ResponseCandidate build_topic_menu(const TurnContext& ctx, std::size_t n, double base) {
  auto rng = ctx.rng_for(kMenu);
  auto topics = pick_menu_topics(menu_topic_pool(ctx.modules), ctx.session.explored_topics, rng, n);
  auto c = prompt_candidate(kMenu, menu_sentence(topics), base, "menu");
  c.id = "menu";
  for (const auto& t : topics) c.expectations.push_back("menu:" + t.id);
  return c;
}

std::string with_hedge(std::string_view hedge, std::string_view text, const Lexicons& lexicons) {
  std::string body(text);
  auto tokens = tokenize(body);
  bool keep = tokens.empty() || tokens[0] == "i" || tokens[0].starts_with("i'") ||
              lexicons.gazetteer.match_at(tokens, 0).has_value();
  if (!keep && !body.empty() && body[0] >= 'A' && body[0] <= 'Z') {
    body[0] = static_cast<char>(body[0] - 'A' + 'a');
  }
  return std::string(hedge) + " " + body;
}

}  // namespace socialbot
