#include "socialbot/knowledge.hpp"

#include <algorithm>
#include <set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "socialbot/errors.hpp"
#include "socialbot/text.hpp"

namespace socialbot {

namespace {

std::set<std::string> entity_tokens(const UtteranceAnalysis& a) {
  std::set<std::string> out;
  for (const auto& e : a.entities) {
    if (e.hypothesis != 0) continue;
    for (std::size_t i = e.begin; i < e.end && i < a.tokens.size(); ++i) {
      out.insert(a.tokens[i]);
    }
  }
  return out;
}

const std::set<std::string>& generic_words() {
  static const std::set<std::string> kWords = {"tell", "know", "something", "anything",
                                               "about", "thing", "things", "more"};
  return kWords;
}

}  // namespace

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::ExactFactStore: return "ExactFactStore";
    case SourceKind::EncyclopediaSummaries: return "EncyclopediaSummaries";
    case SourceKind::WebInstantAnswers: return "WebInstantAnswers";
  }
  return "ExactFactStore";
}

std::unique_ptr<ExactFactStore> ExactFactStore::from_ltm(const LtmStore& store) {
  auto out = std::make_unique<ExactFactStore>();
  for (const auto& rec : store.load_all("knowledge_exact")) {
    const auto& p = rec.payload;
    out->add({p.at("entity").get<std::string>(), tokenize(p.at("attribute").get<std::string>()),
              p.at("answer").get<std::string>()});
  }
  return out;
}

std::optional<std::string> ExactFactStore::answer(const UtteranceAnalysis& analysis,
                                                  std::string_view) const {
  const Fact* best = nullptr;
  std::set<std::string> words(analysis.content_words.begin(), analysis.content_words.end());
  for (const auto& f : facts_) {
    if (!analysis.has_entity(f.entity)) continue;
    bool all = std::all_of(f.attribute.begin(), f.attribute.end(),
                           [&](const auto& w) { return words.count(w) > 0; });
    if (!all) continue;
    if (!best || f.attribute.size() > best->attribute.size()) best = &f;
  }
  if (!best) return std::nullopt;
  return best->answer;
}

std::unique_ptr<EncyclopediaStore> EncyclopediaStore::from_ltm(const LtmStore& store) {
  auto out = std::make_unique<EncyclopediaStore>();
  for (const auto& rec : store.load_all("knowledge_encyclopedia")) {
    out->add(rec.payload.at("entity").get<std::string>(),
             rec.payload.at("summary").get<std::string>());
  }
  return out;
}

std::optional<std::string> EncyclopediaStore::summary(std::string_view entity) const {
  auto it = summaries_.find(entity);
  if (it == summaries_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> EncyclopediaStore::answer(const UtteranceAnalysis& analysis,
                                                     std::string_view) const {
  auto ent = entity_tokens(analysis);
  for (const auto& w : analysis.content_words) {
    if (!ent.count(w) && !generic_words().count(w)) return std::nullopt;
  }
  for (const auto& e : analysis.entities) {
    if (auto s = summary(e.canonical_id)) return s;
  }
  return std::nullopt;
}

std::unique_ptr<WebAnswerStore> WebAnswerStore::from_ltm(const LtmStore& store) {
  auto out = std::make_unique<WebAnswerStore>();
  for (const auto& rec : store.load_all("knowledge_web")) {
    Entry e;
    for (const auto& k : rec.payload.at("keywords")) {
      for (auto& t : tokenize(k.get<std::string>())) e.keywords.push_back(std::move(t));
    }
    e.answer = rec.payload.at("answer").get<std::string>();
    out->add(std::move(e));
  }
  return out;
}

std::optional<std::string> WebAnswerStore::answer(const UtteranceAnalysis& analysis,
                                                  std::string_view) const {
  std::set<std::string> toks(analysis.tokens.begin(), analysis.tokens.end());
  for (const auto& e : entries_) {
    if (e.keywords.empty()) continue;
    if (std::all_of(e.keywords.begin(), e.keywords.end(),
                    [&](const auto& k) { return toks.count(k) > 0; })) {
      return e.answer;
    }
  }
  return std::nullopt;
}

LiveSource::LiveSource(std::string name, SourceKind kind, std::string url,
                       std::chrono::milliseconds timeout)
    : name_(std::move(name)), kind_(kind), url_(std::move(url)), timeout_(timeout) {}

std::optional<std::string> LiveSource::answer(const UtteranceAnalysis&,
                                              std::string_view query) const {
  // url_ is scheme://host[:port]/path
  auto scheme_end = url_.find("://");
  if (scheme_end == std::string::npos) return std::nullopt;
  auto path_start = url_.find('/', scheme_end + 3);
  std::string origin = url_.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url_.substr(path_start);
  try {
    httplib::Client client(origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Params params{{"q", std::string(query)}};
    auto res = client.Get(path, params, httplib::Headers{});
    if (!res || res->status != 200) return std::nullopt;
    auto body = nlohmann::json::parse(res->body, nullptr, false);
    if (body.is_discarded() || !body.contains("answer") || !body["answer"].is_string()) {
      return std::nullopt;
    }
    auto text = body["answer"].get<std::string>();
    if (text.empty()) return std::nullopt;
    return text;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void KnowledgeChain::add(std::unique_ptr<KnowledgeSource> source) {
  sources_.push_back(std::move(source));
  std::stable_sort(sources_.begin(), sources_.end(), [](const auto& a, const auto& b) {
    return static_cast<int>(a->kind()) < static_cast<int>(b->kind());
  });
}

std::optional<ChainAnswer> KnowledgeChain::answer(const UtteranceAnalysis& analysis,
                                                  std::string_view query) const {
  for (const auto& s : sources_) {
    if (auto a = s->answer(analysis, query)) return ChainAnswer{*a, s->name()};
  }
  return std::nullopt;
}

const EncyclopediaStore* KnowledgeChain::encyclopedia() const {
  for (const auto& s : sources_) {
    if (auto* e = dynamic_cast<const EncyclopediaStore*>(s.get())) return e;
  }
  return nullptr;
}

std::vector<std::string> KnowledgeChain::order() const {
  std::vector<std::string> out;
  for (const auto& s : sources_) out.push_back(s->name());
  return out;
}

}  // namespace socialbot
