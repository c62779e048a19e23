#include "socialbot/realization.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "socialbot/text.hpp"

namespace socialbot {

namespace {

bool iequals_prefix(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

bool is_continuation_byte(char c) {
  return (static_cast<unsigned char>(c) & 0xC0) == 0x80;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '&') {
      out += "&amp;";
    } else {
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::optional<OpenerMatch> leading_opener(std::string_view text, const Lexicons& lexicons) {
  std::optional<OpenerMatch> best;
  for (const auto& [cls, members] : lexicons.opener_classes) {
    for (const auto& member : members) {
      if (!iequals_prefix(text, member)) continue;
      if (text.size() > member.size() &&
          std::isalnum(static_cast<unsigned char>(text[member.size()]))) {
        continue;
      }
      if (!best || member.size() > best->length) {
        best = OpenerMatch{member, cls, member.size()};
      }
    }
  }
  return best;
}

std::string vary_opener(std::string_view text, std::span<const std::string> recent_agent_texts,
                        const Lexicons& lexicons, Rng& rng, std::size_t window) {
  auto opener = leading_opener(text, lexicons);
  if (!opener) return std::string(text);
  std::vector<std::string> recent;
  for (std::size_t i = 0; i < recent_agent_texts.size() && i < window; ++i) {
    if (auto o = leading_opener(recent_agent_texts[i], lexicons)) {
      recent.push_back(fold(o->member));
    }
  }
  if (std::find(recent.begin(), recent.end(), fold(opener->member)) == recent.end()) {
    return std::string(text);
  }
  const auto& members = lexicons.opener_classes.at(opener->cls);
  std::vector<std::string> alternatives;
  for (const auto& m : members) {
    if (std::find(recent.begin(), recent.end(), fold(m)) == recent.end()) {
      alternatives.push_back(m);
    }
  }
  if (alternatives.empty()) {
    for (const auto& m : members) {
      if (fold(m) != fold(opener->member)) alternatives.push_back(m);
    }
  }
  if (alternatives.empty()) return std::string(text);
  std::uniform_int_distribution<std::size_t> dist(0, alternatives.size() - 1);
  return alternatives[dist(rng)] + std::string(text.substr(opener->length));
}

Rendered render_output(std::string_view text, std::span<const SsmlPause> pauses) {
  static const std::regex kTag(R"(<[^<>]*>)");
  static const std::regex kBreak(
      R"(^<\s*break\b[^>]*?time\s*=\s*["']?(\d+)\s*(ms|s)["']?[^>]*>$)",
      std::regex::icase);

  Rendered out;
  std::vector<SsmlPause> all;
  std::string source(text);
  std::size_t last = 0;
  for (auto it = std::sregex_iterator(source.begin(), source.end(), kTag);
       it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.plain.append(source, last, static_cast<std::size_t>(m.position()) - last);
    std::smatch bm;
    std::string tag = m.str();
    if (std::regex_match(tag, bm, kBreak)) {
      int amount = std::stoi(bm[1].str());
      std::string unit = bm[2].str();
      std::transform(unit.begin(), unit.end(), unit.begin(), ::tolower);
      all.push_back({out.plain.size(), unit == "s" ? amount * 1000 : amount});
    }
    last = static_cast<std::size_t>(m.position() + m.length());
  }
  out.plain.append(source, last, std::string::npos);
  std::erase_if(out.plain, [](char c) { return c == '<' || c == '>'; });

  for (const auto& p : pauses) {
    if (p.offset > out.plain.size() ||
        (p.offset < out.plain.size() && is_continuation_byte(out.plain[p.offset])) ||
        p.millis <= 0) {
      out.warnings.push_back("dropped pause at offset " + std::to_string(p.offset));
      continue;
    }
    all.push_back(p);
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.offset < b.offset; });

  std::size_t pos = 0;
  for (const auto& p : all) {
    if (p.offset > out.plain.size()) continue;
    out.marked += escape(std::string_view(out.plain).substr(pos, p.offset - pos));
    out.marked += "<break time=\"" + std::to_string(p.millis) + "ms\"/>";
    pos = p.offset;
  }
  out.marked += escape(std::string_view(out.plain).substr(pos));
  return out;
}

Rendered render_output(const ResponseCandidate& c) {
  return render_output(c.text, c.ssml_pauses);
}

}  // namespace socialbot
