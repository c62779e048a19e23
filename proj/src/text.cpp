#include "socialbot/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace socialbot {

namespace {

// Folding for the U+00C0..U+00FF block, indexed by (second byte - 0x80) of
// a C3-prefixed UTF-8 sequence. '\0' means "drop".
using namespace std::string_view_literals;
constexpr std::string_view kLatin1Fold =
    "aaaaaaaceeeeiiii"  // C0-CF
    "dnooooo\0ouuuuyts"  // D0-DF (D7 is the multiplication sign)
    "aaaaaaaceeeeiiii"  // E0-EF
    "dnooooo\0ouuuuyty"sv;  // F0-FF

constexpr std::array<std::string_view, 13> kContractions = {
    "it's", "he's", "she's", "that's", "what's", "who's", "where's",
    "how's", "there's", "here's", "let's", "when's", "why's"};

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'';
}

}  // namespace

std::string fold(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    auto c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      out.push_back(static_cast<char>(std::tolower(c)));
      continue;
    }
    if (c == 0xC3 && i + 1 < text.size()) {
      auto next = static_cast<unsigned char>(text[i + 1]);
      if (next >= 0x80 && next <= 0xBF) {
        char mapped = kLatin1Fold[next - 0x80];
        if (mapped != '\0') out.push_back(mapped);
        ++i;
        continue;
      }
    }
    // U+2018/U+2019 (E2 80 98/99) become a plain apostrophe.
    if (c == 0xE2 && i + 2 < text.size() &&
        static_cast<unsigned char>(text[i + 1]) == 0x80) {
      auto last = static_cast<unsigned char>(text[i + 2]);
      if (last == 0x98 || last == 0x99) {
        out.push_back('\'');
        i += 2;
        continue;
      }
      if (last == 0x9C || last == 0x9D) {
        out.push_back('"');
        i += 2;
        continue;
      }
    }
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::string trim(std::string_view text) {
  auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(begin, end - begin + 1));
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(text.substr(start));
      break;
    }
    parts.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::string join(std::span<const std::string> parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

bool is_contraction(std::string_view token) {
  return std::find(kContractions.begin(), kContractions.end(), token) !=
         kContractions.end();
}

std::vector<std::string> tokenize(std::string_view text) {
  std::string folded = fold(text);
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    while (!current.empty() && current.front() == '\'') current.erase(0, 1);
    while (!current.empty() && current.back() == '\'') current.pop_back();
    if (current.size() > 2 && ends_with(current, "'s") &&
        !is_contraction(current)) {
      current.resize(current.size() - 2);
    }
    if (!current.empty()) tokens.push_back(current);
    current.clear();
  };
  for (char c : folded) {
    if (is_word_char(c)) {
      current.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string capitalize(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    }
  }
  return out;
}

bool ends_with(std::string_view text, std::string_view suffix) {
  return text.size() >= suffix.size() &&
         text.substr(text.size() - suffix.size()) == suffix;
}

}  // namespace socialbot
