#include "lectern/sentences.hpp"

#include <algorithm>
#include <cctype>

namespace lectern::text {

namespace {

const std::set<std::string>& protected_abbreviations() {
  static const std::set<std::string> abbrevs = {
      "dr.",  "mr.",  "mrs.", "ms.",  "prof.", "st.",  "jr.",  "sr.",
      "u.s.", "u.k.", "e.g.", "i.e.", "etc.",  "vs.",  "fig.", "no.",
      "al.",  "approx.", "dept.", "inc."};
  return abbrevs;
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_closing(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Decodes the UTF-8 code point starting at i; returns 0 on malformed input.
uint32_t codepoint_at(std::string_view s, std::size_t i, std::size_t& len) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    len = 1;
    return b0;
  }
  std::size_t n = (b0 & 0xE0) == 0xC0 ? 2 : (b0 & 0xF0) == 0xE0 ? 3 : 4;
  if (i + n > s.size()) {
    len = 1;
    return 0;
  }
  uint32_t cp = b0 & (0xFFu >> (n + 1));
  for (std::size_t k = 1; k < n; ++k)
    cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3Fu);
  len = n;
  return cp;
}

bool is_quote_cp(uint32_t cp) {
  return cp == '"' || cp == '\'' || cp == 0x2018 || cp == 0x2019 || cp == 0x201C ||
         cp == 0x201D || cp == 0xAB || cp == 0xBB;
}

bool is_closing_cp(uint32_t cp) {
  return (cp < 0x80 && is_closing(static_cast<char>(cp))) || cp == 0x2019 ||
         cp == 0x201D;
}

// Token ending at position `end` (exclusive), lowercased with leading
// punctuation stripped; used for the abbreviation check.
std::string trailing_token(std::string_view s, std::size_t end) {
  std::size_t b = end;
  while (b > 0 && !std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  while (b < end && !std::isalnum(static_cast<unsigned char>(s[b]))) ++b;
  return to_lower(s.substr(b, end - b));
}

std::string collapse(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

std::string strip_token_punct(std::string_view token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && !std::isalnum(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && !std::isalnum(static_cast<unsigned char>(token[e - 1]))) --e;
  return std::string(token.substr(b, e - b));
}

}  // namespace

std::vector<Sentence> segment_sentences(std::string_view text) {
  std::vector<Sentence> sentences;
  std::size_t start = 0;
  std::size_t index = 0;

  auto emit = [&](std::size_t end) {
    const std::string cleaned = collapse(text.substr(start, end - start));
    if (!cleaned.empty()) sentences.push_back(Sentence{index++, cleaned});
    start = end;
  };

  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && is_terminal(text[j])) ++j;  // absorb runs like "?!"

    std::size_t k = j;
    while (k < n) {  // closing quotes/brackets belong to this sentence
      std::size_t len;
      const uint32_t cp = codepoint_at(text, k, len);
      if (!is_closing_cp(cp)) break;
      k += len;
    }

    bool boundary = false;
    if (k >= n) {
      boundary = true;
    } else if (std::isspace(static_cast<unsigned char>(text[k]))) {
      std::size_t m = k;
      while (m < n && std::isspace(static_cast<unsigned char>(text[m]))) ++m;
      if (m >= n) {
        boundary = true;
      } else {
        std::size_t len;
        const uint32_t cp = codepoint_at(text, m, len);
        boundary = (cp < 0x80 && std::isupper(static_cast<int>(cp))) || is_quote_cp(cp);
      }
    }

    if (boundary && text[i] == '.' && j == i + 1 &&
        protected_abbreviations().count(trailing_token(text, j)) > 0) {
      boundary = false;
    }

    if (boundary) emit(k);
    i = j;
  }
  emit(n);
  return sentences;
}

std::vector<Sentence> filter_sentences(const std::vector<Sentence>& sentences,
                                       const FilterConfig& config) {
  std::vector<Sentence> kept;
  kept.reserve(sentences.size());
  std::vector<std::string> banned_lower;
  banned_lower.reserve(config.banned_patterns.size());
  for (const auto& p : config.banned_patterns) banned_lower.push_back(to_lower(p));

  for (const auto& sentence : sentences) {
    const std::string lower = to_lower(sentence.text);

    std::size_t tokens = 0;
    std::string first_token;
    std::size_t p = 0;
    while (p < sentence.text.size()) {
      while (p < sentence.text.size() &&
             std::isspace(static_cast<unsigned char>(sentence.text[p])))
        ++p;
      if (p >= sentence.text.size()) break;
      const std::size_t b = p;
      while (p < sentence.text.size() &&
             !std::isspace(static_cast<unsigned char>(sentence.text[p])))
        ++p;
      if (tokens == 0)
        first_token = to_lower(strip_token_punct(sentence.text.substr(b, p - b)));
      ++tokens;
    }

    if (config.leading_conjunctions.count(first_token) > 0) continue;
    if (tokens < config.min_tokens || tokens > config.max_tokens) continue;
    const bool banned = std::any_of(
        banned_lower.begin(), banned_lower.end(),
        [&](const std::string& pat) {
          return !pat.empty() && lower.find(pat) != std::string::npos;
        });
    if (banned) continue;
    kept.push_back(sentence);
  }
  return kept;
}

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || uc >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(uc)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::size_t token_count(std::string_view text) {
  std::size_t count = 0;
  std::size_t p = 0;
  while (p < text.size()) {
    while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
    if (p >= text.size()) break;
    ++count;
    while (p < text.size() && !std::isspace(static_cast<unsigned char>(text[p]))) ++p;
  }
  return count;
}

}  // namespace lectern::text
