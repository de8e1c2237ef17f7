#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lectern::text {

struct Sentence {
  std::size_t original_index = 0;  // position among all segmented sentences
  std::string text;                // trimmed, internal whitespace collapsed

  bool operator==(const Sentence&) const = default;
};

struct FilterConfig {
  std::size_t min_tokens = 5;
  std::size_t max_tokens = 90;
  std::set<std::string> leading_conjunctions = {
      "and", "but", "or", "so", "yet", "nor", "for", "because", "although", "though"};
  std::vector<std::string> banned_patterns = {"quiz"};

  bool operator==(const FilterConfig&) const = default;
};

/// Split paragraph text into sentences on terminal punctuation followed by
/// whitespace and an uppercase letter or quote (or end of text). Common
/// abbreviations (Dr., Mrs., U.S., e.g., ...) and decimal numbers do not end
/// a sentence.
std::vector<Sentence> segment_sentences(std::string_view text);

/// Drop sentences that start with a conjunction, fall outside the token-count
/// bounds, or contain a banned pattern (case-insensitive substring).
/// Survivors keep their order and original_index.
std::vector<Sentence> filter_sentences(const std::vector<Sentence>& sentences,
                                       const FilterConfig& config);

/// Lowercased tokens split on non-alphanumeric boundaries. Bytes >= 0x80 are
/// treated as word characters so UTF-8 words stay whole.
std::vector<std::string> word_tokens(std::string_view text);

/// Number of whitespace-delimited tokens.
std::size_t token_count(std::string_view text);

}  // namespace lectern::text
