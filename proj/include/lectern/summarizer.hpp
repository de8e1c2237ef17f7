#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lectern/embedding.hpp"
#include "lectern/sentences.hpp"

namespace lectern::pipeline {

enum class Method { cluster, textrank };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

struct LectureTranscript {
  std::int64_t id = 0;
  std::string name;
  std::string content;  // paragraph text
  std::string created_at;
};

struct SummaryParams {
  std::optional<double> ratio;        // (0,1]; exactly one of ratio/count set
  std::optional<std::int64_t> count;  // >= 1
  Method method = Method::cluster;
  embed::EmbedderConfig embedder;
  text::FilterConfig filter;
  std::int64_t seed = 12345;

  void validate() const;

  /// Defaults-filled document with sorted keys; its dump() is the cache
  /// identity string, so two requests differing only by omitted defaults
  /// collide as intended.
  nlohmann::json to_canonical_json() const;
  static SummaryParams from_json(const nlohmann::json& doc);

  bool operator==(const SummaryParams&) const = default;
};

struct SummaryRecord {
  std::int64_t id = 0;
  std::int64_t lecture_id = 0;
  std::string name;
  SummaryParams params;
  std::vector<std::size_t> sentence_indices;  // retained-list indices, ascending
  std::string text;                           // selected sentences joined by spaces
  std::string created_at;
};

nlohmann::json embedder_config_to_json(const embed::EmbedderConfig& config);
embed::EmbedderConfig embedder_config_from_json(const nlohmann::json& doc);
nlohmann::json filter_config_to_json(const text::FilterConfig& config);
text::FilterConfig filter_config_from_json(const nlohmann::json& doc);

/// K for a retained-sentence count: count mode caps at n, ratio mode rounds
/// half-up and clamps to [1, n].
std::size_t resolve_k(const SummaryParams& params, std::size_t n_retained);

/// segment -> filter -> embed -> cluster -> select (or the TextRank path);
/// fills sentence_indices and text, leaving id/created_at for the store.
SummaryRecord summarize_lecture(const LectureTranscript& transcript,
                                const SummaryParams& params,
                                const embed::EmbeddingEngine& engine);

}  // namespace lectern::pipeline
