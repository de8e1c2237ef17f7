#include "lectern/summarizer.hpp"

#include <cmath>

#include "lectern/error.hpp"
#include "lectern/kmeans.hpp"
#include "lectern/textrank.hpp"

namespace lectern::pipeline {

using nlohmann::json;

std::string_view to_string(Method m) {
  return m == Method::cluster ? "cluster" : "textrank";
}

Method method_from_string(std::string_view s) {
  if (s == "cluster") return Method::cluster;
  if (s == "textrank") return Method::textrank;
  throw Error(ErrorCode::invalid_params, "unknown method: " + std::string(s));
}

void SummaryParams::validate() const {
  if (ratio.has_value() == count.has_value())
    throw Error(ErrorCode::invalid_params, "exactly one of ratio/count must be set");
  if (ratio && (!(*ratio > 0.0) || *ratio > 1.0))
    throw Error(ErrorCode::invalid_params, "ratio must lie in (0, 1]");
  if (count && *count < 1)
    throw Error(ErrorCode::invalid_params, "count must be >= 1");
  if (filter.min_tokens >= filter.max_tokens)
    throw Error(ErrorCode::invalid_params, "min_tokens must be < max_tokens");
  if (filter.min_tokens == 0)
    throw Error(ErrorCode::invalid_params, "min_tokens must be positive");
  embedder.validate();
}

json embedder_config_to_json(const embed::EmbedderConfig& config) {
  json doc;
  doc["backend"] = std::string(embed::to_string(config.backend));
  doc["layer_offset"] = config.layer_offset;
  doc["pooling"] = std::string(embed::to_string(config.pooling));
  doc["hashed_dim"] = config.hashed_dim;
  doc["include_special_tokens"] = config.include_special_tokens;
  if (config.backend == embed::Backend::ensemble) {
    json members = json::array();
    for (const auto& m : config.ensemble_members)
      members.push_back(embedder_config_to_json(m));
    doc["ensemble_members"] = std::move(members);
  }
  return doc;
}

embed::EmbedderConfig embedder_config_from_json(const json& doc) {
  embed::EmbedderConfig config;
  try {
    if (doc.contains("backend"))
      config.backend = embed::backend_from_string(doc.at("backend").get<std::string>());
    if (doc.contains("layer_offset")) config.layer_offset = doc.at("layer_offset").get<int>();
    if (doc.contains("pooling"))
      config.pooling = embed::pooling_from_string(doc.at("pooling").get<std::string>());
    if (doc.contains("hashed_dim"))
      config.hashed_dim = doc.at("hashed_dim").get<std::size_t>();
    if (doc.contains("include_special_tokens"))
      config.include_special_tokens = doc.at("include_special_tokens").get<bool>();
    if (doc.contains("ensemble_members"))
      for (const auto& m : doc.at("ensemble_members"))
        config.ensemble_members.push_back(embedder_config_from_json(m));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_params, std::string("bad embedder config: ") + e.what());
  }
  return config;
}

json filter_config_to_json(const text::FilterConfig& config) {
  json doc;
  doc["min_tokens"] = config.min_tokens;
  doc["max_tokens"] = config.max_tokens;
  doc["leading_conjunctions"] =
      std::vector<std::string>(config.leading_conjunctions.begin(),
                               config.leading_conjunctions.end());
  doc["banned_patterns"] = config.banned_patterns;
  return doc;
}

text::FilterConfig filter_config_from_json(const json& doc) {
  text::FilterConfig config;
  try {
    if (doc.contains("min_tokens")) config.min_tokens = doc.at("min_tokens").get<std::size_t>();
    if (doc.contains("max_tokens")) config.max_tokens = doc.at("max_tokens").get<std::size_t>();
    if (doc.contains("leading_conjunctions")) {
      config.leading_conjunctions.clear();
      for (const auto& w : doc.at("leading_conjunctions"))
        config.leading_conjunctions.insert(w.get<std::string>());
    }
    if (doc.contains("banned_patterns"))
      config.banned_patterns = doc.at("banned_patterns").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_params, std::string("bad filter config: ") + e.what());
  }
  return config;
}

json SummaryParams::to_canonical_json() const {
  json doc;
  if (ratio) doc["ratio"] = *ratio;
  if (count) doc["count"] = *count;
  doc["method"] = std::string(to_string(method));
  doc["embedder"] = embedder_config_to_json(embedder);
  doc["filter"] = filter_config_to_json(filter);
  doc["seed"] = seed;
  return doc;
}

SummaryParams SummaryParams::from_json(const json& doc) {
  SummaryParams params;
  try {
    if (doc.contains("ratio")) params.ratio = doc.at("ratio").get<double>();
    if (doc.contains("count")) params.count = doc.at("count").get<std::int64_t>();
    if (doc.contains("method"))
      params.method = method_from_string(doc.at("method").get<std::string>());
    if (doc.contains("embedder"))
      params.embedder = embedder_config_from_json(doc.at("embedder"));
    if (doc.contains("filter"))
      params.filter = filter_config_from_json(doc.at("filter"));
    if (doc.contains("seed")) params.seed = doc.at("seed").get<std::int64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_params, std::string("bad params: ") + e.what());
  }
  params.validate();
  return params;
}

std::size_t resolve_k(const SummaryParams& params, std::size_t n_retained) {
  params.validate();
  if (n_retained == 0)
    throw Error(ErrorCode::invalid_params, "n_retained must be positive");
  if (params.count)
    return std::min(static_cast<std::size_t>(*params.count), n_retained);
  const double raw = *params.ratio * static_cast<double>(n_retained);
  const auto rounded = static_cast<std::size_t>(std::floor(raw + 0.5));  // half-up
  return std::clamp<std::size_t>(rounded, 1, n_retained);
}

SummaryRecord summarize_lecture(const LectureTranscript& transcript,
                                const SummaryParams& params,
                                const embed::EmbeddingEngine& engine) {
  params.validate();
  if (transcript.content.empty())
    throw Error(ErrorCode::empty_content, "transcript content is empty");

  const std::vector<text::Sentence> segmented = text::segment_sentences(transcript.content);
  const std::vector<text::Sentence> retained =
      text::filter_sentences(segmented, params.filter);
  if (retained.empty())
    throw Error(ErrorCode::no_sentences_retained,
                "filtering removed every candidate sentence");

  const std::size_t k = resolve_k(params, retained.size());

  std::vector<std::size_t> indices;
  if (params.method == Method::cluster) {
    const embed::EmbeddingMatrix matrix = engine.embed_sentences(retained, params.embedder);
    const cluster::KMeansOptions options{static_cast<std::uint64_t>(params.seed), 300, 1e-4};
    const cluster::ClusterResult result = cluster::kmeans_fit(matrix, k, options);
    indices = cluster::select_centroid_sentences(result, matrix);
  } else {
    indices = textrank::textrank_summarize(retained, k);
  }

  SummaryRecord record;
  record.lecture_id = transcript.id;
  record.params = params;
  record.sentence_indices = indices;
  for (const std::size_t idx : indices) {
    if (!record.text.empty()) record.text.push_back(' ');
    record.text += retained[idx].text;
  }
  return record;
}

}  // namespace lectern::pipeline
