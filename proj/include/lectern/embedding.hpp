#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include "lectern/matrix.hpp"
#include "lectern/sentences.hpp"

namespace lectern::embed {

/// N x E matrix, row i = embedding of retained sentence i.
using EmbeddingMatrix = Matrix;

enum class Backend { hashed, transformer, ensemble };
enum class Pooling { mean, max, cls };

std::string_view to_string(Backend b);
std::string_view to_string(Pooling p);
Backend backend_from_string(std::string_view s);
Pooling pooling_from_string(std::string_view s);

struct EmbedderConfig {
  Backend backend = Backend::hashed;
  int layer_offset = -2;  // hidden layer counted from the top; -1 = last
  Pooling pooling = Pooling::mean;
  std::size_t hashed_dim = 256;
  bool include_special_tokens = true;
  std::vector<EmbedderConfig> ensemble_members;  // exactly 2 when backend==ensemble

  void validate() const;  // throws invalid_params
  bool operator==(const EmbedderConfig&) const = default;
};

/// Per-sentence transformer output: one W x E matrix per encoder layer
/// (layers.front() = first layer, layers.back() = last) plus the pooled
/// classification vector. W counts real tokens only; no padding is present.
struct TokenEmbeddings {
  std::size_t tokens = 0;  // W
  std::vector<Matrix> layers;
  std::vector<double> pooled_cls;
  std::size_t special_prefix = 0;  // leading marker tokens ([CLS])
  std::size_t special_suffix = 0;  // trailing marker tokens ([SEP])
};

/// Reduce one sentence's token vectors to a length-E embedding. mean/max pool
/// the layer selected by layer_offset; cls returns the pooled classification
/// vector regardless of layer_offset.
std::vector<double> pool_tokens(const TokenEmbeddings& token_embeddings,
                                const EmbedderConfig& config);

/// Deterministic model-free backend: bag of FNV-1a-hashed tokens, one bucket
/// per dimension, L2-normalized per row (all-zero rows stay zero). Identical
/// across runs and platforms.
EmbeddingMatrix hashed_embed(const std::vector<text::Sentence>& sentences,
                             std::size_t hashed_dim);

/// Project to the top-2 principal directions of the sample covariance.
/// Columns are mean-centered first; each direction is oriented so its
/// largest-magnitude coefficient is positive. Requires N >= 2.
Matrix pca_project(const EmbeddingMatrix& matrix);

class EmbeddingEngine;

/// Side-by-side concatenation of two member embeddings; each member block is
/// L2-normalized per row before concatenation.
EmbeddingMatrix ensemble_embed(const std::vector<text::Sentence>& sentences,
                               const std::vector<EmbedderConfig>& members,
                               const EmbeddingEngine& engine);

namespace detail {
class TransformerModel;
}

/// Dispatches embed calls to the configured backend and owns the (lazily
/// loaded) transformer model. Immutable after construction; embed calls are
/// safe concurrently.
class EmbeddingEngine {
 public:
  explicit EmbeddingEngine(std::optional<std::filesystem::path> model_dir = {});
  ~EmbeddingEngine();

  EmbeddingEngine(const EmbeddingEngine&) = delete;
  EmbeddingEngine& operator=(const EmbeddingEngine&) = delete;

  EmbeddingMatrix embed_sentences(const std::vector<text::Sentence>& sentences,
                                  const EmbedderConfig& config) const;

  /// Count of top-level embed_sentences calls; zero on pure cache hits.
  std::uint64_t invocations() const { return calls_.load(); }

  /// Loaded transformer, or throws model_unavailable.
  const detail::TransformerModel& model() const;

  bool has_model_dir() const { return model_dir_.has_value(); }

 private:
  EmbeddingMatrix dispatch(const std::vector<text::Sentence>& sentences,
                           const EmbedderConfig& config) const;

  friend EmbeddingMatrix ensemble_embed(const std::vector<text::Sentence>&,
                                        const std::vector<EmbedderConfig>&,
                                        const EmbeddingEngine&);

  std::optional<std::filesystem::path> model_dir_;
  mutable std::once_flag load_once_;
  mutable std::unique_ptr<detail::TransformerModel> model_;
  mutable std::string load_error_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

}  // namespace lectern::embed
