#include "lectern/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "lectern/error.hpp"
#include "lectern/transformer.hpp"

namespace lectern::embed {

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::hashed: return "hashed";
    case Backend::transformer: return "transformer";
    case Backend::ensemble: return "ensemble";
  }
  return "hashed";
}

std::string_view to_string(Pooling p) {
  switch (p) {
    case Pooling::mean: return "mean";
    case Pooling::max: return "max";
    case Pooling::cls: return "cls";
  }
  return "mean";
}

Backend backend_from_string(std::string_view s) {
  if (s == "hashed") return Backend::hashed;
  if (s == "transformer") return Backend::transformer;
  if (s == "ensemble") return Backend::ensemble;
  throw Error(ErrorCode::invalid_params, "unknown backend: " + std::string(s));
}

Pooling pooling_from_string(std::string_view s) {
  if (s == "mean") return Pooling::mean;
  if (s == "max") return Pooling::max;
  if (s == "cls") return Pooling::cls;
  throw Error(ErrorCode::invalid_params, "unknown pooling: " + std::string(s));
}

void EmbedderConfig::validate() const {
  if (layer_offset > -1)
    throw Error(ErrorCode::invalid_params, "layer_offset must be <= -1");
  if (backend == Backend::hashed && hashed_dim < 8)
    throw Error(ErrorCode::invalid_params, "hashed_dim must be >= 8");
  if (backend == Backend::ensemble) {
    if (ensemble_members.size() != 2)
      throw Error(ErrorCode::invalid_params, "ensemble requires exactly 2 members");
    for (const auto& member : ensemble_members) {
      if (member.backend == Backend::ensemble)
        throw Error(ErrorCode::invalid_params, "ensemble members cannot be ensembles");
      member.validate();
    }
  } else if (!ensemble_members.empty()) {
    throw Error(ErrorCode::invalid_params,
                "ensemble_members only valid for the ensemble backend");
  }
}

std::vector<double> pool_tokens(const TokenEmbeddings& token_embeddings,
                                const EmbedderConfig& config) {
  if (config.pooling == Pooling::cls) {
    if (token_embeddings.pooled_cls.empty())
      throw Error(ErrorCode::invalid_params, "no pooled classification vector present");
    return token_embeddings.pooled_cls;
  }

  const auto layer_count = static_cast<int>(token_embeddings.layers.size());
  if (config.layer_offset > -1 || -config.layer_offset > layer_count)
    throw Error(ErrorCode::layer_out_of_range,
                "layer_offset " + std::to_string(config.layer_offset) +
                    " outside [-" + std::to_string(layer_count) + ", -1]");
  const Matrix& layer =
      token_embeddings.layers[static_cast<std::size_t>(layer_count + config.layer_offset)];

  std::size_t begin = 0;
  std::size_t end = layer.rows();
  if (!config.include_special_tokens) {
    begin = token_embeddings.special_prefix;
    const std::size_t suffix = token_embeddings.special_suffix;
    if (begin + suffix < end) {
      end -= suffix;
    } else {
      begin = 0;  // sentence tokenized to markers only; pool everything
    }
  }

  const std::size_t dim = layer.cols();
  std::vector<double> pooled(dim, 0.0);
  if (config.pooling == Pooling::mean) {
    for (std::size_t t = begin; t < end; ++t)
      for (std::size_t j = 0; j < dim; ++j) pooled[j] += layer(t, j);
    const auto count = static_cast<double>(end - begin);
    for (double& x : pooled) x /= count;
  } else {
    for (std::size_t j = 0; j < dim; ++j) pooled[j] = layer(begin, j);
    for (std::size_t t = begin + 1; t < end; ++t)
      for (std::size_t j = 0; j < dim; ++j) pooled[j] = std::max(pooled[j], layer(t, j));
  }
  return pooled;
}

namespace {

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

void normalize_row(std::span<double> row) {
  const double norm = l2_norm(row);
  if (norm > 0.0)
    for (double& x : row) x /= norm;
}

}  // namespace

EmbeddingMatrix hashed_embed(const std::vector<text::Sentence>& sentences,
                             std::size_t hashed_dim) {
  if (hashed_dim < 8)
    throw Error(ErrorCode::invalid_params, "hashed_dim must be >= 8");
  EmbeddingMatrix matrix(sentences.size(), hashed_dim, 0.0);
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    for (const auto& token : text::word_tokens(sentences[i].text))
      matrix(i, fnv1a64(token) % hashed_dim) += 1.0;
    normalize_row(matrix.row(i));
  }
  return matrix;
}

EmbeddingMatrix ensemble_embed(const std::vector<text::Sentence>& sentences,
                               const std::vector<EmbedderConfig>& members,
                               const EmbeddingEngine& engine) {
  if (members.size() != 2)
    throw Error(ErrorCode::invalid_params, "ensemble requires exactly 2 members");
  std::vector<EmbeddingMatrix> blocks;
  blocks.reserve(members.size());
  for (const auto& member : members) {
    member.validate();
    if (member.backend == Backend::ensemble)
      throw Error(ErrorCode::invalid_params, "ensemble members cannot be ensembles");
    blocks.push_back(engine.dispatch(sentences, member));
  }

  std::size_t total_dim = 0;
  for (auto& block : blocks) {
    for (std::size_t i = 0; i < block.rows(); ++i) normalize_row(block.row(i));
    total_dim += block.cols();
  }

  EmbeddingMatrix combined(sentences.size(), total_dim, 0.0);
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    std::size_t col = 0;
    for (const auto& block : blocks)
      for (std::size_t j = 0; j < block.cols(); ++j) combined(i, col++) = block(i, j);
  }
  return combined;
}

Matrix pca_project(const EmbeddingMatrix& matrix) {
  const std::size_t n = matrix.rows();
  const std::size_t dim = matrix.cols();
  if (n < 2)
    throw Error(ErrorCode::degenerate_input, "pca_project requires at least 2 rows");

  std::vector<double> mean(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim; ++j) mean[j] += matrix(i, j);
  for (double& m : mean) m /= static_cast<double>(n);

  Matrix centered(n, dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim; ++j) centered(i, j) = matrix(i, j) - mean[j];

  const double denom = static_cast<double>(n - 1);
  std::vector<std::vector<double>> directions(2, std::vector<double>(dim, 0.0));

  if (dim <= n) {
    Matrix cov(dim, dim);
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = a; b < dim; ++b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += centered(i, a) * centered(i, b);
        cov(a, b) = cov(b, a) = acc / denom;
      }
    std::vector<double> vals;
    Matrix vecs;
    jacobi_eigen_symmetric(cov, vals, vecs);
    for (std::size_t j = 0; j < 2 && j < dim; ++j)
      for (std::size_t a = 0; a < dim; ++a) directions[j][a] = vecs(a, j);
  } else {
    // N < E: eigendecompose the N x N Gram matrix instead; nonzero spectra
    // coincide and v = Xc^T u / |Xc^T u| recovers each direction.
    Matrix gram(n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) acc += centered(a, j) * centered(b, j);
        gram(a, b) = gram(b, a) = acc / denom;
      }
    std::vector<double> vals;
    Matrix vecs;
    jacobi_eigen_symmetric(gram, vals, vecs);
    const double floor = std::max(vals.empty() ? 0.0 : vals[0], 0.0) * 1e-12;
    for (std::size_t j = 0; j < 2 && j < n; ++j) {
      if (vals[j] <= floor) continue;  // rank-deficient: leave direction zero
      auto& v = directions[j];
      for (std::size_t a = 0; a < dim; ++a) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += centered(i, a) * vecs(i, j);
        v[a] = acc;
      }
      const double norm = l2_norm(v);
      if (norm > 0.0)
        for (double& x : v) x /= norm;
    }
  }

  for (auto& v : directions) {
    std::size_t arg = 0;
    for (std::size_t a = 1; a < dim; ++a)
      if (std::abs(v[a]) > std::abs(v[arg])) arg = a;
    if (v[arg] < 0.0)
      for (double& x : v) x = -x;
  }

  Matrix projected(n, 2, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      double acc = 0.0;
      for (std::size_t a = 0; a < dim; ++a) acc += centered(i, a) * directions[j][a];
      projected(i, j) = acc;
    }
  return projected;
}

EmbeddingEngine::EmbeddingEngine(std::optional<std::filesystem::path> model_dir)
    : model_dir_(std::move(model_dir)) {}

EmbeddingEngine::~EmbeddingEngine() = default;

const detail::TransformerModel& EmbeddingEngine::model() const {
  if (!model_dir_)
    throw Error(ErrorCode::model_unavailable, "no model directory configured");
  std::call_once(load_once_, [this] {
    try {
      model_ = detail::TransformerModel::load(*model_dir_);
    } catch (const std::exception& e) {
      load_error_ = e.what();
    }
  });
  if (!model_)
    throw Error(ErrorCode::model_unavailable,
                "model artifact unusable: " + load_error_);
  return *model_;
}

EmbeddingMatrix EmbeddingEngine::embed_sentences(
    const std::vector<text::Sentence>& sentences, const EmbedderConfig& config) const {
  if (sentences.empty())
    throw Error(ErrorCode::empty_input, "no sentences to embed");
  config.validate();
  calls_.fetch_add(1, std::memory_order_relaxed);
  return dispatch(sentences, config);
}

EmbeddingMatrix EmbeddingEngine::dispatch(const std::vector<text::Sentence>& sentences,
                                          const EmbedderConfig& config) const {
  switch (config.backend) {
    case Backend::hashed:
      return hashed_embed(sentences, config.hashed_dim);
    case Backend::ensemble:
      return ensemble_embed(sentences, config.ensemble_members, *this);
    case Backend::transformer: {
      const auto& m = model();
      EmbeddingMatrix matrix(sentences.size(), m.hidden_size(), 0.0);
      for (std::size_t i = 0; i < sentences.size(); ++i) {
        const TokenEmbeddings te = m.encode(sentences[i].text);
        const std::vector<double> row = pool_tokens(te, config);
        for (std::size_t j = 0; j < row.size(); ++j) matrix(i, j) = row[j];
      }
      return matrix;
    }
  }
  throw Error(ErrorCode::invalid_params, "unknown backend");
}

}  // namespace lectern::embed
