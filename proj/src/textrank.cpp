#include "lectern/textrank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lectern/error.hpp"

namespace lectern::textrank {

namespace {

std::vector<std::string> tokens_without_stopwords(
    const text::Sentence& s, const std::set<std::string>* stopwords) {
  std::vector<std::string> tokens = text::word_tokens(s.text);
  if (stopwords != nullptr) {
    std::erase_if(tokens,
                  [&](const std::string& t) { return stopwords->count(t) > 0; });
  }
  return tokens;
}

}  // namespace

double sentence_similarity(const text::Sentence& a, const text::Sentence& b,
                           const std::set<std::string>* stopwords) {
  const std::vector<std::string> ta = tokens_without_stopwords(a, stopwords);
  const std::vector<std::string> tb = tokens_without_stopwords(b, stopwords);
  if (ta.empty() || tb.empty()) return 0.0;

  const std::set<std::string> sa(ta.begin(), ta.end());
  const std::set<std::string> sb(tb.begin(), tb.end());
  std::size_t shared = 0;
  for (const auto& t : sa) shared += sb.count(t);
  if (shared == 0) return 0.0;

  const double denom = std::log(1.0 + static_cast<double>(ta.size())) +
                       std::log(1.0 + static_cast<double>(tb.size()));
  return static_cast<double>(shared) / denom;
}

SimilarityGraph build_similarity_graph(const std::vector<text::Sentence>& sentences,
                                       const std::set<std::string>* stopwords) {
  SimilarityGraph graph;
  graph.n = sentences.size();
  graph.weights = Matrix(graph.n, graph.n, 0.0);
  for (std::size_t i = 0; i < graph.n; ++i)
    for (std::size_t j = i + 1; j < graph.n; ++j) {
      const double w = sentence_similarity(sentences[i], sentences[j], stopwords);
      graph.weights(i, j) = w;
      graph.weights(j, i) = w;
    }
  return graph;
}

std::vector<double> pagerank(const SimilarityGraph& graph, double damping, double tol,
                             std::size_t max_iter) {
  const std::size_t n = graph.n;
  if (n == 0) throw Error(ErrorCode::empty_graph, "pagerank needs at least one node");
  if (damping <= 0.0 || damping >= 1.0)
    throw Error(ErrorCode::invalid_params, "damping must lie in (0,1)");

  std::vector<double> out_weight(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += graph.weights(j, i);
    out_weight[j] = acc;
  }

  std::vector<double> scores(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n, 0.0);
  const double base = (1.0 - damping) / static_cast<double>(n);

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    double isolated_mass = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (out_weight[j] == 0.0) isolated_mass += scores[j];
    isolated_mass /= static_cast<double>(n);

    for (std::size_t i = 0; i < n; ++i) {
      double acc = isolated_mass;
      for (std::size_t j = 0; j < n; ++j) {
        if (out_weight[j] > 0.0)
          acc += graph.weights(j, i) * scores[j] / out_weight[j];
      }
      next[i] = base + damping * acc;
    }

    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) delta += std::abs(next[i] - scores[i]);
    scores.swap(next);
    if (delta <= tol) break;
  }
  return scores;
}

std::vector<std::size_t> textrank_summarize(const std::vector<text::Sentence>& sentences,
                                            std::size_t k,
                                            const std::set<std::string>* stopwords) {
  const std::size_t n = sentences.size();
  if (k == 0) throw Error(ErrorCode::invalid_params, "k must be positive");
  if (k > n)
    throw Error(ErrorCode::k_too_large,
                "k=" + std::to_string(k) + " exceeds sentence count " + std::to_string(n));

  const SimilarityGraph graph = build_similarity_graph(sentences, stopwords);
  const std::vector<double> scores = pagerank(graph);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];  // stable keeps the lower index on ties
  });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace lectern::textrank
