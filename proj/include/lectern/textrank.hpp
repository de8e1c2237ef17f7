#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "lectern/matrix.hpp"
#include "lectern/sentences.hpp"

namespace lectern::textrank {

struct SimilarityGraph {
  std::size_t n = 0;
  Matrix weights;  // symmetric, zero diagonal, nonnegative
};

/// |shared distinct lowercased tokens| / (ln(1+|tokens a|) + ln(1+|tokens b|));
/// 0 when either sentence has no tokens. An optional stopword set is removed
/// from both sides before counting.
double sentence_similarity(const text::Sentence& a, const text::Sentence& b,
                           const std::set<std::string>* stopwords = nullptr);

SimilarityGraph build_similarity_graph(const std::vector<text::Sentence>& sentences,
                                       const std::set<std::string>* stopwords = nullptr);

/// Weighted PageRank by power iteration from a uniform start. Nodes with zero
/// out-weight distribute their mass uniformly. Scores sum to 1.
std::vector<double> pagerank(const SimilarityGraph& graph, double damping = 0.85,
                             double tol = 1e-6, std::size_t max_iter = 200);

/// Indices of the k highest-scoring sentences (ties toward the lower index),
/// sorted ascending so the summary keeps original order.
std::vector<std::size_t> textrank_summarize(
    const std::vector<text::Sentence>& sentences, std::size_t k,
    const std::set<std::string>* stopwords = nullptr);

}  // namespace lectern::textrank
