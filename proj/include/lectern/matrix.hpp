#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lectern {

/// Dense row-major matrix of doubles. Row i of an embedding matrix
/// corresponds to retained sentence i.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  bool all_finite() const;

  static Matrix identity(std::size_t n);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);
double euclidean_distance(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues sorted descending; eigenvectors(:,j) matches
/// eigenvalues[j]. Deterministic for identical input.
void jacobi_eigen_symmetric(const Matrix& a, std::vector<double>& eigenvalues,
                            Matrix& eigenvectors);

}  // namespace lectern
