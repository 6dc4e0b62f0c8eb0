#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sattack {

/// Attention weight matrix W over (neighbor, prediction timestep) cells.
class AttentionWeights {
 public:
  AttentionWeights() = default;
  AttentionWeights(std::size_t rows, std::size_t cols, std::vector<double> values);

  /// Every cell 1/(rows·cols).
  static AttentionWeights uniform(std::size_t rows, std::size_t cols);
  static AttentionWeights one_hot(std::size_t rows, std::size_t cols, std::size_t row, std::size_t col);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t j, std::size_t t) const { return values_[j * cols_ + t]; }
  const std::vector<double>& values() const { return values_; }

  /// Entries ≥ −tol and sum within tol of 1.
  bool on_simplex(double tol = 1e-9) const;
  bool is_one_hot() const;

  friend bool operator==(const AttentionWeights&, const AttentionWeights&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Euclidean projection onto the probability simplex (sort and threshold).
std::vector<double> project_simplex(std::span<const double> w);

AttentionWeights project_simplex(std::size_t rows, std::size_t cols, std::span<const double> raw);

}  // namespace sattack
