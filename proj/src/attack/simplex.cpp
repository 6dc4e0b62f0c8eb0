#include "sattack/attack/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sattack/core/error.hpp"

namespace sattack {

AttentionWeights::AttentionWeights(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) throw Error(ErrorCode::shape, "attention weights do not match shape");
}

AttentionWeights AttentionWeights::uniform(std::size_t rows, std::size_t cols) {
  const double v = 1.0 / static_cast<double>(rows * cols);
  return AttentionWeights(rows, cols, std::vector<double>(rows * cols, v));
}

AttentionWeights AttentionWeights::one_hot(std::size_t rows, std::size_t cols, std::size_t row, std::size_t col) {
  std::vector<double> v(rows * cols, 0.0);
  v.at(row * cols + col) = 1.0;
  return AttentionWeights(rows, cols, std::move(v));
}

bool AttentionWeights::on_simplex(double tol) const {
  if (values_.empty()) return false;
  double total = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v) || v < -tol) return false;
    total += v;
  }
  return std::abs(total - 1.0) <= tol;
}

bool AttentionWeights::is_one_hot() const {
  std::size_t ones = 0;
  for (double v : values_) {
    if (v == 1.0) {
      ++ones;
    } else if (v != 0.0) {
      return false;
    }
  }
  return ones == 1;
}

std::vector<double> project_simplex(std::span<const double> w) {
  if (w.empty()) return {};
  std::vector<double> sorted(w.begin(), w.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  std::vector<double> out(w.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[i] = std::max(w[i] - theta, 0.0);
    total += out[i];
  }
  // Remove the last bit of rounding so the sum is 1 to machine precision.
  if (total > 0.0) {
    for (double& v : out) v /= total;
  }
  return out;
}

AttentionWeights project_simplex(std::size_t rows, std::size_t cols, std::span<const double> raw) {
  if (raw.size() != rows * cols) throw Error(ErrorCode::shape, "raw weights do not match shape");
  return AttentionWeights(rows, cols, project_simplex(raw));
}

}  // namespace sattack
