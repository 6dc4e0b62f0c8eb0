#include "sattack/autodiff/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "sattack/core/error.hpp"

namespace sattack::ad {

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw Error(ErrorCode::shape, "tensor data does not match its shape");
}

double Tensor::item() const {
  if (data_.size() != 1) throw Error(ErrorCode::shape, "item() on a non-scalar tensor");
  return data_[0];
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

}  // namespace sattack::ad
