#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "sattack/autodiff/tensor.hpp"

namespace sattack::ad {

class Tape;

/// Handle to a node recorded on a tape. Cheap to copy; valid while the tape
/// lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Tensor& value() const;
  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

enum class Op : std::uint8_t {
  leaf,
  add,
  add_row,  // rhs is 1×cols, broadcast over lhs rows
  sub,
  sub_row,
  mul,
  scale,
  matmul,
  tanh,
  relu,
  norm_rows,
  sum,
  mean,
  max_reduce,
  concat_rows,
  concat_cols,
  slice,
  gather_rows,
  segment_max,
  reshape,
};

namespace detail {

struct Node {
  Op op = Op::leaf;
  bool requires_grad = false;
  Tensor value;
  std::array<std::size_t, 2> in{};
  std::vector<std::size_t> many;      // concat inputs
  std::vector<std::size_t> index;     // gather rows, segment/argmax bookkeeping
  std::array<std::size_t, 4> aux{};   // slice bounds, argmax, group size
  double scalar = 0.0;
};

}  // namespace detail

/// Gradients produced by one backward pass, addressable by leaf.
class Gradients {
 public:
  /// dLoss/dVar; a zero tensor of matching shape when the node did not
  /// participate in the loss.
  Tensor of(Var v) const;

 private:
  friend class Tape;
  std::vector<Tensor> grads_;
  std::vector<std::array<std::size_t, 2>> shapes_;
};

/// Define-by-run record of primitive applications. Nodes are appended in
/// evaluation order, so every node's inputs precede it.
class Tape {
 public:
  Tape() { nodes_.reserve(512); }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Differentiable input.
  Var leaf(Tensor value, bool requires_grad = true);
  /// Input that never receives a gradient.
  Var constant(Tensor value) { return leaf(std::move(value), false); }

  /// Reverse sweep from a 1×1 loss. Throws Error(non_scalar_loss) otherwise.
  Gradients backward(Var loss) const;

  std::size_t size() const { return nodes_.size(); }
  const detail::Node& node(std::size_t id) const { return nodes_[id]; }
  Var push(detail::Node node);

 private:
  std::vector<detail::Node> nodes_;
};

inline const Tensor& Var::value() const { return tape_->node(id_).value; }

}  // namespace sattack::ad
