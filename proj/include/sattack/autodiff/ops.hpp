#pragma once

#include <span>
#include <vector>

#include "sattack/autodiff/tape.hpp"

namespace sattack::ad {

// Forward primitives. Each appends one node to the tape of its inputs and
// throws Error(shape) on incompatible shapes.

/// Elementwise sum. `b` may also be a single row, broadcast over a's rows.
Var add(Var a, Var b);
/// Elementwise difference, with the same broadcasting rule as add().
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
Var matmul(Var a, Var b);
Var tanh(Var a);
/// max(x, 0); the derivative at exactly 0 is 0.
Var relu(Var a);
/// Column of per-row Euclidean norms. Zero rows get a zero gradient.
Var norm_rows(Var a);
Var sum(Var a);
Var mean(Var a);
/// Largest entry as 1×1. The gradient goes to the lowest-index maximizer.
Var max_reduce(Var a);
/// axis 0 stacks rows, axis 1 stacks columns.
Var concat(std::span<const Var> parts, int axis);
Var slice(Var a, std::size_t row, std::size_t rows, std::size_t col, std::size_t cols);
Var gather_rows(Var a, std::vector<std::size_t> rows);
/// Columnwise max over consecutive groups of `group` rows; the output has
/// a.rows()/group rows. Ties route to the first row of the group.
Var segment_max(Var a, std::size_t group);
Var reshape(Var a, std::size_t rows, std::size_t cols);

/// Frobenius norm as 1×1, via norm_rows of the flattened tensor.
Var frobenius(Var a);

namespace detail {
void backprop(const Tape& tape, const Node& node, const Tensor& grad, std::vector<Tensor>& grads);
}

}  // namespace sattack::ad
