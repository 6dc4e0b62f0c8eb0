#include "sattack/autodiff/ops.hpp"

#include <cmath>
#include <string>

#include "sattack/core/error.hpp"

namespace sattack::ad {

namespace {

using detail::Node;

Tape& same_tape(Var a, Var b) {
  if (&a.tape() != &b.tape()) throw Error(ErrorCode::shape, "operands recorded on different tapes");
  return a.tape();
}

std::string dims(const Tensor& t) { return std::to_string(t.rows()) + "x" + std::to_string(t.cols()); }

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw Error(ErrorCode::shape, std::string(op) + ": incompatible shapes " + dims(a) + " and " + dims(b));
}

Node unary(Op op, Var a, Tensor value) {
  Node node;
  node.op = op;
  node.in = {a.id(), 0};
  node.requires_grad = a.tape().node(a.id()).requires_grad;
  node.value = std::move(value);
  return node;
}

Node binary(Op op, Var a, Var b, Tensor value) {
  Node node;
  node.op = op;
  node.in = {a.id(), b.id()};
  const Tape& tape = a.tape();
  node.requires_grad = tape.node(a.id()).requires_grad || tape.node(b.id()).requires_grad;
  node.value = std::move(value);
  return node;
}

// Returns the gradient slot of input `id`, allocating it on first use, or
// nullptr when the input does not need a gradient.
Tensor* slot(const Tape& tape, std::vector<Tensor>& grads, std::size_t id) {
  const Node& in = tape.node(id);
  if (!in.requires_grad) return nullptr;
  Tensor& g = grads[id];
  if (g.size() == 0 && in.value.size() != 0) g = Tensor(in.value.rows(), in.value.cols());
  return &g;
}

Var elementwise_sum(Var a, Var b, double sign) {
  Tape& tape = same_tape(a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  const bool broadcast = !x.same_shape(y);
  if (broadcast && !(y.rows() == 1 && y.cols() == x.cols())) shape_error(sign > 0 ? "add" : "sub", x, y);
  Tensor out = x;
  const std::size_t cols = x.cols();
  if (!broadcast) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += sign * y[i];
  } else {
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] += sign * y[c];
    }
  }
  Op op = sign > 0 ? (broadcast ? Op::add_row : Op::add) : (broadcast ? Op::sub_row : Op::sub);
  return tape.push(binary(op, a, b, std::move(out)));
}

}  // namespace

Var add(Var a, Var b) { return elementwise_sum(a, b, 1.0); }

Var sub(Var a, Var b) { return elementwise_sum(a, b, -1.0); }

Var mul(Var a, Var b) {
  Tape& tape = same_tape(a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (!x.same_shape(y)) shape_error("mul", x, y);
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= y[i];
  return tape.push(binary(Op::mul, a, b, std::move(out)));
}

Var scale(Var a, double s) {
  Tensor out = a.value();
  for (double& v : out.storage()) v *= s;
  Node node = unary(Op::scale, a, std::move(out));
  node.scalar = s;
  return a.tape().push(std::move(node));
}

Var matmul(Var a, Var b) {
  Tape& tape = same_tape(a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.cols() != y.rows()) shape_error("matmul", x, y);
  const std::size_t n = x.rows(), k = x.cols(), m = y.cols();
  Tensor out(n, m);
  const double* xd = x.data().data();
  const double* yd = y.data().data();
  double* od = out.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = od + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double xv = xd[i * k + p];
      if (xv == 0.0) continue;
      const double* yrow = yd + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += xv * yrow[j];
    }
  }
  return tape.push(binary(Op::matmul, a, b, std::move(out)));
}

Var tanh(Var a) {
  Tensor out = a.value();
  for (double& v : out.storage()) v = std::tanh(v);
  return a.tape().push(unary(Op::tanh, a, std::move(out)));
}

Var relu(Var a) {
  Tensor out = a.value();
  for (double& v : out.storage()) v = v > 0.0 ? v : 0.0;
  return a.tape().push(unary(Op::relu, a, std::move(out)));
}

Var norm_rows(Var a) {
  const Tensor& x = a.value();
  Tensor out(x.rows(), 1);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) s += x(r, c) * x(r, c);
    out[r] = std::sqrt(s);
  }
  return a.tape().push(unary(Op::norm_rows, a, std::move(out)));
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  return a.tape().push(unary(Op::sum, a, Tensor::scalar(s)));
}

Var mean(Var a) {
  const Tensor& x = a.value();
  if (x.size() == 0) throw Error(ErrorCode::shape, "mean of an empty tensor");
  double s = 0.0;
  for (double v : x.data()) s += v;
  return a.tape().push(unary(Op::mean, a, Tensor::scalar(s / static_cast<double>(x.size()))));
}

Var max_reduce(Var a) {
  const Tensor& x = a.value();
  if (x.size() == 0) throw Error(ErrorCode::shape, "max of an empty tensor");
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] > x[best]) best = i;
  }
  Node node = unary(Op::max_reduce, a, Tensor::scalar(x[best]));
  node.aux[0] = best;
  return a.tape().push(std::move(node));
}

Var concat(std::span<const Var> parts, int axis) {
  if (parts.empty()) throw Error(ErrorCode::shape, "concat of nothing");
  Tape& tape = parts.front().tape();
  Node node;
  node.op = axis == 0 ? Op::concat_rows : Op::concat_cols;
  std::size_t rows = 0, cols = 0;
  const Tensor& first = parts.front().value();
  for (const Var& p : parts) {
    same_tape(parts.front(), p);
    const Tensor& t = p.value();
    if (axis == 0) {
      if (t.cols() != first.cols()) shape_error("concat", first, t);
      rows += t.rows();
      cols = t.cols();
    } else {
      if (t.rows() != first.rows()) shape_error("concat", first, t);
      cols += t.cols();
      rows = t.rows();
    }
    node.many.push_back(p.id());
    node.requires_grad = node.requires_grad || tape.node(p.id()).requires_grad;
  }
  Tensor out(rows, cols);
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Tensor& t = p.value();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      for (std::size_t c = 0; c < t.cols(); ++c) {
        if (axis == 0) {
          out(offset + r, c) = t(r, c);
        } else {
          out(r, offset + c) = t(r, c);
        }
      }
    }
    offset += axis == 0 ? t.rows() : t.cols();
  }
  node.value = std::move(out);
  return tape.push(std::move(node));
}

Var slice(Var a, std::size_t row, std::size_t rows, std::size_t col, std::size_t cols) {
  const Tensor& x = a.value();
  if (row + rows > x.rows() || col + cols > x.cols()) {
    throw Error(ErrorCode::shape, "slice out of bounds of " + dims(x));
  }
  Tensor out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = x(row + r, col + c);
  }
  Node node = unary(Op::slice, a, std::move(out));
  node.aux = {row, rows, col, cols};
  return a.tape().push(std::move(node));
}

Var gather_rows(Var a, std::vector<std::size_t> rows) {
  const Tensor& x = a.value();
  Tensor out(rows.size(), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= x.rows()) throw Error(ErrorCode::shape, "gather_rows index out of range");
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = x(rows[r], c);
  }
  Node node = unary(Op::gather_rows, a, std::move(out));
  node.index = std::move(rows);
  return a.tape().push(std::move(node));
}

Var segment_max(Var a, std::size_t group) {
  const Tensor& x = a.value();
  if (group == 0 || x.rows() % group != 0) {
    throw Error(ErrorCode::shape, "segment_max: " + std::to_string(x.rows()) + " rows not divisible by " +
                                      std::to_string(group));
  }
  const std::size_t segments = x.rows() / group;
  const std::size_t cols = x.cols();
  Tensor out(segments, cols);
  std::vector<std::size_t> argmax(segments * cols);
  for (std::size_t s = 0; s < segments; ++s) {
    for (std::size_t c = 0; c < cols; ++c) {
      std::size_t best = s * group;
      for (std::size_t r = best + 1; r < (s + 1) * group; ++r) {
        if (x(r, c) > x(best, c)) best = r;
      }
      out(s, c) = x(best, c);
      argmax[s * cols + c] = best;
    }
  }
  Node node = unary(Op::segment_max, a, std::move(out));
  node.index = std::move(argmax);
  return a.tape().push(std::move(node));
}

Var reshape(Var a, std::size_t rows, std::size_t cols) {
  const Tensor& x = a.value();
  if (rows * cols != x.size()) throw Error(ErrorCode::shape, "reshape changes the element count");
  Tensor out(rows, cols, x.storage());
  return a.tape().push(unary(Op::reshape, a, std::move(out)));
}

Var frobenius(Var a) { return norm_rows(reshape(a, 1, a.value().size())); }

namespace detail {

void backprop(const Tape& tape, const Node& node, const Tensor& g, std::vector<Tensor>& grads) {
  switch (node.op) {
    case Op::leaf:
      return;
    case Op::add:
    case Op::sub: {
      const double sign = node.op == Op::add ? 1.0 : -1.0;
      if (Tensor* ga = slot(tape, grads, node.in[0])) {
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
      }
      if (Tensor* gb = slot(tape, grads, node.in[1])) {
        for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] += sign * g[i];
      }
      return;
    }
    case Op::add_row:
    case Op::sub_row: {
      const double sign = node.op == Op::add_row ? 1.0 : -1.0;
      if (Tensor* ga = slot(tape, grads, node.in[0])) {
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
      }
      if (Tensor* gb = slot(tape, grads, node.in[1])) {
        const std::size_t cols = g.cols();
        for (std::size_t r = 0; r < g.rows(); ++r) {
          for (std::size_t c = 0; c < cols; ++c) (*gb)[c] += sign * g(r, c);
        }
      }
      return;
    }
    case Op::mul: {
      const Tensor& x = tape.node(node.in[0]).value;
      const Tensor& y = tape.node(node.in[1]).value;
      if (Tensor* ga = slot(tape, grads, node.in[0])) {
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * y[i];
      }
      if (Tensor* gb = slot(tape, grads, node.in[1])) {
        for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] += g[i] * x[i];
      }
      return;
    }
    case Op::scale: {
      if (Tensor* ga = slot(tape, grads, node.in[0])) {
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += node.scalar * g[i];
      }
      return;
    }
    case Op::matmul: {
      const Tensor& x = tape.node(node.in[0]).value;
      const Tensor& y = tape.node(node.in[1]).value;
      const std::size_t n = x.rows(), k = x.cols(), m = y.cols();
      if (Tensor* ga = slot(tape, grads, node.in[0])) {
        // dX = G · Yᵀ
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += g[i * m + j] * y[p * m + j];
            (*ga)[i * k + p] += s;
          }
        }
      }
      if (Tensor* gb = slot(tape, grads, node.in[1])) {
        // dY = Xᵀ · G
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            const double xv = x[i * k + p];
            if (xv == 0.0) continue;
            double* grow = gb->data().data() + p * m;
            for (std::size_t j = 0; j < m; ++j) grow[j] += xv * g[i * m + j];
          }
        }
      }
      return;
    }
    case Op::tanh: {
      if (Tensor* ga = slot(tape, grads, node.in[0])) {
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double y = node.value[i];
          (*ga)[i] += g[i] * (1.0 - y * y);
        }
      }
      return;
    }
    case Op::relu: {
      if (Tensor* ga = slot(tape, grads, node.in[0])) {
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (node.value[i] > 0.0) (*ga)[i] += g[i];
        }
      }
      return;
    }
    case Op::norm_rows: {
      if (Tensor* ga = slot(tape, grads, node.in[0])) {
        const Tensor& x = tape.node(node.in[0]).value;
        for (std::size_t r = 0; r < x.rows(); ++r) {
          const double n = node.value[r];
          if (n == 0.0) continue;
          for (std::size_t c = 0; c < x.cols(); ++c) (*ga)(r, c) += g[r] * x(r, c) / n;
        }
      }
      return;
    }
    case Op::sum:
    case Op::mean: {
      if (Tensor* ga = slot(tape, grads, node.in[0])) {
        const double s = node.op == Op::sum ? g[0] : g[0] / static_cast<double>(ga->size());
        for (double& v : ga->storage()) v += s;
      }
      return;
    }
    case Op::max_reduce: {
      if (Tensor* ga = slot(tape, grads, node.in[0])) (*ga)[node.aux[0]] += g[0];
      return;
    }
    case Op::concat_rows:
    case Op::concat_cols: {
      std::size_t offset = 0;
      for (std::size_t id : node.many) {
        const Tensor& part = tape.node(id).value;
        if (Tensor* gp = slot(tape, grads, id)) {
          for (std::size_t r = 0; r < part.rows(); ++r) {
            for (std::size_t c = 0; c < part.cols(); ++c) {
              (*gp)(r, c) += node.op == Op::concat_rows ? g(offset + r, c) : g(r, offset + c);
            }
          }
        }
        offset += node.op == Op::concat_rows ? part.rows() : part.cols();
      }
      return;
    }
    case Op::slice: {
      if (Tensor* ga = slot(tape, grads, node.in[0])) {
        const auto [row, rows, col, cols] = node.aux;
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < cols; ++c) (*ga)(row + r, col + c) += g(r, c);
        }
      }
      return;
    }
    case Op::gather_rows: {
      if (Tensor* ga = slot(tape, grads, node.in[0])) {
        for (std::size_t r = 0; r < node.index.size(); ++r) {
          for (std::size_t c = 0; c < g.cols(); ++c) (*ga)(node.index[r], c) += g(r, c);
        }
      }
      return;
    }
    case Op::segment_max: {
      if (Tensor* ga = slot(tape, grads, node.in[0])) {
        const std::size_t cols = g.cols();
        for (std::size_t s = 0; s < g.rows(); ++s) {
          for (std::size_t c = 0; c < cols; ++c) (*ga)(node.index[s * cols + c], c) += g(s, c);
        }
      }
      return;
    }
    case Op::reshape: {
      if (Tensor* ga = slot(tape, grads, node.in[0])) {
        for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
      }
      return;
    }
  }
}

}  // namespace detail

}  // namespace sattack::ad
