#include "sattack/autodiff/tape.hpp"

#include "sattack/autodiff/ops.hpp"
#include "sattack/core/error.hpp"

namespace sattack::ad {

Tensor Gradients::of(Var v) const {
  if (v.id() < grads_.size() && grads_[v.id()].size() != 0) return grads_[v.id()];
  const auto shape = v.id() < shapes_.size() ? shapes_[v.id()] : v.value().shape();
  return Tensor(shape[0], shape[1]);
}

Var Tape::leaf(Tensor value, bool requires_grad) {
  detail::Node node;
  node.op = Op::leaf;
  node.requires_grad = requires_grad;
  node.value = std::move(value);
  return push(std::move(node));
}

Var Tape::push(detail::Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Gradients Tape::backward(Var loss) const {
  if (&loss.tape() != this) throw Error(ErrorCode::shape, "loss belongs to another tape");
  const auto& out = nodes_[loss.id()].value;
  if (out.size() != 1) throw Error(ErrorCode::non_scalar_loss, "backward needs a 1x1 loss");

  Gradients result;
  result.grads_.resize(loss.id() + 1);
  result.shapes_.reserve(nodes_.size());
  for (const auto& node : nodes_) result.shapes_.push_back(node.value.shape());

  if (!nodes_[loss.id()].requires_grad) return result;
  result.grads_[loss.id()] = Tensor(1, 1, 1.0);
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    const auto& node = nodes_[i];
    if (!node.requires_grad || node.op == Op::leaf) continue;
    if (result.grads_[i].size() == 0) continue;
    detail::backprop(*this, node, result.grads_[i], result.grads_);
  }
  return result;
}

}  // namespace sattack::ad
