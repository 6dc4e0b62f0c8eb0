#include "sattack/attack/losses.hpp"

#include "sattack/core/error.hpp"

namespace sattack {

ad::Var loss_no_attention(ad::Var d) { return ad::frobenius(d); }

HardAttentionLoss loss_hard_attention(ad::Var d, ad::Var r, double lambda_r) {
  const ad::Tensor& values = d.value();
  if (values.size() == 0) throw Error(ErrorCode::shape, "hard attention on an empty distance matrix");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  const std::size_t row = best / values.cols();
  const std::size_t col = best % values.cols();
  ad::Var target = ad::slice(d, row, 1, col, 1);
  ad::Var loss = ad::add(target, ad::scale(ad::frobenius(r), lambda_r));
  return {loss, AttentionWeights::one_hot(values.rows(), values.cols(), row, col)};
}

ad::Var loss_soft_attention(ad::Var d, ad::Var w, ad::Var r, double lambda_r, double lambda_w) {
  const ad::Tensor& weights = w.value();
  if (!weights.same_shape(d.value())) throw Error(ErrorCode::shape, "attention weights must match D");
  const AttentionWeights check(weights.rows(), weights.cols(), weights.storage());
  if (!check.on_simplex(1e-9)) throw Error(ErrorCode::invalid_weights, "attention weights are off the simplex");

  ad::Var attended = ad::sum(ad::mul(w, ad::tanh(d)));
  ad::Var loss = ad::add(attended, ad::scale(ad::frobenius(r), lambda_r));
  return ad::sub(loss, ad::scale(ad::frobenius(w), lambda_w));
}

}  // namespace sattack
