#include "sattack/predictors/constant_velocity.hpp"

#include "sattack/core/error.hpp"

namespace sattack {

std::vector<ad::Var> ConstantVelocityPredictor::record(ad::Tape&, std::span<const ad::Var> positions) const {
  if (positions.size() < 2) throw Error(ErrorCode::insufficient_history, "constant velocity needs T_obs >= 2");
  const ad::Var last = positions[positions.size() - 1];
  const ad::Var prev = positions[positions.size() - 2];
  std::vector<ad::Var> out;
  out.reserve(t_pred_);
  for (std::size_t t = 1; t <= t_pred_; ++t) {
    const double k = static_cast<double>(t);
    out.push_back(ad::sub(ad::scale(last, 1.0 + k), ad::scale(prev, k)));
  }
  return out;
}

}  // namespace sattack
