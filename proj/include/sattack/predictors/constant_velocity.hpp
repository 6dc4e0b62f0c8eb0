#pragma once

#include "sattack/predictors/predictor.hpp"

namespace sattack {

/// Extrapolates each agent's last observed displacement:
/// Ŷ_t = X_last + t · (X_last − X_prev), t = 1..T_pred.
class ConstantVelocityPredictor final : public DifferentiablePredictor {
 public:
  explicit ConstantVelocityPredictor(std::size_t t_pred = 12) : t_pred_(t_pred) {}

  std::string name() const override { return "cv"; }
  std::size_t t_pred() const override { return t_pred_; }
  std::vector<ad::Var> record(ad::Tape& tape, std::span<const ad::Var> positions) const override;

 private:
  std::size_t t_pred_;
};

}  // namespace sattack
