#pragma once

#include "sattack/attack/simplex.hpp"
#include "sattack/autodiff/ops.hpp"

namespace sattack {

/// ‖D‖_F: pulls the candidate toward every neighbor at every timestep.
ad::Var loss_no_attention(ad::Var d);

struct HardAttentionLoss {
  ad::Var loss;
  AttentionWeights weights;
};

/// d_{k,m} + λ_r‖R‖_F where (k, m) is the current argmin of D (ties: lowest
/// row, then lowest column). W is a constant of the step.
HardAttentionLoss loss_hard_attention(ad::Var d, ad::Var r, double lambda_r);

/// Tr(Wᵀ tanh(D)) + λ_r‖R‖_F − λ_w‖W‖_F. Throws Error(invalid_weights) when
/// W is off the simplex.
ad::Var loss_soft_attention(ad::Var d, ad::Var w, ad::Var r, double lambda_r, double lambda_w);

}  // namespace sattack
