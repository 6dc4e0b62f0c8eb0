#pragma once

#include <span>
#include <vector>

#include "sattack/attack/simplex.hpp"
#include "sattack/core/types.hpp"
#include "sattack/parallel.hpp"
#include "sattack/predictors/predictor.hpp"

namespace sattack {

/// Per-iteration record of an attack, for inspection and invariant tests.
/// Entry k holds the state after the k-th gradient step.
struct AttackTrace {
  std::vector<Perturbation> perturbations;
  std::vector<AttentionWeights> weights;
  std::vector<double> losses;
};

/// Socially-attended attack on scene.candidate_index.
///
/// Starting from R = 0 (and uniform W in soft mode) each iteration predicts
/// the perturbed scene with the full model, stops if the candidate collides
/// with a neighbor, and otherwise takes one projected gradient step: R moves
/// against its gradient rescaled so the largest row moves step_size_r, then
/// every row is clipped to the ε circle; W moves by step_size_w times its
/// gradient and is projected back onto the simplex. With freeze_neighbors
/// the loss sees the neighbors' unattacked predictions; the collision check
/// never does.
///
/// Random mode draws each row uniformly on the ε circle and evaluates once.
AttackReport run_attack(const Scene& scene, const Predictor& predictor, const AttackConfig& config,
                        AttackTrace* trace = nullptr);

struct AttackGradient {
  double loss = 0.0;
  ad::Tensor grad_r;  ///< T_obs×2
  ad::Tensor grad_w;  ///< Soft mode only.
};

/// Loss of config.mode at (R, W) and its gradients, as used by one attack
/// step. W is ignored outside soft mode.
AttackGradient attack_loss_gradient(const Scene& scene, const DifferentiablePredictor& predictor,
                                    const AttackConfig& config, const Perturbation& r, const AttentionWeights& w);

struct AttackInstance {
  std::size_t scene_index = 0;
  std::size_t candidate = 0;
};

/// Every agent of every multi-agent scene in turn as the candidate.
std::vector<AttackInstance> expand_instances(std::span<const Scene> dataset);

struct AttackSummary {
  std::size_t instances = 0;
  std::size_t collided = 0;
  double cr_original = 0.0;        ///< % colliding before the attack.
  double cr = 0.0;                 ///< % colliding after the attack.
  double mean_pavg_collided = 0.0; ///< Over successful instances only.
  double mean_pavg_all = 0.0;
};

AttackSummary summarize(std::span<const AttackReport> reports);

struct DatasetAttack {
  std::vector<AttackReport> reports;  ///< In instance order.
  AttackSummary summary;
};

/// Attacks every instance of the dataset. Random mode derives an
/// independent seed per instance from config.seed.
DatasetAttack attack_dataset(std::span<const Scene> dataset, const Predictor& predictor,
                             const AttackConfig& config, Execution exec = Execution::parallel);

/// Seed used for instance `index` of a dataset run.
std::uint64_t instance_seed(std::uint64_t base, std::size_t index);

}  // namespace sattack
