#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sattack/parallel.hpp"
#include "sattack/predictors/pool_lite.hpp"

namespace sattack {

struct TrainingConfig {
  int epochs = 40;
  double learning_rate = 3e-3;
  std::size_t batch_size = 16;
  std::size_t hidden = 32;
  double clip_norm = 5.0;  ///< Global gradient-norm clip; 0 disables.
  bool cosine_schedule = true;  ///< Anneal the learning rate to 0 over the epochs.
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainingResult {
  PoolLiteParams params;
  std::vector<double> loss_curve;  ///< Mean training loss per epoch.
};

/// Mean over agents and predicted timesteps of the squared displacement
/// between prediction and ground truth.
struct BatchGradient {
  double loss = 0.0;  ///< Mean of per-scene losses.
  std::array<ad::Tensor, PoolLiteParams::slot_count> grads;
};

/// Loss and parameter gradient averaged over `batch`. Per-scene tapes are
/// independent; the reduction runs in batch order for either execution mode.
BatchGradient pool_lite_batch_gradient(const PoolLiteParams& params, std::span<const Scene> batch,
                                       Execution exec = Execution::parallel);

/// Adam over pool-lite parameters; keeps moment estimates between steps.
class PoolLiteTrainer {
 public:
  PoolLiteTrainer(PoolLiteParams init, TrainingConfig config);

  /// One update on `batch`; returns the batch loss before the update.
  double step(std::span<const Scene> batch, Execution exec = Execution::parallel);
  const PoolLiteParams& params() const { return params_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }

 private:
  PoolLiteParams params_;
  TrainingConfig config_;
  std::array<ad::Tensor, PoolLiteParams::slot_count> m_;
  std::array<ad::Tensor, PoolLiteParams::slot_count> v_;
  long steps_ = 0;
};

/// Mini-batch training with a seeded shuffle per epoch. Starts from `init`
/// when given, else from PoolLiteParams::initialize(hidden, seed).
TrainingResult train_pool_lite(std::span<const Scene> dataset, const TrainingConfig& config,
                               std::optional<PoolLiteParams> init = std::nullopt,
                               Execution exec = Execution::parallel);

}  // namespace sattack
