#pragma once

#include <span>
#include <string>
#include <vector>

#include "sattack/autodiff/ops.hpp"
#include "sattack/core/types.hpp"

namespace sattack {

/// A trajectory predictor f mapping a scene's observations to T_pred future
/// positions for every agent.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual std::string name() const = 0;
  virtual bool differentiable() const { return false; }
  virtual std::size_t t_pred() const = 0;
  virtual PredictionSet predict(const Scene& scene) const = 0;
};

/// Predictor whose forward pass can be recorded on an autodiff tape.
class DifferentiablePredictor : public Predictor {
 public:
  bool differentiable() const override { return true; }

  /// `positions` holds one n×2 node per observed timestep (all agents, scene
  /// order); returns one n×2 node per predicted timestep.
  virtual std::vector<ad::Var> record(ad::Tape& tape, std::span<const ad::Var> positions) const = 0;

  /// Evaluates record() on a throwaway tape.
  PredictionSet predict(const Scene& scene) const override;
};

/// One n×2 constant per observed timestep.
std::vector<ad::Var> observation_nodes(ad::Tape& tape, const Scene& scene);

/// Converts per-timestep n×2 nodes back into per-agent trajectories.
PredictionSet to_prediction_set(std::span<const ad::Var> steps);

}  // namespace sattack
