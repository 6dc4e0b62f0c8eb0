#include "sattack/predictors/predictor.hpp"

#include "sattack/core/error.hpp"

namespace sattack {

PredictionSet DifferentiablePredictor::predict(const Scene& scene) const {
  ad::Tape tape;
  const auto obs = observation_nodes(tape, scene);
  const auto steps = record(tape, obs);
  return to_prediction_set(steps);
}

std::vector<ad::Var> observation_nodes(ad::Tape& tape, const Scene& scene) {
  const std::size_t n = scene.size();
  const std::size_t t_obs = scene.t_obs();
  std::vector<ad::Var> out;
  out.reserve(t_obs);
  for (std::size_t t = 0; t < t_obs; ++t) {
    ad::Tensor positions(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& obs = scene.agents[i].observation;
      if (obs.size() != t_obs) throw Error(ErrorCode::shape, "observation lengths differ");
      positions(i, 0) = obs[t].x;
      positions(i, 1) = obs[t].y;
    }
    out.push_back(tape.constant(std::move(positions)));
  }
  return out;
}

PredictionSet to_prediction_set(std::span<const ad::Var> steps) {
  PredictionSet out;
  if (steps.empty()) return out;
  const std::size_t n = steps.front().rows();
  out.trajectories.assign(n, Trajectory(steps.size()));
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const ad::Tensor& p = steps[t].value();
    for (std::size_t i = 0; i < n; ++i) out.trajectories[i][t] = Point{p(i, 0), p(i, 1)};
  }
  return out;
}

}  // namespace sattack
