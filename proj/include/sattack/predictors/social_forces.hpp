#pragma once

#include <optional>
#include <string>

#include "sattack/predictors/predictor.hpp"

namespace sattack {

/// Helbing-style force model parameters. Each agent's desired speed v0 is
/// its last observed speed; `desired_speed` overrides it when set.
struct SocialForcesParams {
  std::optional<double> desired_speed;  ///< v0 (m/s)
  double relaxation_time = 0.5;         ///< τ (s)
  double repulsion_strength = 4.0;      ///< A (m/s²)
  double repulsion_range = 0.3;         ///< B (m)
  double interaction_radius = 0.6;      ///< r, sum of the two body radii (m)
  double dt = 0.4;                      ///< integration step, one frame (s)
  double frame_period = 0.4;            ///< seconds between observed frames

  /// Throws Error(invalid_config) unless every quantity is positive (A may be
  /// 0, which disables repulsion).
  void validate() const;
  /// Reads the parameter file written by save(); missing keys keep defaults.
  static SocialForcesParams load(const std::string& path);
  void save(const std::string& path) const;
};

/// Rule-based predictor with explicit collision avoidance. Each agent is
/// attracted to a goal fixed at prediction start (last position plus last
/// observed displacement × T_pred) and repelled exponentially by every
/// other agent; positions are integrated with symplectic Euler. Not
/// differentiable.
class SocialForcesPredictor final : public Predictor {
 public:
  explicit SocialForcesPredictor(SocialForcesParams params = {}, std::size_t t_pred = 12);

  std::string name() const override { return "social-forces"; }
  std::size_t t_pred() const override { return t_pred_; }
  PredictionSet predict(const Scene& scene) const override;

  const SocialForcesParams& params() const { return params_; }

 private:
  SocialForcesParams params_;
  std::size_t t_pred_;
};

}  // namespace sattack
