#include "sattack/predictors/social_forces.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "sattack/core/error.hpp"

namespace sattack {

void SocialForcesParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (desired_speed && !(std::isfinite(*desired_speed) && *desired_speed >= 0.0)) {
    throw Error(ErrorCode::invalid_config, "social forces: desired speed must be >= 0");
  }
  if (!positive(relaxation_time) || !positive(repulsion_range) || !positive(interaction_radius) ||
      !positive(dt) || !positive(frame_period) || !(repulsion_strength >= 0.0)) {
    throw Error(ErrorCode::invalid_config, "social forces: parameters must be positive");
  }
}

SocialForcesParams SocialForcesParams::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read social forces parameters '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, path + ": " + e.what());
  }
  SocialForcesParams p;
  p.relaxation_time = j.value("relaxation_time", p.relaxation_time);
  p.repulsion_strength = j.value("repulsion_strength", p.repulsion_strength);
  p.repulsion_range = j.value("repulsion_range", p.repulsion_range);
  p.interaction_radius = j.value("interaction_radius", p.interaction_radius);
  p.dt = j.value("dt", p.dt);
  p.frame_period = j.value("frame_period", p.frame_period);
  if (j.contains("desired_speed") && !j["desired_speed"].is_null()) p.desired_speed = j["desired_speed"].get<double>();
  p.validate();
  return p;
}

void SocialForcesParams::save(const std::string& path) const {
  nlohmann::ordered_json j;
  j["relaxation_time"] = relaxation_time;
  j["repulsion_strength"] = repulsion_strength;
  j["repulsion_range"] = repulsion_range;
  j["interaction_radius"] = interaction_radius;
  j["dt"] = dt;
  j["frame_period"] = frame_period;
  j["desired_speed"] = desired_speed ? nlohmann::ordered_json(*desired_speed) : nlohmann::ordered_json();
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

SocialForcesPredictor::SocialForcesPredictor(SocialForcesParams params, std::size_t t_pred)
    : params_(std::move(params)), t_pred_(t_pred) {
  params_.validate();
}

PredictionSet SocialForcesPredictor::predict(const Scene& scene) const {
  const std::size_t n = scene.size();
  const std::size_t t_obs = scene.t_obs();
  if (t_obs < 2) throw Error(ErrorCode::insufficient_history, "social forces needs T_obs >= 2");

  std::vector<Point> pos(n), vel(n), goal(n);
  std::vector<double> v0(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& obs = scene.agents[i].observation;
    const Point step = obs[t_obs - 1] - obs[t_obs - 2];
    pos[i] = obs[t_obs - 1];
    vel[i] = (1.0 / params_.frame_period) * step;
    goal[i] = pos[i] + static_cast<double>(t_pred_) * step;
    v0[i] = params_.desired_speed ? *params_.desired_speed : norm(vel[i]);
  }

  const double tau = params_.relaxation_time;
  const double a = params_.repulsion_strength;
  const double b = params_.repulsion_range;
  const double r = params_.interaction_radius;
  const double dt = params_.dt;

  PredictionSet out;
  out.trajectories.assign(n, Trajectory(t_pred_));
  std::vector<Point> force(n);
  for (std::size_t step = 0; step < t_pred_; ++step) {
    for (std::size_t i = 0; i < n; ++i) {
      const Point to_goal = goal[i] - pos[i];
      const double dist_goal = norm(to_goal);
      Point desired{0.0, 0.0};
      if (dist_goal > 1e-12) desired = (v0[i] / dist_goal) * to_goal;
      Point f = (1.0 / tau) * (desired - vel[i]);
      if (a > 0.0) {
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          const Point away = pos[i] - pos[j];
          const double d = norm(away);
          if (d < 1e-12) continue;
          f = f + (a * std::exp((r - d) / b) / d) * away;
        }
      }
      force[i] = f;
    }
    for (std::size_t i = 0; i < n; ++i) {
      vel[i] = vel[i] + dt * force[i];
      pos[i] = pos[i] + dt * vel[i];
      out.trajectories[i][step] = pos[i];
    }
  }
  return out;
}

}  // namespace sattack
