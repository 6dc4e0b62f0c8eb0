#include "sattack/data/synthetic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "sattack/core/error.hpp"

namespace sattack {

std::string_view to_string(SyntheticTemplate t) {
  switch (t) {
    case SyntheticTemplate::head_on: return "head_on";
    case SyntheticTemplate::crossing_90deg: return "crossing_90deg";
    case SyntheticTemplate::parallel: return "parallel";
    case SyntheticTemplate::overtake: return "overtake";
    case SyntheticTemplate::mixed: return "mixed";
  }
  return "unknown";
}

SyntheticTemplate parse_synthetic_template(std::string_view text) {
  for (auto t : {SyntheticTemplate::head_on, SyntheticTemplate::crossing_90deg, SyntheticTemplate::parallel,
                 SyntheticTemplate::overtake, SyntheticTemplate::mixed}) {
    if (text == to_string(t)) return t;
  }
  throw Error(ErrorCode::invalid_config, "unknown template '" + std::string(text) + "'");
}

namespace {

/// Straight line: position at time τ (s, 0 = last observation).
struct Walker {
  Point origin;
  Point velocity;
};

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
bool coin(Rng& rng) { return std::bernoulli_distribution(0.5)(rng); }

std::vector<Walker> parallel_walkers(Rng& rng, const SyntheticOptions& o) {
  const int agents = 2 + static_cast<int>(rng() % 3);
  const double gap = o.lateral_gap ? *o.lateral_gap : uniform(rng, 1.0, 1.6);
  const double v = o.speed * uniform(rng, 0.85, 1.15);
  std::vector<Walker> out;
  for (int i = 0; i < agents; ++i) out.push_back({{uniform(rng, -0.3, 0.3), i * gap}, {v, 0.0}});
  return out;
}

std::vector<Walker> head_on_walkers(Rng& rng, const SyntheticOptions& o) {
  const double offset = o.lateral_offset ? *o.lateral_offset : uniform(rng, 1.2, 2.5);
  const double va = o.speed * uniform(rng, 0.85, 1.15);
  const double vb = o.speed * uniform(rng, 0.85, 1.15);
  const double meet = uniform(rng, 0.8, 3.6);  // s after the last observation
  std::vector<Walker> out = {{{-va * meet, 0.0}, {va, 0.0}}, {{vb * meet, offset}, {-vb, 0.0}}};
  if (!o.lateral_offset && coin(rng)) {
    out.push_back({{-va * meet + uniform(rng, -0.3, 0.3), -uniform(rng, 0.9, 1.3)}, {va, 0.0}});
  }
  return out;
}

std::vector<Walker> crossing_walkers(Rng& rng, const SyntheticOptions& o) {
  const double va = o.speed * uniform(rng, 0.85, 1.15);
  const double vb = o.speed * uniform(rng, 0.85, 1.15);
  const double ta = uniform(rng, 0.4, 3.2);
  const double tb = ta + (coin(rng) ? 1.0 : -1.0) * uniform(rng, 1.5, 3.0);
  std::vector<Walker> out = {{{-va * ta, 0.0}, {va, 0.0}}, {{0.0, -vb * tb}, {0.0, vb}}};
  if (coin(rng)) {
    // Companion beside A, on the side B reaches last.
    const double side = tb > ta ? 1.0 : -1.0;
    out.push_back({{-va * ta + uniform(rng, -0.3, 0.3), side * uniform(rng, 0.9, 1.3)}, {va, 0.0}});
  }
  return out;
}

std::vector<Walker> overtake_walkers(Rng& rng, const SyntheticOptions& o) {
  const double slow = o.speed * uniform(rng, 0.6, 0.8);
  const double fast = o.speed * uniform(rng, 1.2, 1.4);
  const double pass = uniform(rng, 0.8, 3.6);
  const double lateral = uniform(rng, 0.7, 1.1);
  std::vector<Walker> out = {{{-slow * pass, 0.0}, {slow, 0.0}}, {{-fast * pass, lateral}, {fast, 0.0}}};
  if (coin(rng)) out.push_back({{-slow * pass + uniform(rng, -0.5, 0.5), -uniform(rng, 1.0, 1.4)}, {slow, 0.0}});
  return out;
}

/// Positions of every walker at each frame, local coordinates.
std::vector<Trajectory> straight_paths(const std::vector<Walker>& walkers, const SyntheticOptions& o) {
  const std::size_t length = o.t_obs + o.t_pred;
  std::vector<Trajectory> out(walkers.size(), Trajectory(length));
  for (std::size_t i = 0; i < walkers.size(); ++i) {
    for (std::size_t k = 0; k < length; ++k) {
      const double tau = (static_cast<double>(k) - static_cast<double>(o.t_obs - 1)) * o.frame_period;
      out[i][k] = walkers[i].origin + tau * walkers[i].velocity;
    }
  }
  return out;
}

/// Same start states, integrated with repulsion on a 10x finer clock.
std::vector<Trajectory> interacting_paths(const std::vector<Walker>& walkers, const SyntheticOptions& o) {
  constexpr int substeps = 10;
  constexpr double relaxation = 0.5;
  const std::size_t n = walkers.size();
  const std::size_t length = o.t_obs + o.t_pred;
  const double dt = o.frame_period / substeps;
  const double start = -static_cast<double>(o.t_obs - 1) * o.frame_period;

  std::vector<Point> pos(n), vel(n);
  for (std::size_t i = 0; i < n; ++i) {
    pos[i] = walkers[i].origin + start * walkers[i].velocity;
    vel[i] = walkers[i].velocity;
  }
  std::vector<Trajectory> out(n, Trajectory(length));
  std::vector<Point> force(n);
  for (std::size_t k = 0; k < length; ++k) {
    for (std::size_t i = 0; i < n; ++i) out[i][k] = pos[i];
    for (int sub = 0; sub < substeps; ++sub) {
      for (std::size_t i = 0; i < n; ++i) {
        Point f = (1.0 / relaxation) * (walkers[i].velocity - vel[i]);
        for (std::size_t j = 0; j < n; ++j) {
          const Point away = pos[i] - pos[j];
          const double d = norm(away);
          if (j == i || d < 1e-12) continue;
          f = f + (o.interaction * std::exp((o.interaction_radius - d) / o.interaction_range) / d) * away;
        }
        force[i] = f;
      }
      for (std::size_t i = 0; i < n; ++i) {
        vel[i] = vel[i] + dt * force[i];
        pos[i] = pos[i] + dt * vel[i];
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Scene> generate_synthetic(SyntheticTemplate kind, double noise_sigma, std::size_t count,
                                      std::uint64_t seed, const SyntheticOptions& options) {
  if (count == 0) throw Error(ErrorCode::invalid_config, "count must be >= 1");
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::invalid_config, "noise sigma must be >= 0");
  if (options.t_obs < 2 || options.t_pred < 1) throw Error(ErrorCode::invalid_config, "bad horizons");
  if (!(options.interaction >= 0.0) || !(options.interaction_range > 0.0)) {
    throw Error(ErrorCode::invalid_config, "interaction strength must be >= 0 and range > 0");
  }

  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t length = options.t_obs + options.t_pred;
  constexpr std::array cycle = {SyntheticTemplate::head_on, SyntheticTemplate::crossing_90deg,
                                SyntheticTemplate::parallel, SyntheticTemplate::overtake};

  std::vector<Scene> scenes;
  scenes.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const SyntheticTemplate t = kind == SyntheticTemplate::mixed ? cycle[s % cycle.size()] : kind;
    std::vector<Walker> walkers;
    switch (t) {
      case SyntheticTemplate::head_on: walkers = head_on_walkers(rng, options); break;
      case SyntheticTemplate::crossing_90deg: walkers = crossing_walkers(rng, options); break;
      case SyntheticTemplate::parallel: walkers = parallel_walkers(rng, options); break;
      case SyntheticTemplate::overtake: walkers = overtake_walkers(rng, options); break;
      case SyntheticTemplate::mixed: break;
    }

    double angle = 0.0;
    Point shift;
    if (options.random_pose) {
      angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      shift = {uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0)};
    }
    const auto paths = options.interaction > 0.0 ? interacting_paths(walkers, options) : straight_paths(walkers, options);
    const double c = std::cos(angle);
    const double sn = std::sin(angle);

    Scene scene;
    scene.id = std::string(to_string(t)) + "-" + std::to_string(s);
    for (std::size_t i = 0; i < walkers.size(); ++i) {
      Agent a;
      a.id = std::to_string(i);
      Trajectory future;
      for (std::size_t k = 0; k < length; ++k) {
        const Point local = paths[i][k];
        Point p{c * local.x - sn * local.y + shift.x, sn * local.x + c * local.y + shift.y};
        if (noise_sigma > 0.0) {
          p.x += noise_sigma * noise(rng);
          p.y += noise_sigma * noise(rng);
        }
        (k < options.t_obs ? a.observation : future).push_back(p);
      }
      a.future = std::move(future);
      scene.agents.push_back(std::move(a));
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

}  // namespace sattack
