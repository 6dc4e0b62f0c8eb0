#pragma once

// Shared fixtures for the unit and acceptance tests: scene builders, random
// generators and a central-difference gradient oracle.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "sattack/autodiff/ops.hpp"
#include "sattack/core/types.hpp"

namespace sattack::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline ad::Tensor random_tensor(Rng& rng, std::size_t rows, std::size_t cols, double lo = -1.0, double hi = 1.0) {
  ad::Tensor t(rows, cols);
  for (double& v : t.storage()) v = uniform(rng, lo, hi);
  return t;
}

/// Agent i walks from `start[i]` with constant per-frame displacement `step[i]`.
inline Scene linear_scene(const std::vector<Point>& start, const std::vector<Point>& step, std::size_t t_obs = 9,
                          std::size_t t_pred = 12) {
  Scene s;
  s.id = "linear";
  for (std::size_t i = 0; i < start.size(); ++i) {
    Agent a;
    a.id = std::to_string(i);
    Trajectory future;
    for (std::size_t k = 0; k < t_obs + t_pred; ++k) {
      const Point p = start[i] + static_cast<double>(k) * step[i];
      (k < t_obs ? a.observation : future).push_back(p);
    }
    a.future = std::move(future);
    s.agents.push_back(std::move(a));
  }
  return s;
}

/// n agents at random positions in a 6 m box walking ~1 m/s with jitter.
inline Scene random_scene(Rng& rng, std::size_t n, std::size_t t_obs = 9, std::size_t t_pred = 12) {
  Scene s;
  s.id = "random-" + std::to_string(rng() % 100000);
  for (std::size_t i = 0; i < n; ++i) {
    Agent a;
    a.id = std::to_string(i);
    Point p{uniform(rng, -3, 3), uniform(rng, -3, 3)};
    const double heading = uniform(rng, 0, 6.283185307179586);
    const Point v{0.4 * std::cos(heading), 0.4 * std::sin(heading)};
    Trajectory future;
    for (std::size_t k = 0; k < t_obs + t_pred; ++k) {
      p = p + v + Point{uniform(rng, -0.03, 0.03), uniform(rng, -0.03, 0.03)};
      (k < t_obs ? a.observation : future).push_back(p);
    }
    a.future = std::move(future);
    s.agents.push_back(std::move(a));
  }
  return s;
}

inline Perturbation random_perturbation(Rng& rng, std::size_t rows, double scale) {
  Perturbation r = Perturbation::zeros(rows);
  for (auto& p : r.rows()) p = Point{uniform(rng, -scale, scale), uniform(rng, -scale, scale)};
  return r;
}

/// Central differences of a scalar function of one tensor.
inline ad::Tensor numeric_gradient(const std::function<double(const ad::Tensor&)>& f, ad::Tensor x,
                                   double h = 1e-5) {
  ad::Tensor g(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f(x);
    x[i] = saved - h;
    const double down = f(x);
    x[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// ‖a − b‖ / max(‖a‖, ‖b‖), with 0 when both vanish.
inline double relative_error(const ad::Tensor& a, const ad::Tensor& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double scale = std::sqrt(std::max(na, nb));
  return scale == 0.0 ? std::sqrt(diff) : std::sqrt(diff) / scale;
}

}  // namespace sattack::testing
