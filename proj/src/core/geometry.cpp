#include "sattack/core/geometry.hpp"

#include <cmath>
#include <algorithm>
#include <limits>

#include "sattack/core/error.hpp"

namespace sattack {

DistanceMatrix distance_matrix(const PredictionSet& predictions, std::size_t candidate_index) {
  const std::size_t n = predictions.size();
  if (n == 0) throw Error(ErrorCode::shape, "empty prediction set");
  if (candidate_index >= n) throw Error(ErrorCode::shape, "candidate index out of range");
  if (n < 2) throw Error(ErrorCode::no_neighbors, "distance matrix needs at least one neighbor");
  const std::size_t t_pred = predictions.t_pred();
  for (const auto& trajectory : predictions.trajectories) {
    if (trajectory.size() != t_pred) throw Error(ErrorCode::shape, "prediction lengths differ");
  }

  const Trajectory& candidate = predictions.trajectories[candidate_index];
  std::vector<double> values;
  values.reserve((n - 1) * t_pred);
  std::vector<std::size_t> order;
  order.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == candidate_index) continue;
    order.push_back(j);
    const Trajectory& neighbor = predictions.trajectories[j];
    for (std::size_t t = 0; t < t_pred; ++t) values.push_back(distance(neighbor[t], candidate[t]));
  }
  return DistanceMatrix(n - 1, t_pred, std::move(values), std::move(order));
}

std::optional<CollisionCell> check_collision(const DistanceMatrix& d, double gamma) {
  if (d.rows() == 0 || d.cols() == 0) return std::nullopt;
  std::size_t best_row = 0;
  std::size_t best_col = 0;
  double best = d(0, 0);
  for (std::size_t j = 0; j < d.rows(); ++j) {
    for (std::size_t t = 0; t < d.cols(); ++t) {
      if (d(j, t) < best) {
        best = d(j, t);
        best_row = j;
        best_col = t;
      }
    }
  }
  if (!(best < gamma)) return std::nullopt;
  return CollisionCell{best_row, d.neighbor_order()[best_row], best_col};
}

Perturbation project_perturbation(const Perturbation& r, double epsilon) {
  Perturbation out = r;
  for (std::size_t t = 0; t < out.size(); ++t) {
    const double n = out.row_norm(t);
    if (n > epsilon) {
      const double s = epsilon / n;
      Point q{out[t].x * s, out[t].y * s};
      // Rounding can leave the norm an ulp above epsilon; shrink until it is
      // not, so that projecting again is a no-op.
      while (norm(q) > epsilon) q = Point{std::nextafter(q.x, 0.0), std::nextafter(q.y, 0.0)};
      out[t] = q;
    }
  }
  return out;
}

Scene apply_perturbation(const Scene& scene, const Perturbation& r) {
  if (scene.candidate_index >= scene.size()) throw Error(ErrorCode::shape, "candidate index out of range");
  if (r.size() != scene.t_obs()) {
    throw Error(ErrorCode::shape, "perturbation has " + std::to_string(r.size()) + " rows, scene observes " +
                                      std::to_string(scene.t_obs()) + " timesteps");
  }
  Scene out = scene;
  Trajectory& obs = out.agents[scene.candidate_index].observation;
  for (std::size_t t = 0; t < obs.size(); ++t) obs[t] = obs[t] + r[t];
  return out;
}

std::optional<double> min_neighbor_pair_distance(const PredictionSet& predictions, std::size_t candidate_index) {
  const std::size_t n = predictions.size();
  std::optional<double> best;
  for (std::size_t a = 0; a < n; ++a) {
    if (a == candidate_index) continue;
    for (std::size_t b = a + 1; b < n; ++b) {
      if (b == candidate_index) continue;
      const auto& ta = predictions.trajectories[a];
      const auto& tb = predictions.trajectories[b];
      for (std::size_t t = 0; t < std::min(ta.size(), tb.size()); ++t) {
        const double d = distance(ta[t], tb[t]);
        if (!best || d < *best) best = d;
      }
    }
  }
  return best;
}

}  // namespace sattack
