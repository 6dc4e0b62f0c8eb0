#include "sattack/core/metrics.hpp"

#include <algorithm>

#include "sattack/core/error.hpp"
#include "sattack/core/geometry.hpp"

namespace sattack {

bool candidate_collides(const PredictionSet& predictions, std::size_t candidate_index, double gamma) {
  if (predictions.size() < 2) return false;
  return check_collision(distance_matrix(predictions, candidate_index), gamma).has_value();
}

double collision_rate(std::span<const bool> collided) {
  if (collided.empty()) throw Error(ErrorCode::empty_dataset, "collision rate of an empty collection");
  const auto hits = std::count(collided.begin(), collided.end(), true);
  return 100.0 * static_cast<double>(hits) / static_cast<double>(collided.size());
}

double metric_cr(std::span<const AttackReport> reports) {
  std::vector<char> flags;
  flags.reserve(reports.size());
  for (const auto& r : reports) flags.push_back(r.collided ? 1 : 0);
  if (flags.empty()) throw Error(ErrorCode::empty_dataset, "collision rate of an empty collection");
  const auto hits = std::count(flags.begin(), flags.end(), 1);
  return 100.0 * static_cast<double>(hits) / static_cast<double>(flags.size());
}

double metric_pavg(const Perturbation& r) {
  if (r.size() == 0) throw Error(ErrorCode::shape, "P-avg of an empty perturbation");
  double sum = 0.0;
  for (std::size_t t = 0; t < r.size(); ++t) sum += r.row_norm(t);
  return sum / static_cast<double>(r.size());
}

DisplacementError metric_ade_fde(const PredictionSet& predictions, const Scene& scene, AdeScope scope) {
  if (!scene.has_futures()) throw Error(ErrorCode::no_ground_truth, "scene '" + scene.id + "' lacks futures");
  if (predictions.size() != scene.size() || predictions.t_pred() != scene.t_pred()) {
    throw Error(ErrorCode::shape, "predictions do not match scene '" + scene.id + "'");
  }
  std::vector<std::size_t> agents;
  if (scope == AdeScope::candidate_only) {
    agents.push_back(scene.candidate_index);
  } else {
    for (std::size_t i = 0; i < scene.size(); ++i) agents.push_back(i);
  }

  double ade = 0.0;
  double fde = 0.0;
  const std::size_t t_pred = scene.t_pred();
  for (std::size_t i : agents) {
    const Trajectory& truth = *scene.agents[i].future;
    const Trajectory& pred = predictions.trajectories[i];
    double sum = 0.0;
    for (std::size_t t = 0; t < t_pred; ++t) sum += distance(pred[t], truth[t]);
    ade += sum / static_cast<double>(t_pred);
    fde += distance(pred[t_pred - 1], truth[t_pred - 1]);
  }
  const double count = static_cast<double>(agents.size());
  return {ade / count, fde / count};
}

}  // namespace sattack
