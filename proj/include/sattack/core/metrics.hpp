#pragma once

#include <span>

#include "sattack/core/types.hpp"

namespace sattack {

/// True when the candidate comes closer than gamma to any neighbor at any
/// prediction timestep. Single-agent prediction sets never collide.
bool candidate_collides(const PredictionSet& predictions, std::size_t candidate_index, double gamma);

/// Percentage of true flags. Throws Error(empty_dataset) on an empty span.
double collision_rate(std::span<const bool> collided);

/// Collision rate over attack outcomes (the `collided` flag of each report).
double metric_cr(std::span<const AttackReport> reports);

/// Mean over timesteps of the per-row Euclidean norm.
double metric_pavg(const Perturbation& r);

enum class AdeScope { all_agents, candidate_only };

struct DisplacementError {
  double ade = 0.0;
  double fde = 0.0;
};

/// Average and final displacement error against the scene's ground truth.
DisplacementError metric_ade_fde(const PredictionSet& predictions, const Scene& scene,
                                 AdeScope scope = AdeScope::all_agents);

}  // namespace sattack
