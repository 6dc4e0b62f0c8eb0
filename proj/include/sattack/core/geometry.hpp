#pragma once

#include <optional>

#include "sattack/core/types.hpp"

namespace sattack {

/// Entry (j, t) is the distance between the candidate and neighbor
/// neighbor_order[j] at prediction timestep t. Neighbors keep scene order.
DistanceMatrix distance_matrix(const PredictionSet& predictions, std::size_t candidate_index);

/// The minimal cell when it lies strictly below gamma. Ties go to the lowest
/// row, then the lowest timestep.
std::optional<CollisionCell> check_collision(const DistanceMatrix& d, double gamma);

/// Rescales every row whose norm exceeds epsilon onto the epsilon circle.
Perturbation project_perturbation(const Perturbation& r, double epsilon);

/// Shifts the candidate observation by r. Everything else is copied as is.
Scene apply_perturbation(const Scene& scene, const Perturbation& r);

/// Smallest pairwise distance between two distinct non-candidate agents,
/// or nullopt when fewer than two neighbors exist.
std::optional<double> min_neighbor_pair_distance(const PredictionSet& predictions, std::size_t candidate_index);

}  // namespace sattack
