#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "sattack/core/types.hpp"

namespace sattack {

enum class SyntheticTemplate { head_on, crossing_90deg, parallel, overtake, mixed };

std::string_view to_string(SyntheticTemplate t);
SyntheticTemplate parse_synthetic_template(std::string_view text);

struct SyntheticOptions {
  std::size_t t_obs = 9;
  std::size_t t_pred = 12;
  double frame_period = 0.4;  ///< s
  double speed = 1.0;         ///< nominal walking speed, m/s
  /// head_on: lateral offset between the two lanes; random in [1.2, 2.5] m when unset.
  std::optional<double> lateral_offset;
  /// parallel: gap between neighbouring lanes; random in [1.0, 1.6] m when unset.
  std::optional<double> lateral_gap;
  /// Random rotation and translation of every scene.
  bool random_pose = true;
  /// When > 0, trajectories are integrated with exponential pairwise
  /// repulsion of this strength (m/s²) instead of following straight lines,
  /// so agents visibly make room for each other. Each agent relaxes back to
  /// its straight-line velocity.
  double interaction = 0.0;
  double interaction_range = 0.3;   ///< B, m
  double interaction_radius = 0.6;  ///< m

};

/// `count` scenes of 2–4 agents walking straight lines at roughly the
/// nominal speed (unless options.interaction is set), with ground-truth
/// futures. Every point gets i.i.d.
/// N(0, noise_sigma²) noise per coordinate. `mixed` cycles through the four
/// geometries. Deterministic for a given seed.
std::vector<Scene> generate_synthetic(SyntheticTemplate kind, double noise_sigma, std::size_t count,
                                      std::uint64_t seed, const SyntheticOptions& options = {});

}  // namespace sattack
