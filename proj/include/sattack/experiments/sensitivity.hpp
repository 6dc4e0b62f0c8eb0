#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sattack/attack/archive.hpp"
#include "sattack/parallel.hpp"
#include "sattack/predictors/predictor.hpp"

namespace sattack {

struct SensitivityConfig {
  double magnitude = 0.2;  ///< m
  std::size_t trials = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Entry t is the mean displacement of all predicted positions when the
/// candidate's observation at timestep t alone is pushed `magnitude` meters
/// in a uniformly random direction. Averaged over trials and over each
/// scene's candidate_index.
std::vector<double> timestep_sensitivity(const Predictor& predictor, std::span<const Scene> dataset,
                                         const SensitivityConfig& config, Execution exec = Execution::parallel);

/// Mean |r_t| per observation timestep over an archive of attacks.
std::vector<double> perturbation_profile(std::span<const ArchiveRecord> archive);

}  // namespace sattack
