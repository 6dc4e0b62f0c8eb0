#include "sattack/experiments/sensitivity.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "sattack/attack/engine.hpp"
#include "sattack/core/error.hpp"
#include "sattack/core/geometry.hpp"

namespace sattack {

void SensitivityConfig::validate() const {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) throw Error(ErrorCode::invalid_config, "noise magnitude must be >= 0");
  if (trials == 0) throw Error(ErrorCode::invalid_config, "trials must be positive");
}

namespace {

double mean_shift(const PredictionSet& a, const PredictionSet& b) {
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t t = 0; t < a.t_pred(); ++t) {
      total += distance(a.trajectories[i][t], b.trajectories[i][t]);
      ++count;
    }
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

}  // namespace

std::vector<double> timestep_sensitivity(const Predictor& predictor, std::span<const Scene> dataset,
                                         const SensitivityConfig& config, Execution exec) {
  config.validate();
  if (dataset.empty()) throw Error(ErrorCode::empty_dataset, "sensitivity on an empty dataset");
  const std::size_t t_obs = dataset.front().t_obs();
  for (const Scene& s : dataset) {
    if (s.t_obs() != t_obs) throw Error(ErrorCode::shape, "scenes have different observation lengths");
  }

  // per_scene[s * t_obs + t]
  std::vector<double> per_scene(dataset.size() * t_obs, 0.0);
  for_each_index(exec, dataset.size(), [&](std::size_t s) {
    const Scene& scene = dataset[s];
    const PredictionSet base = predictor.predict(scene);
    std::mt19937_64 rng(instance_seed(config.seed, s));
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (std::size_t t = 0; t < t_obs; ++t) {
      double sum = 0.0;
      for (std::size_t k = 0; k < config.trials; ++k) {
        const double a = angle(rng);
        Perturbation r = Perturbation::zeros(t_obs);
        r[t] = Point{config.magnitude * std::cos(a), config.magnitude * std::sin(a)};
        sum += mean_shift(base, predictor.predict(apply_perturbation(scene, r)));
      }
      per_scene[s * t_obs + t] = sum / static_cast<double>(config.trials);
    }
  });

  std::vector<double> curve(t_obs, 0.0);
  for (std::size_t s = 0; s < dataset.size(); ++s) {
    for (std::size_t t = 0; t < t_obs; ++t) curve[t] += per_scene[s * t_obs + t];
  }
  for (double& v : curve) v /= static_cast<double>(dataset.size());
  return curve;
}

std::vector<double> perturbation_profile(std::span<const ArchiveRecord> archive) {
  if (archive.empty()) return {};
  const std::size_t t_obs = archive.front().perturbation.size();
  std::vector<double> out(t_obs, 0.0);
  for (const ArchiveRecord& rec : archive) {
    if (rec.perturbation.size() != t_obs) throw Error(ErrorCode::shape, "archive perturbations differ in length");
    for (std::size_t t = 0; t < t_obs; ++t) out[t] += rec.perturbation.row_norm(t);
  }
  for (double& v : out) v /= static_cast<double>(archive.size());
  return out;
}

}  // namespace sattack
