#include "sattack/experiments/frozen.hpp"

#include "sattack/core/error.hpp"
#include "sattack/core/geometry.hpp"

namespace sattack {

FrozenStudy frozen_neighbor_study(const Predictor& predictor, std::span<const Scene> dataset,
                                  const AttackConfig& config, Execution exec) {
  if (dataset.empty()) throw Error(ErrorCode::empty_dataset, "frozen-neighbor study on an empty dataset");
  AttackConfig live_cfg = config;
  live_cfg.freeze_neighbors = false;
  AttackConfig frozen_cfg = config;
  frozen_cfg.freeze_neighbors = true;

  FrozenStudy out;
  auto live = attack_dataset(dataset, predictor, live_cfg, exec);
  auto frozen = attack_dataset(dataset, predictor, frozen_cfg, exec);
  out.cr_live = live.summary.cr;
  out.cr_frozen = frozen.summary.cr;
  out.live = std::move(live.reports);
  out.frozen = std::move(frozen.reports);
  return out;
}

std::size_t neighbor_collision_scan(std::span<const AttackReport> reports, double gamma) {
  std::size_t count = 0;
  for (const AttackReport& r : reports) {
    const auto before = min_neighbor_pair_distance(r.predictions_before, r.candidate_index);
    const auto after = min_neighbor_pair_distance(r.predictions_after, r.candidate_index);
    if (!before || !after) continue;
    if (*after < gamma && !(*before < gamma)) ++count;
  }
  return count;
}

}  // namespace sattack
