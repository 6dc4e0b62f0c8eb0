#include "sattack/experiments/transfer.hpp"

#include <map>

#include "sattack/core/error.hpp"
#include "sattack/core/geometry.hpp"
#include "sattack/core/metrics.hpp"

namespace sattack {

TransferResult transfer_eval(std::span<const ArchiveRecord> archive, const Predictor& target,
                             std::span<const Scene> dataset, double gamma, Execution exec) {
  if (archive.empty()) throw Error(ErrorCode::empty_dataset, "empty perturbation archive");
  std::map<std::string, const Scene*> by_id;
  for (const Scene& s : dataset) by_id.emplace(s.id, &s);

  std::vector<const Scene*> scenes(archive.size());
  for (std::size_t i = 0; i < archive.size(); ++i) {
    const ArchiveRecord& rec = archive[i];
    const auto it = by_id.find(rec.scene_id);
    if (it == by_id.end()) throw Error(ErrorCode::mismatch, "archive scene '" + rec.scene_id + "' is not in the dataset");
    const Scene& s = *it->second;
    if (rec.candidate_index >= s.size() || s.agents[rec.candidate_index].id != rec.candidate_id) {
      throw Error(ErrorCode::mismatch, "archive candidate '" + rec.candidate_id + "' not found in scene '" + s.id + "'");
    }
    if (rec.perturbation.size() != s.t_obs()) {
      throw Error(ErrorCode::mismatch, "archive perturbation for scene '" + s.id + "' has the wrong length");
    }
    scenes[i] = &s;
  }

  std::vector<char> flags(archive.size(), 0);
  for_each_index(exec, archive.size(), [&](std::size_t i) {
    Scene s = *scenes[i];
    s.candidate_index = archive[i].candidate_index;
    const auto predictions = target.predict(apply_perturbation(s, archive[i].perturbation));
    flags[i] = candidate_collides(predictions, s.candidate_index, gamma) ? 1 : 0;
  });

  TransferResult out;
  out.collided.assign(flags.begin(), flags.end());
  const std::vector<bool>& c = out.collided;
  std::size_t hits = 0;
  for (bool b : c) hits += b ? 1 : 0;
  out.cr = 100.0 * static_cast<double>(hits) / static_cast<double>(c.size());
  return out;
}

}  // namespace sattack
