#include "sattack/experiments/finetune.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "sattack/attack/engine.hpp"
#include "sattack/core/error.hpp"
#include "sattack/core/geometry.hpp"
#include "sattack/predictors/training.hpp"

namespace sattack {

std::string_view to_string(Augmentation a) { return a == Augmentation::sattack ? "sattack" : "random"; }

Augmentation parse_augmentation(std::string_view text) {
  if (text == "sattack") return Augmentation::sattack;
  if (text == "random") return Augmentation::random;
  throw Error(ErrorCode::invalid_config, "unknown augmentation '" + std::string(text) + "'");
}

void FinetuneConfig::validate() const {
  TrainingConfig t;
  t.epochs = epochs;
  t.learning_rate = learning_rate;
  t.batch_size = batch_size;
  t.clip_norm = clip_norm;
  t.validate();
}

RobustnessMetrics evaluate_robustness(const PoolLiteParams& params, std::span<const Scene> held_out,
                                      const AttackConfig& attack, Execution exec) {
  if (held_out.empty()) throw Error(ErrorCode::empty_dataset, "empty held-out set");
  const PoolLitePredictor predictor(params);
  AttackConfig cfg = attack;
  cfg.mode = AttackMode::soft;
  const auto run = attack_dataset(held_out, predictor, cfg, exec);

  RobustnessMetrics out;
  out.cr_original = run.summary.cr_original;
  out.cr_attacked = run.summary.cr;

  std::vector<DisplacementError> per_scene(held_out.size());
  for_each_index(exec, held_out.size(), [&](std::size_t i) {
    per_scene[i] = metric_ade_fde(predictor.predict(held_out[i]), held_out[i]);
  });
  double agents = 0.0;
  for (std::size_t i = 0; i < held_out.size(); ++i) {
    const auto n = static_cast<double>(held_out[i].size());
    out.accuracy.ade += per_scene[i].ade * n;
    out.accuracy.fde += per_scene[i].fde * n;
    agents += n;
  }
  out.accuracy.ade /= agents;
  out.accuracy.fde /= agents;
  return out;
}

FinetuneResult adversarial_finetune(const PoolLiteParams& params, std::span<const Scene> train,
                                    std::span<const Scene> held_out, const AttackConfig& attack,
                                    const FinetuneConfig& config, Execution exec) {
  config.validate();
  attack.validate();
  if (train.empty()) throw Error(ErrorCode::empty_dataset, "empty fine-tuning set");
  for (const Scene& s : train) {
    if (!s.has_futures()) throw Error(ErrorCode::no_ground_truth, "fine-tuning scene '" + s.id + "'");
  }

  FinetuneResult out;
  out.before = evaluate_robustness(params, held_out, attack, exec);

  TrainingConfig tc;
  tc.epochs = config.epochs;
  tc.learning_rate = config.learning_rate;
  tc.batch_size = config.batch_size;
  tc.clip_norm = config.clip_norm;
  tc.hidden = params.hidden;
  tc.seed = config.seed;
  PoolLiteTrainer trainer(params, tc);

  AttackConfig adv = attack;
  adv.mode = config.augmentation == Augmentation::sattack ? AttackMode::soft : AttackMode::random;

  std::mt19937_64 rng(config.seed ^ 0xa0761d6478bd642full);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t attack_counter = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    std::size_t steps = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const std::size_t m = end - begin;
      std::vector<Scene> batch(2 * m);
      std::vector<std::uint64_t> seeds(m);
      for (std::size_t k = 0; k < m; ++k) {
        batch[k] = train[order[begin + k]];
        batch[k].candidate_index = batch[k].size() > 1 ? static_cast<std::size_t>(rng() % batch[k].size()) : 0;
        seeds[k] = instance_seed(config.seed, attack_counter++);
      }

      const PoolLitePredictor current(trainer.params());
      for_each_index(exec, m, [&](std::size_t k) {
        const Scene& original = batch[k];
        if (original.size() < 2) {
          batch[m + k] = original;
          return;
        }
        AttackConfig cfg = adv;
        cfg.seed = seeds[k];
        const auto report = run_attack(original, current, cfg);
        batch[m + k] = apply_perturbation(original, report.perturbation);
      });
      total += trainer.step(batch, exec);
      ++steps;
    }
    out.loss_curve.push_back(total / static_cast<double>(steps));
  }

  out.params = trainer.params();
  out.after = evaluate_robustness(out.params, held_out, attack, exec);
  return out;
}

FinetuneResult adversarial_finetune(const Predictor& predictor, std::span<const Scene> train,
                                    std::span<const Scene> held_out, const AttackConfig& attack,
                                    const FinetuneConfig& config, Execution exec) {
  const auto* pool = dynamic_cast<const PoolLitePredictor*>(&predictor);
  if (!pool) {
    throw Error(ErrorCode::not_differentiable, "cannot fine-tune predictor '" + predictor.name() + "'");
  }
  return adversarial_finetune(pool->params(), train, held_out, attack, config, exec);
}

std::string finetune_table(const FinetuneResult& result) {
  char buffer[256];
  std::string out = "model    ADE (m)  FDE (m)  CR original (%)  CR attacked (%)\n";
  auto row = [&](const char* name, const RobustnessMetrics& m) {
    std::snprintf(buffer, sizeof(buffer), "%-8s %7.4f  %7.4f  %15.2f  %15.2f\n", name, m.accuracy.ade, m.accuracy.fde,
                  m.cr_original, m.cr_attacked);
    out += buffer;
  };
  row("before", result.before);
  row("after", result.after);
  return out;
}

}  // namespace sattack
