#include "sattack/predictors/training.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "sattack/core/error.hpp"

namespace sattack {

void TrainingConfig::validate() const {
  if (epochs < 0) throw Error(ErrorCode::invalid_config, "epochs must be >= 0");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::invalid_config, "learning rate must be >= 0");
  }
  if (batch_size == 0) throw Error(ErrorCode::invalid_config, "batch size must be positive");
  if (hidden == 0) throw Error(ErrorCode::invalid_config, "hidden size must be positive");
}

namespace {

struct SceneGradient {
  double loss = 0.0;
  std::array<ad::Tensor, PoolLiteParams::slot_count> grads;
};

SceneGradient scene_gradient(const PoolLiteParams& params, const Scene& scene) {
  if (!scene.has_futures()) throw Error(ErrorCode::no_ground_truth, "training scene '" + scene.id + "'");
  const std::size_t n = scene.size();
  const std::size_t t_pred = scene.t_pred();

  ad::Tape tape;
  std::array<ad::Var, PoolLiteParams::slot_count> leaves;
  for (std::size_t s = 0; s < PoolLiteParams::slot_count; ++s) leaves[s] = tape.leaf(params.tensors[s]);
  const auto obs = observation_nodes(tape, scene);
  const auto pred = pool_lite_forward(tape, obs, leaves, params.hidden, t_pred);

  std::vector<ad::Var> errors;
  errors.reserve(t_pred);
  for (std::size_t t = 0; t < t_pred; ++t) {
    ad::Tensor truth(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      const Point p = (*scene.agents[i].future)[t];
      truth(i, 0) = p.x;
      truth(i, 1) = p.y;
    }
    errors.push_back(ad::sub(pred[t], tape.constant(std::move(truth))));
  }
  const ad::Var diff = ad::concat(errors, 0);
  // Mean over points of the squared distance = 2 × mean over coordinates.
  const ad::Var loss = ad::scale(ad::mean(ad::mul(diff, diff)), 2.0);
  const auto grads = tape.backward(loss);

  SceneGradient out;
  out.loss = loss.value().item();
  for (std::size_t s = 0; s < PoolLiteParams::slot_count; ++s) out.grads[s] = grads.of(leaves[s]);
  return out;
}

}  // namespace

BatchGradient pool_lite_batch_gradient(const PoolLiteParams& params, std::span<const Scene> batch,
                                       Execution exec) {
  if (batch.empty()) throw Error(ErrorCode::empty_dataset, "empty training batch");
  std::vector<SceneGradient> per_scene(batch.size());
  for_each_index(exec, batch.size(), [&](std::size_t i) { per_scene[i] = scene_gradient(params, batch[i]); });

  BatchGradient out;
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (std::size_t s = 0; s < PoolLiteParams::slot_count; ++s) {
    out.grads[s] = ad::Tensor(params.tensors[s].rows(), params.tensors[s].cols());
  }
  for (const auto& g : per_scene) {
    out.loss += g.loss * inv;
    for (std::size_t s = 0; s < PoolLiteParams::slot_count; ++s) {
      auto& acc = out.grads[s];
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += g.grads[s][k] * inv;
    }
  }
  return out;
}

PoolLiteTrainer::PoolLiteTrainer(PoolLiteParams init, TrainingConfig config)
    : params_(std::move(init)), config_(config) {
  config_.validate();
  params_.validate();
  for (std::size_t s = 0; s < PoolLiteParams::slot_count; ++s) {
    m_[s] = ad::Tensor(params_.tensors[s].rows(), params_.tensors[s].cols());
    v_[s] = m_[s];
  }
}

double PoolLiteTrainer::step(std::span<const Scene> batch, Execution exec) {
  BatchGradient g = pool_lite_batch_gradient(params_, batch, exec);
  if (!std::isfinite(g.loss)) throw Error(ErrorCode::numeric, "non-finite training loss");

  if (config_.clip_norm > 0.0) {
    double sq = 0.0;
    for (const auto& t : g.grads) {
      for (double v : t.data()) sq += v * v;
    }
    const double total = std::sqrt(sq);
    if (total > config_.clip_norm) {
      const double s = config_.clip_norm / total;
      for (auto& t : g.grads) {
        for (double& v : t.storage()) v *= s;
      }
    }
  }

  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(steps_));
  const double lr = config_.learning_rate;
  for (std::size_t s = 0; s < PoolLiteParams::slot_count; ++s) {
    auto& p = params_.tensors[s];
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double grad = g.grads[s][k];
      m_[s][k] = beta1 * m_[s][k] + (1.0 - beta1) * grad;
      v_[s][k] = beta2 * v_[s][k] + (1.0 - beta2) * grad * grad;
      if (lr == 0.0) continue;
      p[k] -= lr * (m_[s][k] / c1) / (std::sqrt(v_[s][k] / c2) + eps);
    }
  }
  return g.loss;
}

TrainingResult train_pool_lite(std::span<const Scene> dataset, const TrainingConfig& config,
                               std::optional<PoolLiteParams> init, Execution exec) {
  config.validate();
  if (dataset.empty()) throw Error(ErrorCode::empty_dataset, "no training scenes");
  for (const auto& scene : dataset) {
    if (!scene.has_futures()) throw Error(ErrorCode::no_ground_truth, "training scene '" + scene.id + "'");
  }

  PoolLiteParams start = init ? std::move(*init) : PoolLiteParams::initialize(config.hidden, config.seed);
  PoolLiteTrainer trainer(std::move(start), config);
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);

  TrainingResult result;
  std::vector<Scene> batch;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    if (config.cosine_schedule) {
      const double phase = std::numbers::pi * static_cast<double>(epoch) / static_cast<double>(config.epochs);
      trainer.set_learning_rate(config.learning_rate * 0.5 * (1.0 + std::cos(phase)));
    }
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      batch.clear();
      for (std::size_t k = begin; k < end; ++k) batch.push_back(dataset[order[k]]);
      total += trainer.step(batch, exec);
      ++batches;
    }
    result.loss_curve.push_back(total / static_cast<double>(batches));
  }
  result.params = trainer.params();
  return result;
}

}  // namespace sattack
