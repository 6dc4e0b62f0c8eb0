#include "sattack/attack/engine.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "sattack/attack/losses.hpp"
#include "sattack/core/error.hpp"
#include "sattack/core/geometry.hpp"
#include "sattack/core/metrics.hpp"

namespace sattack {

namespace {

ad::Tensor to_tensor(const Perturbation& r) {
  ad::Tensor t(r.size(), 2);
  for (std::size_t i = 0; i < r.size(); ++i) {
    t(i, 0) = r[i].x;
    t(i, 1) = r[i].y;
  }
  return t;
}

/// Observation nodes with R injected into the candidate row: X_t + e_c · R_t.
std::vector<ad::Var> perturbed_observations(ad::Tape& tape, const Scene& scene, ad::Var r) {
  auto obs = observation_nodes(tape, scene);
  ad::Tensor selector(scene.size(), 1);
  selector[scene.candidate_index] = 1.0;
  const ad::Var e = tape.constant(std::move(selector));
  for (std::size_t t = 0; t < obs.size(); ++t) {
    obs[t] = ad::add(obs[t], ad::matmul(e, ad::slice(r, t, 1, 0, 2)));
  }
  return obs;
}

/// (n−1)×T_pred node of candidate-to-neighbor distances. With `frozen`,
/// neighbor positions are constants taken from it.
ad::Var distance_node(ad::Tape& tape, std::span<const ad::Var> steps, std::size_t candidate,
                      const PredictionSet* frozen) {
  const std::size_t n = steps.front().rows();
  std::vector<std::size_t> neighbors;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != candidate) neighbors.push_back(j);
  }
  std::vector<ad::Var> columns;
  columns.reserve(steps.size());
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const ad::Var cand = ad::slice(steps[t], candidate, 1, 0, 2);
    ad::Var others;
    if (frozen) {
      ad::Tensor fixed(neighbors.size(), 2);
      for (std::size_t k = 0; k < neighbors.size(); ++k) {
        const Point p = frozen->trajectories[neighbors[k]][t];
        fixed(k, 0) = p.x;
        fixed(k, 1) = p.y;
      }
      others = tape.constant(std::move(fixed));
    } else {
      others = ad::gather_rows(steps[t], neighbors);
    }
    columns.push_back(ad::norm_rows(ad::sub(others, cand)));
  }
  return ad::concat(columns, 1);
}

struct StepResult {
  PredictionSet live;
  ad::Tensor grad_r;
  ad::Tensor grad_w;
  double loss = 0.0;
};

struct Forward {
  ad::Tape tape;
  ad::Var r;
  std::vector<ad::Var> steps;
};

void forward(Forward& f, const Scene& scene, const DifferentiablePredictor& predictor, const Perturbation& r) {
  f.r = f.tape.leaf(to_tensor(r));
  const auto obs = perturbed_observations(f.tape, scene, f.r);
  f.steps = predictor.record(f.tape, obs);
}

/// Loss and gradients for one attack step on a recorded forward pass.
StepResult gradient_step(Forward& f, const Scene& scene, const AttackConfig& cfg, const AttentionWeights& w,
                         const PredictionSet& before) {
  ad::Tape& tape = f.tape;
  const ad::Var d =
      distance_node(tape, f.steps, scene.candidate_index, cfg.freeze_neighbors ? &before : nullptr);
  ad::Var loss;
  ad::Var w_node;
  switch (cfg.mode) {
    case AttackMode::none:
      loss = loss_no_attention(d);
      break;
    case AttackMode::hard:
      loss = loss_hard_attention(d, f.r, cfg.lambda_r).loss;
      break;
    case AttackMode::soft:
      w_node = tape.leaf(ad::Tensor(w.rows(), w.cols(), w.values()));
      loss = loss_soft_attention(d, w_node, f.r, cfg.lambda_r, cfg.lambda_w);
      break;
    case AttackMode::random:
      throw Error(ErrorCode::invalid_config, "random mode has no gradient step");
  }
  StepResult out;
  out.loss = loss.value().item();
  if (!std::isfinite(out.loss)) throw Error(ErrorCode::numeric, "non-finite attack loss on scene '" + scene.id + "'");
  const auto grads = tape.backward(loss);
  out.grad_r = grads.of(f.r);
  if (cfg.mode == AttackMode::soft) out.grad_w = grads.of(w_node);
  return out;
}

void descend_r(Perturbation& r, const ad::Tensor& grad, double step, double epsilon) {
  double largest = 0.0;
  for (std::size_t t = 0; t < grad.rows(); ++t) largest = std::max(largest, std::hypot(grad(t, 0), grad(t, 1)));
  if (largest > 0.0 && std::isfinite(largest)) {
    const double s = step / largest;
    for (std::size_t t = 0; t < r.size(); ++t) {
      r[t].x -= s * grad(t, 0);
      r[t].y -= s * grad(t, 1);
    }
  }
  r = project_perturbation(r, epsilon);
}

AttentionWeights descend_w(const AttentionWeights& w, const ad::Tensor& grad, double step) {
  std::vector<double> raw = w.values();
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] -= step * grad[i];
  return project_simplex(w.rows(), w.cols(), raw);
}

void finish(AttackReport& report, const Scene& scene, const AttackConfig& cfg, const Perturbation& r,
            PredictionSet live) {
  const auto cell = check_collision(distance_matrix(live, scene.candidate_index), cfg.gamma);
  report.collided = cell.has_value();
  report.collision_cell = cell;
  report.perturbation = r;
  report.p_avg = metric_pavg(r);
  report.predictions_after = std::move(live);
}

}  // namespace

std::uint64_t instance_seed(std::uint64_t base, std::size_t index) {
  // splitmix64 of the pair.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

AttackGradient attack_loss_gradient(const Scene& scene, const DifferentiablePredictor& predictor,
                                    const AttackConfig& config, const Perturbation& r, const AttentionWeights& w) {
  config.validate();
  scene.validate();
  if (scene.size() < 2) throw Error(ErrorCode::no_neighbors, "scene '" + scene.id + "' has a single agent");
  if (r.size() != scene.t_obs()) throw Error(ErrorCode::shape, "perturbation does not match the observation length");
  const PredictionSet before = config.freeze_neighbors ? predictor.predict(scene) : PredictionSet{};
  Forward f;
  forward(f, scene, predictor, r);
  StepResult step = gradient_step(f, scene, config, w, before);
  return {step.loss, std::move(step.grad_r), std::move(step.grad_w)};
}

AttackReport run_attack(const Scene& scene, const Predictor& predictor, const AttackConfig& cfg,
                        AttackTrace* trace) {
  cfg.validate();
  scene.validate();
  if (scene.size() < 2) throw Error(ErrorCode::no_neighbors, "scene '" + scene.id + "' has a single agent");

  AttackReport report;
  report.scene_id = scene.id;
  report.candidate_index = scene.candidate_index;
  report.candidate_id = scene.agents[scene.candidate_index].id;
  report.mode = cfg.mode;
  const std::size_t t_obs = scene.t_obs();
  const double gamma = cfg.gamma;

  if (cfg.mode == AttackMode::random) {
    report.predictions_before = predictor.predict(scene);
    report.collided_before = candidate_collides(report.predictions_before, scene.candidate_index, gamma);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    Perturbation r = Perturbation::zeros(t_obs);
    for (std::size_t t = 0; t < t_obs; ++t) {
      const double a = angle(rng);
      r[t] = Point{cfg.epsilon * std::cos(a), cfg.epsilon * std::sin(a)};
    }
    r = project_perturbation(r, cfg.epsilon);
    finish(report, scene, cfg, r, predictor.predict(apply_perturbation(scene, r)));
    if (trace) trace->perturbations.push_back(r);
    return report;
  }

  if (!predictor.differentiable()) {
    throw Error(ErrorCode::not_differentiable, "predictor '" + predictor.name() + "' cannot be attacked by gradient");
  }
  const auto& model = static_cast<const DifferentiablePredictor&>(predictor);

  Perturbation r = Perturbation::zeros(t_obs);
  AttentionWeights w = AttentionWeights::uniform(scene.size() - 1, model.t_pred());

  for (int it = 0;; ++it) {
    Forward f;
    forward(f, scene, model, r);
    PredictionSet live = to_prediction_set(f.steps);
    if (it == 0) {
      report.predictions_before = live;
      report.collided_before = candidate_collides(live, scene.candidate_index, gamma);
    }
    if (candidate_collides(live, scene.candidate_index, gamma) || it == cfg.max_iters) {
      report.iterations_used = it;
      finish(report, scene, cfg, r, std::move(live));
      return report;
    }

    StepResult step = gradient_step(f, scene, cfg, w, report.predictions_before);
    if (cfg.mode == AttackMode::soft && cfg.alternating) {
      w = descend_w(w, step.grad_w, cfg.step_size_w);
      Forward again;
      forward(again, scene, model, r);
      step = gradient_step(again, scene, cfg, w, report.predictions_before);
      descend_r(r, step.grad_r, cfg.step_size_r, cfg.epsilon);
    } else {
      descend_r(r, step.grad_r, cfg.step_size_r, cfg.epsilon);
      if (cfg.mode == AttackMode::soft) w = descend_w(w, step.grad_w, cfg.step_size_w);
    }

    if (trace) {
      trace->perturbations.push_back(r);
      trace->losses.push_back(step.loss);
      if (cfg.mode == AttackMode::soft) trace->weights.push_back(w);
      if (cfg.mode == AttackMode::hard) {
        const auto d = distance_matrix(live, scene.candidate_index);
        std::size_t best = 0;
        for (std::size_t i = 1; i < d.values().size(); ++i) {
          if (d.values()[i] < d.values()[best]) best = i;
        }
        trace->weights.push_back(AttentionWeights::one_hot(d.rows(), d.cols(), best / d.cols(), best % d.cols()));
      }
    }
  }
}

std::vector<AttackInstance> expand_instances(std::span<const Scene> dataset) {
  std::vector<AttackInstance> out;
  for (std::size_t s = 0; s < dataset.size(); ++s) {
    if (dataset[s].size() < 2) continue;
    for (std::size_t c = 0; c < dataset[s].size(); ++c) out.push_back({s, c});
  }
  return out;
}

AttackSummary summarize(std::span<const AttackReport> reports) {
  AttackSummary s;
  s.instances = reports.size();
  if (reports.empty()) return s;
  std::size_t before = 0;
  double pavg_hit = 0.0;
  double pavg_all = 0.0;
  for (const auto& r : reports) {
    if (r.collided_before) ++before;
    if (r.collided) {
      ++s.collided;
      pavg_hit += r.p_avg;
    }
    pavg_all += r.p_avg;
  }
  const double n = static_cast<double>(reports.size());
  s.cr_original = 100.0 * static_cast<double>(before) / n;
  s.cr = metric_cr(reports);
  s.mean_pavg_collided = s.collided ? pavg_hit / static_cast<double>(s.collided) : 0.0;
  s.mean_pavg_all = pavg_all / n;
  return s;
}

DatasetAttack attack_dataset(std::span<const Scene> dataset, const Predictor& predictor, const AttackConfig& config,
                             Execution exec) {
  if (dataset.empty()) throw Error(ErrorCode::empty_dataset, "attack on an empty dataset");
  config.validate();
  const auto instances = expand_instances(dataset);
  DatasetAttack out;
  out.reports.resize(instances.size());
  for_each_index(exec, instances.size(), [&](std::size_t i) {
    Scene scene = dataset[instances[i].scene_index];
    scene.candidate_index = instances[i].candidate;
    AttackConfig cfg = config;
    cfg.seed = instance_seed(config.seed, i);
    out.reports[i] = run_attack(scene, predictor, cfg);
  });
  out.summary = summarize(out.reports);
  return out;
}

}  // namespace sattack
