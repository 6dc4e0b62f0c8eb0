// Command-line front end: dataset preparation, training, attacks and the
// experiment drivers.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "sattack/attack/archive.hpp"
#include "sattack/attack/engine.hpp"
#include "sattack/core/error.hpp"
#include "sattack/core/geometry.hpp"
#include "sattack/core/metrics.hpp"
#include "sattack/data/frames.hpp"
#include "sattack/data/report.hpp"
#include "sattack/data/scene_io.hpp"
#include "sattack/data/synthetic.hpp"
#include "sattack/experiments/finetune.hpp"
#include "sattack/experiments/frozen.hpp"
#include "sattack/experiments/sensitivity.hpp"
#include "sattack/experiments/transfer.hpp"
#include "sattack/predictors/checkpoint.hpp"
#include "sattack/predictors/constant_velocity.hpp"
#include "sattack/predictors/social_forces.hpp"
#include "sattack/predictors/training.hpp"

namespace fs = std::filesystem;
using namespace sattack;

namespace {

enum Exit { ok = 0, usage = 2, data = 3, numeric = 4 };

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_config:
    case ErrorCode::not_differentiable:
      return usage;
    case ErrorCode::numeric:
    case ErrorCode::non_scalar_loss:
      return numeric;
    default:
      return data;
  }
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SATTACK_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_config, "SATTACK_SEED must be an unsigned integer");
    }
  }
  return 0;
}

std::size_t horizon(std::span<const Scene> scenes) {
  for (const Scene& s : scenes) {
    if (s.has_futures()) return s.t_pred();
  }
  return 12;
}

/// "cv", "pool-lite:<checkpoint>", "social-forces" or "social-forces:<params.json>".
std::unique_ptr<Predictor> load_model(const std::string& spec, std::size_t t_pred) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "cv") return std::make_unique<ConstantVelocityPredictor>(t_pred);
  if (kind == "pool-lite") {
    if (arg.empty()) throw Error(ErrorCode::invalid_config, "pool-lite needs a checkpoint: pool-lite:<path>");
    return std::make_unique<PoolLitePredictor>(load_checkpoint(arg).params, t_pred);
  }
  if (kind == "social-forces") {
    return std::make_unique<SocialForcesPredictor>(arg.empty() ? SocialForcesParams{} : SocialForcesParams::load(arg),
                                                   t_pred);
  }
  throw Error(ErrorCode::invalid_config, "unknown model '" + spec + "' (cv | pool-lite:<ckpt> | social-forces[:<json>])");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path + "'");
  return out;
}

struct Common {
  int jobs = available_threads();
  std::uint64_t seed = 0;

  Execution exec() const {
    set_threads(jobs);
    return jobs == 1 ? Execution::serial : Execution::parallel;
  }
};

void add_jobs(CLI::App* cmd, Common& c) {
  cmd->add_option("--jobs", c.jobs, "Worker threads (default: available cores)")->check(CLI::PositiveNumber);
}

void add_seed(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed (default: $SATTACK_SEED or 0)")->capture_default_str();
}

void add_attack_flags(CLI::App* cmd, AttackConfig& cfg, std::string& mode) {
  cmd->add_option("--mode", mode, "Attack mode: none | hard | soft | random")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "hard", "soft", "random"}));
  cmd->add_option("--epsilon", cfg.epsilon, "Max per-timestep perturbation norm, m")->capture_default_str();
  cmd->add_option("--gamma", cfg.gamma, "Collision threshold, m")->capture_default_str();
  cmd->add_option("--lambda-r", cfg.lambda_r, "Perturbation-norm weight")->capture_default_str();
  cmd->add_option("--lambda-w", cfg.lambda_w, "Attention-norm weight")->capture_default_str();
  cmd->add_option("--max-iters", cfg.max_iters, "Attack iterations")->capture_default_str();
  cmd->add_option("--step-r", cfg.step_size_r, "Largest per-step row move of R, m (repo default)")
      ->capture_default_str();
  cmd->add_option("--step-w", cfg.step_size_w, "Step size for W (repo default)")->capture_default_str();
  cmd->add_flag("--freeze-neighbors", cfg.freeze_neighbors, "Use unattacked neighbor predictions in the loss");
  cmd->add_flag("--alternating", cfg.alternating, "Soft mode: update W, then R (repo default: joint step)");
}

int run_gen(const std::string& tmpl, std::size_t count, double noise, const SyntheticOptions& options, const Common& c,
            const std::string& out) {
  const auto scenes = generate_synthetic(parse_synthetic_template(tmpl), noise, count, c.seed, options);
  write_scenes(out, scenes);
  std::cout << "wrote " << scenes.size() << " scenes to " << out << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Socially-attended adversarial attacks on trajectory predictors"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Common common;
  std::string out;
  std::string scenes_path;
  std::string model = "cv";

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  std::string tmpl = "mixed";
  std::size_t count = 100;
  double noise = 0.0;
  gen->add_option("--template", tmpl, "head_on | crossing_90deg | parallel | overtake | mixed")
      ->capture_default_str();
  gen->add_option("--count", count, "Number of scenes")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--noise", noise, "Positional noise sigma, m")->capture_default_str();
  SyntheticOptions gen_options;
  gen->add_option("--interaction", gen_options.interaction, "Pairwise repulsion strength, m/s^2; 0 = straight lines")
      ->capture_default_str();
  gen->add_option("--lateral-offset", gen_options.lateral_offset, "head_on lane offset, m (default: random 1.2-2.5)");
  gen->add_option("--lateral-gap", gen_options.lateral_gap, "parallel lane gap, m (default: random 1.0-1.6)");
  add_seed(gen, common);
  gen->add_option("--out", out, "Output scenes (JSON lines)")->required();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Cut scenes out of a frame-annotation file");
  std::string frames_path;
  SceneWindowConfig window;
  bool lenient = false;
  ingest->add_option("--frames", frames_path, "frame_id, agent_id, x, y rows")->required()->check(CLI::ExistingFile);
  ingest->add_option("--t-obs", window.t_obs, "Observed frames")->capture_default_str();
  ingest->add_option("--t-pred", window.t_pred, "Predicted frames")->capture_default_str();
  ingest->add_option("--stride", window.stride, "Frames between windows (repo default)")->capture_default_str();
  ingest->add_option("--min-neighbors", window.min_neighbors, "Drop scenes with fewer neighbors (repo default)")
      ->capture_default_str();
  ingest->add_flag("--lenient", lenient, "Skip malformed lines instead of failing");
  ingest->add_option("--out", out, "Output scenes (JSON lines)")->required();

  // train
  auto* train = app.add_subcommand("train", "Train pool-lite");
  TrainingConfig tcfg;
  train->add_option("--scenes", scenes_path, "Training scenes")->required()->check(CLI::ExistingFile);
  train->add_option("--epochs", tcfg.epochs, "Epochs (repo default)")->capture_default_str();
  train->add_option("--lr", tcfg.learning_rate, "Adam learning rate (repo default)")->capture_default_str();
  train->add_option("--batch", tcfg.batch_size, "Scenes per step (repo default)")->capture_default_str();
  train->add_option("--hidden", tcfg.hidden, "Hidden width (repo default)")->capture_default_str();
  train->add_option("--clip", tcfg.clip_norm, "Gradient-norm clip, 0 = off (repo default)")->capture_default_str();
  add_seed(train, common);
  add_jobs(train, common);
  train->add_option("--out", out, "Checkpoint path")->required();

  // attack
  auto* attack = app.add_subcommand("attack", "Attack every agent of every scene");
  AttackConfig acfg;
  std::string mode = "soft";
  std::string archive_path;
  std::string plot_dir;
  std::size_t plot_limit = 20;
  attack->add_option("--scenes", scenes_path, "Scenes")->required()->check(CLI::ExistingFile);
  attack->add_option("--model", model, "cv | pool-lite:<ckpt> | social-forces[:<json>]")->capture_default_str();
  add_attack_flags(attack, acfg, mode);
  add_seed(attack, common);
  add_jobs(attack, common);
  attack->add_option("--out", out, "Report (JSON lines)")->required();
  attack->add_option("--archive", archive_path, "Perturbation archive (JSON lines)");
  attack->add_option("--plot-dir", plot_dir, "Write SVG plots of collided instances here");
  attack->add_option("--plot-limit", plot_limit, "Maximum number of plots (repo default)")->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "ADE/FDE and collision rate of a predictor");
  std::string perturbations;
  double gamma = 0.2;
  eval->add_option("--scenes", scenes_path, "Scenes")->required()->check(CLI::ExistingFile);
  eval->add_option("--model", model, "cv | pool-lite:<ckpt> | social-forces[:<json>]")->capture_default_str();
  eval->add_option("--perturbations", perturbations, "Apply an archive before predicting")->check(CLI::ExistingFile);
  eval->add_option("--gamma", gamma, "Collision threshold, m")->capture_default_str();
  add_jobs(eval, common);

  // transfer
  auto* transfer = app.add_subcommand("transfer", "Replay archived perturbations on another predictor");
  std::string target = "cv";
  transfer->add_option("--archive", archive_path, "Perturbation archive")->required()->check(CLI::ExistingFile);
  transfer->add_option("--target", target, "cv | pool-lite:<ckpt> | social-forces[:<json>]")->capture_default_str();
  transfer->add_option("--scenes", scenes_path, "Scenes the archive was made on")->required()->check(CLI::ExistingFile);
  transfer->add_option("--gamma", gamma, "Collision threshold, m")->capture_default_str();
  transfer->add_option("--out", out, "Per-instance outcomes (JSON lines)");
  add_jobs(transfer, common);

  // sensitivity
  auto* sens = app.add_subcommand("sensitivity", "Per-timestep sensitivity of predictions to observation noise");
  SensitivityConfig scfg;
  sens->add_option("--scenes", scenes_path, "Scenes")->required()->check(CLI::ExistingFile);
  sens->add_option("--model", model, "cv | pool-lite:<ckpt> | social-forces[:<json>]")->capture_default_str();
  sens->add_option("--magnitude", scfg.magnitude, "Noise norm, m")->capture_default_str();
  sens->add_option("--trials", scfg.trials, "Random directions per timestep (repo default)")->capture_default_str();
  sens->add_option("--archive", archive_path, "Attack archive for the mean |r_t| column")->check(CLI::ExistingFile);
  add_seed(sens, common);
  add_jobs(sens, common);
  sens->add_option("--out", out, "CSV output")->required();

  // finetune
  auto* fine = app.add_subcommand("finetune", "Adversarial fine-tuning of a pool-lite checkpoint");
  std::string ckpt;
  std::string held_out_path;
  std::string augmentation = "sattack";
  FinetuneConfig fcfg;
  AttackConfig fattack;
  fattack.epsilon = 0.03;
  fine->add_option("--ckpt", ckpt, "Starting checkpoint")->required()->check(CLI::ExistingFile);
  fine->add_option("--scenes", scenes_path, "Fine-tuning scenes")->required()->check(CLI::ExistingFile);
  fine->add_option("--held-out", held_out_path, "Evaluation scenes (default: last 20% of --scenes)")
      ->check(CLI::ExistingFile);
  fine->add_option("--epsilon", fattack.epsilon, "Attack budget during fine-tuning and evaluation, m")
      ->capture_default_str();
  fine->add_option("--gamma", fattack.gamma, "Collision threshold, m")->capture_default_str();
  fine->add_option("--max-iters", fattack.max_iters, "Attack iterations")->capture_default_str();
  fine->add_option("--epochs", fcfg.epochs, "Fine-tuning epochs (repo default)")->capture_default_str();
  fine->add_option("--lr", fcfg.learning_rate, "Adam learning rate (repo default)")->capture_default_str();
  fine->add_option("--batch", fcfg.batch_size, "Original scenes per step (repo default)")->capture_default_str();
  fine->add_option("--augmentation", augmentation, "sattack | random")
      ->capture_default_str()
      ->check(CLI::IsMember({"sattack", "random"}));
  add_seed(fine, common);
  add_jobs(fine, common);
  fine->add_option("--out", out, "Fine-tuned checkpoint")->required();

  try {
    common.seed = default_seed();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  try {
    if (*gen) return run_gen(tmpl, count, noise, gen_options, common, out);

    if (*ingest) {
      window.id_prefix = fs::path(frames_path).stem().string();
      const auto parsed = parse_frames_file(frames_path, !lenient);
      for (const auto& issue : parsed.issues) {
        std::cerr << "warning: " << frames_path << ":" << issue.line << ": " << issue.message << "\n";
      }
      const auto scenes = build_scenes(parsed.records, window);
      write_scenes(out, scenes);
      std::cout << "wrote " << scenes.size() << " scenes to " << out << "\n";
      return ok;
    }

    if (*train) {
      const auto scenes = read_scenes(scenes_path);
      tcfg.seed = common.seed;
      const auto result = train_pool_lite(scenes, tcfg, std::nullopt, common.exec());
      save_checkpoint(out, Checkpoint{result.params, result.loss_curve});
      std::cout << "trained " << result.params.parameter_count() << " parameters for " << tcfg.epochs
                << " epochs; final loss " << (result.loss_curve.empty() ? 0.0 : result.loss_curve.back()) << "\n";
      return ok;
    }

    if (*attack) {
      const auto scenes = read_scenes(scenes_path);
      const auto predictor = load_model(model, horizon(scenes));
      acfg.mode = parse_attack_mode(mode);
      acfg.seed = common.seed;
      acfg.validate();
      const auto run = attack_dataset(scenes, *predictor, acfg, common.exec());
      const auto summary = make_report_summary(run.reports, scenes);
      emit_report(run.reports, summary, out);
      if (!archive_path.empty()) {
        std::vector<ArchiveRecord> records;
        const std::string hash = acfg.hash();
        for (const auto& r : run.reports) records.push_back(to_archive_record(r, hash));
        write_archive(archive_path, records);
      }
      if (!plot_dir.empty()) {
        fs::create_directories(plot_dir);
        std::map<std::string, const Scene*> by_id;
        for (const Scene& s : scenes) by_id.emplace(s.id, &s);
        std::size_t written = 0;
        for (const auto& r : run.reports) {
          if (!r.collided || written >= plot_limit) continue;
          Scene s = *by_id.at(r.scene_id);
          s.candidate_index = r.candidate_index;
          std::string name = r.scene_id + "_" + r.candidate_id + ".svg";
          for (char& ch : name) {
            if (ch == '/' || ch == ':') ch = '_';
          }
          emit_plot(s, r, (fs::path(plot_dir) / name).string());
          ++written;
        }
      }
      std::cout << predictor->name() << ", " << to_string(acfg.mode) << " attack\n" << summary_table(summary);
      return ok;
    }

    if (*eval) {
      const auto scenes = read_scenes(scenes_path);
      const auto predictor = load_model(model, horizon(scenes));
      const Execution exec = common.exec();
      std::vector<PredictionSet> predictions(scenes.size());
      for_each_index(exec, scenes.size(), [&](std::size_t i) { predictions[i] = predictor->predict(scenes[i]); });

      double ade = 0.0, fde = 0.0, agents = 0.0;
      for (std::size_t i = 0; i < scenes.size(); ++i) {
        if (scenes[i].has_futures()) {
          const auto e = metric_ade_fde(predictions[i], scenes[i]);
          const auto n = static_cast<double>(scenes[i].size());
          ade += e.ade * n;
          fde += e.fde * n;
          agents += n;
        }
      }
      double cr = 0.0;
      if (!perturbations.empty()) {
        const auto archive = read_archive(perturbations);
        cr = transfer_eval(archive, *predictor, scenes, gamma, exec).cr;
      } else {
        std::size_t hits = 0;
        const auto instances = expand_instances(scenes);
        for (const auto& inst : instances) {
          if (candidate_collides(predictions[inst.scene_index], inst.candidate, gamma)) ++hits;
        }
        if (!instances.empty()) cr = 100.0 * static_cast<double>(hits) / static_cast<double>(instances.size());
      }
      std::printf("model           ADE (m)  FDE (m)  CR (%%)\n");
      if (agents > 0) {
        std::printf("%-14s  %7.2f  %7.2f  %6.2f\n", predictor->name().c_str(), ade / agents, fde / agents, cr);
      } else {
        std::printf("%-14s  %7s  %7s  %6.2f\n", predictor->name().c_str(), "n/a", "n/a", cr);
      }
      return ok;
    }

    if (*transfer) {
      const auto scenes = read_scenes(scenes_path);
      const auto archive = read_archive(archive_path);
      const auto predictor = load_model(target, horizon(scenes));
      const auto result = transfer_eval(archive, *predictor, scenes, gamma, common.exec());
      if (!out.empty()) {
        auto file = open_out(out);
        for (std::size_t i = 0; i < archive.size(); ++i) {
          nlohmann::ordered_json j;
          j["scene_id"] = archive[i].scene_id;
          j["candidate_id"] = archive[i].candidate_id;
          j["collided"] = static_cast<bool>(result.collided[i]);
          file << j.dump() << "\n";
        }
        nlohmann::ordered_json s;
        s["summary"] = {{"target", predictor->name()}, {"instances", archive.size()}, {"cr", result.cr}};
        file << s.dump() << "\n";
      }
      std::printf("target %s: transfer CR %.2f%% over %zu instances\n", predictor->name().c_str(), result.cr,
                  archive.size());
      return ok;
    }

    if (*sens) {
      const auto scenes = read_scenes(scenes_path);
      const auto predictor = load_model(model, horizon(scenes));
      scfg.seed = common.seed;
      const auto curve = timestep_sensitivity(*predictor, scenes, scfg, common.exec());
      std::vector<double> profile;
      if (!archive_path.empty()) profile = perturbation_profile(read_archive(archive_path));
      auto file = open_out(out);
      file << "timestep,sensitivity" << (profile.empty() ? "" : ",mean_abs_r") << "\n";
      for (std::size_t t = 0; t < curve.size(); ++t) {
        file << t << "," << format_double(curve[t]);
        if (!profile.empty()) file << "," << format_double(t < profile.size() ? profile[t] : 0.0);
        file << "\n";
      }
      for (std::size_t t = 0; t < curve.size(); ++t) std::printf("t=%zu  %.4f\n", t, curve[t]);
      return ok;
    }

    if (*fine) {
      auto scenes = read_scenes(scenes_path);
      std::vector<Scene> held_out;
      if (!held_out_path.empty()) {
        held_out = read_scenes(held_out_path);
      } else {
        if (scenes.size() < 2) throw Error(ErrorCode::empty_dataset, "need at least 2 scenes to split off a held-out set");
        const std::size_t keep = scenes.size() - std::max<std::size_t>(1, scenes.size() / 5);
        held_out.assign(scenes.begin() + static_cast<std::ptrdiff_t>(keep), scenes.end());
        scenes.resize(keep);
      }
      const auto start = load_checkpoint(ckpt);
      fcfg.seed = common.seed;
      fcfg.augmentation = parse_augmentation(augmentation);
      fattack.seed = common.seed;
      const auto result = adversarial_finetune(start.params, scenes, held_out, fattack, fcfg, common.exec());
      auto curve = start.loss_curve;
      curve.insert(curve.end(), result.loss_curve.begin(), result.loss_curve.end());
      save_checkpoint(out, Checkpoint{result.params, curve});
      std::cout << finetune_table(result);
      return ok;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return data;
  }
  return usage;
}
