// Grid search for the social-forces repulsion constants A and B.
//
// A candidate is admissible when, on head-on encounters whose lanes are
// closer than two collision radii, every predicted pair stays at least
// --clearance apart and no predicted speed exceeds --max-speed. Among admissible candidates the one with the lowest
// ADE on the ordinary head-on template wins. Prints the choice and writes
// it as a parameter file.

#include <cstdio>
#include <iostream>
#include <limits>

#include <CLI11.hpp>

#include "sattack/core/error.hpp"
#include "sattack/core/metrics.hpp"
#include "sattack/data/synthetic.hpp"
#include "sattack/predictors/social_forces.hpp"

using namespace sattack;

namespace {

double min_pair_distance(const PredictionSet& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      for (std::size_t t = 0; t < p.t_pred(); ++t) {
        best = std::min(best, distance(p.trajectories[i][t], p.trajectories[j][t]));
      }
    }
  }
  return best;
}

double max_speed(const PredictionSet& p, double dt) {
  double best = 0.0;
  for (const auto& traj : p.trajectories) {
    for (std::size_t t = 1; t < traj.size(); ++t) best = std::max(best, distance(traj[t], traj[t - 1]) / dt);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibrate social-forces repulsion on the head-on template"};
  std::string out = "social_forces.json";
  double clearance = 0.4;
  double speed_cap = 2.5;
  std::size_t count = 200;
  std::uint64_t seed = 11;
  app.add_option("--out", out, "Parameter file to write")->capture_default_str();
  app.add_option("--clearance", clearance, "Required separation on collision courses, m")->capture_default_str();
  app.add_option("--max-speed", speed_cap, "Largest admissible predicted speed, m/s")->capture_default_str();
  app.add_option("--count", count, "Scenes per template")->capture_default_str();
  app.add_option("--seed", seed, "Scene seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<std::vector<Scene>> courses;
    for (double offset : {0.0, 0.1, 0.2, 0.3}) {
      SyntheticOptions o;
      o.lateral_offset = offset;
      courses.push_back(generate_synthetic(SyntheticTemplate::head_on, 0.0, count / 4, seed, o));
    }
    const auto ordinary = generate_synthetic(SyntheticTemplate::head_on, 0.02, count, seed + 1);

    SocialForcesParams best;
    double best_ade = std::numeric_limits<double>::infinity();
    for (double a : {0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0}) {
      for (double b : {0.1, 0.15, 0.2, 0.3, 0.4, 0.5}) {
        SocialForcesParams p;
        p.repulsion_strength = a;
        p.repulsion_range = b;
        const SocialForcesPredictor model(p);
        double closest = std::numeric_limits<double>::infinity();
        double fastest = 0.0;
        for (const auto& set : courses) {
          for (const Scene& s : set) {
            const auto pred = model.predict(s);
            closest = std::min(closest, min_pair_distance(pred));
            fastest = std::max(fastest, max_speed(pred, p.dt));
          }
        }
        const bool admissible = closest >= clearance && fastest <= speed_cap;
        double ade = 0.0;
        for (const Scene& s : ordinary) ade += metric_ade_fde(model.predict(s), s).ade;
        ade /= static_cast<double>(ordinary.size());
        std::printf("A=%5.2f B=%4.2f  closest=%.3f  top speed=%.2f  ade=%.4f%s\n", a, b, closest, fastest, ade,
                    admissible ? "" : "  (rejected)");
        if (admissible && ade < best_ade) {
          best_ade = ade;
          best = p;
        }
      }
    }
    if (!std::isfinite(best_ade)) {
      std::cerr << "no admissible parameters\n";
      return 3;
    }
    best.save(out);
    std::printf("chose A=%.2f B=%.2f (ADE %.4f), wrote %s\n", best.repulsion_strength, best.repulsion_range, best_ade,
                out.c_str());
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
