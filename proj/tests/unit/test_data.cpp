#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sattack/attack/engine.hpp"
#include "sattack/core/error.hpp"
#include "sattack/data/frames.hpp"
#include "sattack/data/report.hpp"
#include "sattack/data/scene_io.hpp"
#include "sattack/data/synthetic.hpp"
#include "sattack/predictors/constant_velocity.hpp"
#include "support.hpp"

using namespace sattack;
using namespace sattack::testing;

namespace {

FrameParseResult parse(const std::string& text, bool strict = true) {
  std::istringstream in(text);
  return parse_frames(in, strict);
}

// Agents listed by id walk along x from frame `first` to `last` (step 10).
std::vector<FrameRecord> walkers(std::vector<std::string> ids, long long first, long long last) {
  std::vector<FrameRecord> out;
  for (long long f = first; f <= last; f += 10) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      out.push_back({f, ids[i], 0.04 * static_cast<double>(f), static_cast<double>(i)});
    }
  }
  return out;
}

double min_pair_distance(const Scene& s) {
  double best = 1e300;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      for (std::size_t t = 0; t < s.t_obs(); ++t) {
        best = std::min(best, distance(s.agents[i].observation[t], s.agents[j].observation[t]));
      }
      for (std::size_t t = 0; t < s.t_pred(); ++t) {
        best = std::min(best, distance((*s.agents[i].future)[t], (*s.agents[j].future)[t]));
      }
    }
  }
  return best;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("sattack-test-" + name);
}

}  // namespace

TEST_SUITE("data") {
  TEST_CASE("frame parsing accepts tabs, commas, spaces and comments") {
    const auto r = parse("# frame agent x y\n780\t1\t8.46\t3.59\n780.0,2,9.5,4\n\n790 1 8.8 3.6\n");
    REQUIRE(r.records.size() == 3);
    CHECK(r.records[0] == FrameRecord{780, "1", 8.46, 3.59});
    CHECK(r.records[1] == FrameRecord{780, "2", 9.5, 4.0});
    CHECK(r.records[2] == FrameRecord{790, "1", 8.8, 3.6});
    CHECK(r.issues.empty());
  }

  TEST_CASE("malformed lines") {
    const std::string text = "1\t1\t0\t0\n1\t1\tnan-ish\n2\t1\t0.4\t0\nabc\t1\t0\t0\n2\t1\t1\t1\n";
    try {
      parse(text);
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::parse);
      const std::string what = e.what();
      CHECK(what.find('2') != std::string::npos);
      CHECK(what.find('4') != std::string::npos);
      CHECK(what.find('5') != std::string::npos);
    }
    const auto lenient = parse(text, false);
    CHECK(lenient.records.size() == 2);
    REQUIRE(lenient.issues.size() == 3);
    CHECK(lenient.issues[0].line == 2);
    CHECK(lenient.issues[1].line == 4);
    CHECK(lenient.issues[2].line == 5);  // duplicate (2, 1)
  }

  TEST_CASE("frame serialization round trip") {
    Rng rng(1);
    std::vector<FrameRecord> records;
    for (int i = 0; i < 200; ++i) {
      records.push_back({static_cast<long long>(rng() % 10000) * 10 + i, std::to_string(rng() % 50),
                         uniform(rng, -100, 100), uniform(rng, -1e-3, 1e-3)});
    }
    const auto back = parse(serialize_frames(records));
    CHECK(back.records == records);
    CHECK(format_double(0.1) == "0.1");
  }

  TEST_CASE("scene windows") {
    SceneWindowConfig cfg;
    SUBCASE("21 frames, stride 21") {
      cfg.stride = 21;
      const auto scenes = build_scenes(walkers({"1", "2"}, 0, 200), cfg);
      REQUIRE(scenes.size() == 1);
      CHECK(scenes[0].size() == 2);
      CHECK(scenes[0].t_obs() == 9);
      CHECK(scenes[0].t_pred() == 12);
      CHECK(scenes[0].id == "scene:0");
      CHECK(scenes[0].agents[0].observation[3] == Point{1.2, 0});
      CHECK((*scenes[0].agents[1].future)[0] == Point{3.6, 1});
    }
    SUBCASE("25 frames, stride 1") {
      const auto scenes = build_scenes(walkers({"1", "2"}, 0, 240), cfg);
      REQUIRE(scenes.size() == 5);
      CHECK(scenes[4].id == "scene:40");
    }
    SUBCASE("an agent missing a frame is left out") {
      auto records = walkers({"1", "2", "3"}, 0, 200);
      std::erase_if(records, [](const FrameRecord& r) { return r.agent_id == "3" && r.frame_id == 100; });
      const auto scenes = build_scenes(records, cfg);
      REQUIRE(scenes.size() == 1);
      CHECK(scenes[0].size() == 2);
    }
    SUBCASE("neighbors required") {
      cfg.min_neighbors = 1;
      CHECK(build_scenes(walkers({"7"}, 0, 200), cfg).empty());
    }
    SUBCASE("record order does not matter and ids sort numerically") {
      auto records = walkers({"10", "9", "2"}, 0, 200);
      auto reversed = records;
      std::reverse(reversed.begin(), reversed.end());
      const auto a = build_scenes(records, cfg);
      CHECK(a == build_scenes(reversed, cfg));
      CHECK(a[0].agents[0].id == "2");
      CHECK(a[0].agents[1].id == "9");
      CHECK(a[0].agents[2].id == "10");
    }
    SUBCASE("too short") { CHECK(build_scenes(walkers({"1"}, 0, 100), cfg).empty()); }
    SUBCASE("invalid config") {
      cfg.t_obs = 1;
      CHECK_THROWS_AS(cfg.validate(), Error);
    }
  }

  TEST_CASE("scene lines round trip") {
    Rng rng(2);
    std::vector<Scene> scenes;
    for (int i = 0; i < 20; ++i) {
      Scene s = random_scene(rng, 1 + i % 4);
      s.candidate_index = i % s.size();
      if (i % 5 == 0) s.agents[0].future.reset();
      scenes.push_back(s);
      CHECK(parse_scene_line(scene_line(s)) == s);
    }
    const auto path = temp_file("scenes.jsonl");
    write_scenes(path.string(), scenes);
    CHECK(read_scenes(path.string()) == scenes);

    std::ofstream(path) << scene_line(scenes[0]) << "\n{\"scene_id\": \"x\"}\n";
    try {
      read_scenes(path.string());
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
    std::filesystem::remove(path);

    const auto minimal = parse_scene_line(R"({"scene_id":"m","agents":[{"id":"a","obs":[[0,0],[1,1]]}]})");
    CHECK(minimal.candidate_index == 0);
    CHECK_FALSE(minimal.agents[0].future.has_value());
  }

  TEST_CASE("synthetic templates") {
    SyntheticOptions options;
    SUBCASE("parallel lanes keep their gap") {
      options.lateral_gap = 1.0;
      for (const auto& s : generate_synthetic(SyntheticTemplate::parallel, 0.0, 50, 3, options)) {
        CHECK(min_pair_distance(s) >= 1.0 - 1e-9);
      }
    }
    SUBCASE("head-on walkers pass at the lateral offset") {
      options.lateral_offset = 2.0;
      for (const auto& s : generate_synthetic(SyntheticTemplate::head_on, 0.0, 50, 3, options)) {
        CHECK(s.size() == 2);
        CHECK(min_pair_distance(s) >= 0.4);
      }
    }
    SUBCASE("shape and determinism") {
      for (auto kind : {SyntheticTemplate::head_on, SyntheticTemplate::crossing_90deg, SyntheticTemplate::parallel,
                        SyntheticTemplate::overtake, SyntheticTemplate::mixed}) {
        const auto a = generate_synthetic(kind, 0.02, 20, 9);
        CHECK(a == generate_synthetic(kind, 0.02, 20, 9));
        CHECK_FALSE(a == generate_synthetic(kind, 0.02, 20, 10));
        for (const auto& s : a) {
          CHECK(s.size() >= 2);
          CHECK(s.size() <= 4);
          CHECK(s.t_obs() == 9);
          CHECK(s.t_pred() == 12);
          s.validate();
        }
        CHECK(parse_synthetic_template(to_string(kind)) == kind);
      }
      CHECK_THROWS_AS(parse_synthetic_template("zigzag"), Error);
    }
    SUBCASE("noise-free walkers keep a constant speed near the nominal one") {
      for (const auto& s : generate_synthetic(SyntheticTemplate::parallel, 0.0, 10, 4, options)) {
        for (const auto& a : s.agents) {
          const double step = distance(a.observation[1], a.observation[0]);
          CHECK(step >= 0.85 * 0.4 - 1e-9);
          CHECK(step <= 1.15 * 0.4 + 1e-9);
          CHECK(distance((*a.future)[11], (*a.future)[10]) == doctest::Approx(step));
        }
      }
    }
    SUBCASE("interaction keeps walkers apart") {
      options.lateral_offset = 0.0;
      options.interaction = 2.0;
      for (const auto& s : generate_synthetic(SyntheticTemplate::head_on, 0.0, 20, 5, options)) {
        CHECK(min_pair_distance(s) > 0.2);
      }
    }
  }

  TEST_CASE("reports") {
    const auto scenes = generate_synthetic(SyntheticTemplate::parallel, 0.01, 6, 11);
    AttackConfig cfg;
    const auto attack = attack_dataset(scenes, ConstantVelocityPredictor(), cfg);
    const auto summary = make_report_summary(attack.reports, scenes);
    REQUIRE(summary.accuracy);
    const auto path = temp_file("report.jsonl");
    emit_report(attack.reports, summary, path.string());
    const auto back = read_report(path.string());
    REQUIRE(back.reports.size() == attack.reports.size());
    std::size_t collided = 0;
    for (std::size_t i = 0; i < back.reports.size(); ++i) {
      CHECK(back.reports[i].perturbation == attack.reports[i].perturbation);
      CHECK(back.reports[i].predictions_after == attack.reports[i].predictions_after);
      CHECK(back.reports[i].collision_cell == attack.reports[i].collision_cell);
      collided += back.reports[i].collided;
    }
    CHECK(back.summary.attack.cr == doctest::Approx(100.0 * collided / back.reports.size()));
    CHECK(back.summary.attack.cr == attack.summary.cr);
    CHECK(back.summary.accuracy->ade == summary.accuracy->ade);
    CHECK(report_text(attack.reports, summary) == report_text(back.reports, back.summary));
    CHECK(summary_table(summary).find("CR") != std::string::npos);

    emit_report({}, make_report_summary({}, {}), path.string());
    const auto empty = read_report(path.string());
    CHECK(empty.reports.empty());
    CHECK(empty.summary.attack.instances == 0);
    std::filesystem::remove(path);
  }

  TEST_CASE("plot marks the collision") {
    const Scene s = linear_scene({{0, 0}, {0, 1}}, {{0.4, 0}, {0.4, 0}});
    const auto r = run_attack(s, ConstantVelocityPredictor(), AttackConfig{});
    REQUIRE(r.collision_cell);
    const auto svg = plot_svg(s, r);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("class=\"perturbed\"") != std::string::npos);
    CHECK(svg.find("data-timestep=\"" + std::to_string(r.collision_cell->timestep) + "\"") != std::string::npos);

    const auto calm = run_attack(s, ConstantVelocityPredictor(), [] {
      AttackConfig c;
      c.epsilon = 0.0;
      c.max_iters = 1;
      return c;
    }());
    CHECK(plot_svg(s, calm).find("collision-marker") == std::string::npos);
  }
}
