#include <doctest.h>

#include <algorithm>
#include <limits>

#include "sattack/core/error.hpp"
#include "sattack/core/geometry.hpp"
#include "sattack/core/metrics.hpp"
#include "support.hpp"

using namespace sattack;
using namespace sattack::testing;

namespace {

PredictionSet constant_paths(std::vector<Point> where, std::size_t t_pred = 12) {
  PredictionSet p;
  for (Point q : where) p.trajectories.emplace_back(t_pred, q);
  return p;
}

DistanceMatrix grid(std::size_t rows, std::size_t cols, std::vector<double> v) {
  std::vector<std::size_t> order(rows);
  for (std::size_t j = 0; j < rows; ++j) order[j] = j + 1;
  return DistanceMatrix(rows, cols, std::move(v), std::move(order));
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("distance matrix on simple layouts") {
    auto d = distance_matrix(constant_paths({{0, 0}, {3, 4}}), 0);
    CHECK(d.rows() == 1);
    CHECK(d.cols() == 12);
    for (double v : d.values()) CHECK(v == 5.0);

    d = distance_matrix(constant_paths({{1, 2}, {1, 2}}), 1);
    for (double v : d.values()) CHECK(v == 0.0);

    PredictionSet lines;
    lines.trajectories.resize(2);
    for (int t = 1; t <= 12; ++t) {
      lines.trajectories[0].push_back({double(t), 0});
      lines.trajectories[1].push_back({double(t), 1});
    }
    d = distance_matrix(lines, 0);
    for (double v : d.values()) CHECK(v == doctest::Approx(1.0));
  }

  TEST_CASE("distance matrix keeps neighbor order and rejects lone agents") {
    const auto d = distance_matrix(constant_paths({{0, 0}, {1, 0}, {2, 0}, {3, 0}}), 2);
    CHECK(d.neighbor_order() == std::vector<std::size_t>{0, 1, 3});
    CHECK(d(0, 0) == 2.0);
    CHECK(d(2, 5) == 1.0);
    CHECK_THROWS_AS(distance_matrix(constant_paths({{0, 0}}), 0), Error);
    try {
      distance_matrix(constant_paths({{0, 0}}), 0);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::no_neighbors);
    }
  }

  TEST_CASE("collision threshold is strict") {
    CHECK(check_collision(grid(1, 2, {0.19, 1.0}), 0.2).has_value());
    CHECK_FALSE(check_collision(grid(1, 2, {0.20, 1.0}), 0.2).has_value());
    CHECK_FALSE(check_collision(grid(2, 2, {5, 5, 5, 5}), 0.2).has_value());
  }

  TEST_CASE("collision ties go to the lowest row then timestep") {
    const auto cell = check_collision(grid(3, 3, {1, 1, 1, 1, 0.1, 0.1, 0.1, 1, 1}), 0.2);
    REQUIRE(cell);
    CHECK(cell->row == 1);
    CHECK(cell->timestep == 1);
    CHECK(cell->neighbor == 2);
  }

  TEST_CASE("collision check agrees with a brute-force scan") {
    Rng rng(17);
    for (int trial = 0; trial < 2000; ++trial) {
      const std::size_t rows = 1 + rng() % 4, cols = 1 + rng() % 12;
      std::vector<double> v(rows * cols);
      // Coarse values so exact ties are common.
      for (double& x : v) x = 0.05 * static_cast<double>(rng() % 10);
      const double gamma = 0.05 * static_cast<double>(rng() % 8);
      const auto got = check_collision(grid(rows, cols, v), gamma);

      std::optional<std::pair<std::size_t, std::size_t>> want;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < rows; ++j) {
        for (std::size_t t = 0; t < cols; ++t) {
          if (v[j * cols + t] < best) {
            best = v[j * cols + t];
            want = {j, t};
          }
        }
      }
      if (!(best < gamma)) want.reset();
      REQUIRE(got.has_value() == want.has_value());
      if (got) {
        CHECK(got->row == want->first);
        CHECK(got->timestep == want->second);
      }
    }
  }

  TEST_CASE("projection examples") {
    auto r = project_perturbation(Perturbation({{0.3, 0.4}}), 0.2);
    CHECK(r[0].x == doctest::Approx(0.12));
    CHECK(r[0].y == doctest::Approx(0.16));
    CHECK(project_perturbation(Perturbation({{0.1, 0.0}}), 0.2) == Perturbation({{0.1, 0.0}}));
    CHECK(project_perturbation(Perturbation::zeros(9), 0.2) == Perturbation::zeros(9));
    CHECK(project_perturbation(Perturbation({{0.3, -0.1}}), 0.0) == Perturbation({{0.0, 0.0}}));
  }

  TEST_CASE("projection bound, inside rows untouched, idempotence") {
    Rng rng(3);
    for (int trial = 0; trial < 2000; ++trial) {
      const double eps = uniform(rng, 0.001, 1.0);
      const auto r = random_perturbation(rng, 9, 2.0 * eps);
      const auto p = project_perturbation(r, eps);
      CHECK(p.max_row_norm() <= eps + 1e-12);
      for (std::size_t t = 0; t < r.size(); ++t) {
        if (r.row_norm(t) <= eps) CHECK(p[t] == r[t]);
      }
      CHECK(project_perturbation(p, eps) == p);
    }
  }

  TEST_CASE("apply perturbation") {
    const Scene s = linear_scene({{0, 0}, {0, 2}}, {{0.4, 0}, {0.4, 0}});
    CHECK(apply_perturbation(s, Perturbation::zeros(9)) == s);

    Perturbation shift(std::vector<Point>(9, Point{0.05, 0.0}));
    const Scene moved = apply_perturbation(s, shift);
    for (std::size_t t = 0; t < 9; ++t) {
      CHECK(moved.agents[0].observation[t].x == s.agents[0].observation[t].x + 0.05);
      CHECK(moved.agents[0].observation[t].y == s.agents[0].observation[t].y);
    }
    CHECK(moved.agents[1] == s.agents[1]);
    CHECK(moved.agents[0].future == s.agents[0].future);
    CHECK_THROWS_AS(apply_perturbation(s, Perturbation::zeros(8)), Error);
  }

  TEST_CASE("applying -R restores the scene exactly") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      Scene s = random_scene(rng, 3);
      s.candidate_index = rng() % 3;
      // Dyadic offsets and coordinates keep the round trip exact.
      Perturbation r = Perturbation::zeros(9);
      for (auto& p : r.rows()) p = Point{double(rng() % 64) / 512.0, -double(rng() % 64) / 512.0};
      for (auto& a : s.agents) {
        for (auto& p : a.observation) p = Point{std::round(p.x * 1024) / 1024, std::round(p.y * 1024) / 1024};
      }
      CHECK(apply_perturbation(apply_perturbation(s, r), -r) == s);
    }
  }

  TEST_CASE("collision rate") {
    std::vector<AttackReport> reports(10);
    for (int i = 0; i < 4; ++i) reports[i].collided = true;
    CHECK(metric_cr(reports) == 40.0);
    std::rotate(reports.begin(), reports.begin() + 3, reports.end());
    CHECK(metric_cr(reports) == 40.0);
    for (auto& r : reports) r.collided = false;
    CHECK(metric_cr(reports) == 0.0);
    CHECK_THROWS_AS(metric_cr(std::span<const AttackReport>()), Error);
  }

  TEST_CASE("p-avg") {
    CHECK(metric_pavg(Perturbation(std::vector<Point>(9, Point{0.03, 0.04}))) == doctest::Approx(0.05));
    CHECK(metric_pavg(Perturbation::zeros(9)) == 0.0);
    Perturbation one = Perturbation::zeros(9);
    one[4] = {0.2, 0.0};
    CHECK(metric_pavg(one) == doctest::Approx(0.2 / 9));

    Rng rng(8);
    auto r = random_perturbation(rng, 9, 0.2);
    const double before = metric_pavg(r);
    std::reverse(r.rows().begin(), r.rows().end());
    CHECK(metric_pavg(r) == doctest::Approx(before).epsilon(1e-14));
  }

  TEST_CASE("ADE and FDE") {
    const Scene s = linear_scene({{0, 0}, {0, 3}}, {{0.4, 0}, {0.4, 0}});
    PredictionSet exact;
    for (const auto& a : s.agents) exact.trajectories.push_back(*a.future);
    auto e = metric_ade_fde(exact, s);
    CHECK(e.ade == 0.0);
    CHECK(e.fde == 0.0);

    PredictionSet shifted = exact;
    for (auto& t : shifted.trajectories) {
      for (auto& p : t) p = p + Point{0.0, 1.0};
    }
    e = metric_ade_fde(shifted, s);
    CHECK(e.ade == doctest::Approx(1.0));
    CHECK(e.fde == doctest::Approx(1.0));

    Scene single = linear_scene({{0, 0}}, {{0.4, 0}});
    PredictionSet last{{*single.agents[0].future}};
    last.trajectories[0].back().y += 2.0;
    e = metric_ade_fde(last, single);
    CHECK(e.ade == doctest::Approx(2.0 / 12));
    CHECK(e.fde == doctest::Approx(2.0));

    PredictionSet one_off = exact;
    one_off.trajectories[1].back().x += 3.0;
    CHECK(metric_ade_fde(one_off, s, AdeScope::candidate_only).fde == 0.0);

    single.agents[0].future.reset();
    CHECK_THROWS_AS(metric_ade_fde(last, single), Error);
  }

  TEST_CASE("scene validation") {
    Scene s = linear_scene({{0, 0}, {0, 2}}, {{0.4, 0}, {0.4, 0}});
    CHECK_NOTHROW(s.validate());
    Scene bad = s;
    bad.candidate_index = 2;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = s;
    bad.agents[1].id = "0";
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = s;
    bad.agents[1].observation.pop_back();
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = s;
    bad.agents[0].observation[3].x = std::nan("");
    CHECK_THROWS_AS(bad.validate(), Error);
  }

  TEST_CASE("attack config validation and hash") {
    AttackConfig cfg;
    CHECK(cfg.epsilon == 0.2);
    CHECK(cfg.gamma == 0.2);
    CHECK(cfg.lambda_r == 0.1);
    CHECK(cfg.lambda_w == 0.5);
    CHECK(cfg.max_iters == 100);
    CHECK_NOTHROW(cfg.validate());
    const std::string h = cfg.hash();
    CHECK(h == AttackConfig{}.hash());

    auto bad = cfg;
    bad.max_iters = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.gamma = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.lambda_w = -1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.step_size_r = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.epsilon = -0.1;
    CHECK_THROWS_AS(bad.validate(), Error);

    auto other = cfg;
    other.lambda_r = 0.2;
    CHECK(other.hash() != h);
    CHECK(parse_attack_mode("soft") == AttackMode::soft);
    CHECK_THROWS_AS(parse_attack_mode("medium"), Error);
  }

  TEST_CASE("neighbor pair distance") {
    CHECK_FALSE(min_neighbor_pair_distance(constant_paths({{0, 0}, {1, 0}}), 0));
    const auto d = min_neighbor_pair_distance(constant_paths({{0, 0}, {5, 0}, {5, 0.1}}), 0);
    REQUIRE(d);
    CHECK(*d == doctest::Approx(0.1));
  }
}
