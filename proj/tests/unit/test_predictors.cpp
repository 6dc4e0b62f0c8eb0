#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sattack/core/error.hpp"
#include "sattack/core/geometry.hpp"
#include "sattack/core/metrics.hpp"
#include "sattack/data/synthetic.hpp"
#include "sattack/predictors/checkpoint.hpp"
#include "sattack/predictors/constant_velocity.hpp"
#include "sattack/predictors/social_forces.hpp"
#include "sattack/predictors/training.hpp"
#include "support.hpp"

using namespace sattack;
using namespace sattack::testing;

namespace {

double min_pair(const PredictionSet& p) {
  double best = 1e300;
  for (std::size_t t = 0; t < p.t_pred(); ++t) best = std::min(best, distance(p.trajectories[0][t], p.trajectories[1][t]));
  return best;
}

void check_shape(const PredictionSet& p, std::size_t n, std::size_t t_pred) {
  REQUIRE(p.size() == n);
  for (const auto& t : p.trajectories) CHECK(t.size() == t_pred);
  CHECK(p.all_finite());
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("sattack-test-" + name);
}

}  // namespace

TEST_SUITE("predictors") {
  TEST_CASE("constant velocity extrapolates the last displacement") {
    Scene s;
    s.agents.push_back({"a", {{-5, 0}, {0, 0}, {1, 0}}, std::nullopt});
    s.agents.push_back({"b", {{2, 2}, {2, 2}, {2, 2}}, std::nullopt});
    const auto p = ConstantVelocityPredictor().predict(s);
    check_shape(p, 2, 12);
    for (int t = 0; t < 12; ++t) {
      CHECK(p.trajectories[0][t] == Point{2.0 + t, 0});
      CHECK(p.trajectories[1][t] == Point{2, 2});
    }

    Scene short_scene;
    short_scene.agents.push_back({"a", {{0, 0}}, std::nullopt});
    CHECK_THROWS_AS(ConstantVelocityPredictor().predict(short_scene), Error);
  }

  TEST_CASE("constant velocity gradient is (1+t) and -t") {
    const Scene s = linear_scene({{0, 0}}, {{0.4, 0.1}});
    const ConstantVelocityPredictor cv;
    for (std::size_t t = 0; t < 12; ++t) {
      ad::Tape tape;
      auto obs = observation_nodes(tape, s);
      std::vector<ad::Var> leaves;
      for (auto& o : obs) {
        o = tape.leaf(o.value());
        leaves.push_back(o);
      }
      const auto steps = cv.record(tape, obs);
      const auto g = tape.backward(ad::slice(steps[t], 0, 1, 0, 1));
      const double k = static_cast<double>(t + 1);
      CHECK(g.of(leaves[8])[0] == doctest::Approx(1.0 + k));
      CHECK(g.of(leaves[7])[0] == doctest::Approx(-k));
      CHECK(g.of(leaves[8])[1] == 0.0);
      for (std::size_t j = 0; j < 7; ++j) CHECK(g.of(leaves[j])[0] == 0.0);
    }
  }

  TEST_CASE("pool-lite output shape and degenerate cases") {
    const auto params = PoolLiteParams::initialize(16, 5);
    const PoolLitePredictor model(params);
    Rng rng(6);
    for (std::size_t n : {1u, 2u, 4u}) check_shape(model.predict(random_scene(rng, n)), n, 12);

    PoolLiteParams frozen = params;
    for (auto* slot : {&frozen.tensors[PoolLiteParams::head_w], &frozen.tensors[PoolLiteParams::head_b]}) {
      slot->fill(0.0);
    }
    const Scene s = random_scene(rng, 3);
    const auto p = PoolLitePredictor(frozen).predict(s);
    for (std::size_t i = 0; i < 3; ++i) {
      for (const Point& q : p.trajectories[i]) CHECK(q == s.agents[i].observation.back());
    }
  }

  TEST_CASE("pool-lite is translation equivariant") {
    const PoolLitePredictor model(PoolLiteParams::initialize(32, 8));
    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
      Scene s = random_scene(rng, 3);
      const auto base = model.predict(s);
      for (auto& a : s.agents) {
        for (auto& q : a.observation) q = q + Point{10, -3};
      }
      const auto moved = model.predict(s);
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t t = 0; t < 12; ++t) {
          CHECK(moved.trajectories[i][t].x == doctest::Approx(base.trajectories[i][t].x + 10).epsilon(1e-9));
          CHECK(moved.trajectories[i][t].y == doctest::Approx(base.trajectories[i][t].y - 3).epsilon(1e-9));
        }
      }
    }
  }

  TEST_CASE("pool-lite is invariant to neighbor order") {
    const PoolLitePredictor model(PoolLiteParams::initialize(32, 10));
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
      const Scene s = random_scene(rng, 4);
      Scene shuffled = s;
      std::swap(shuffled.agents[1], shuffled.agents[3]);
      std::swap(shuffled.agents[2], shuffled.agents[3]);
      const auto a = model.predict(s);
      const auto b = model.predict(shuffled);
      // agent 0 stays first; others are permuted 1->3->2->1.
      CHECK(a.trajectories[0] == b.trajectories[0]);
      CHECK(a.trajectories[1] == b.trajectories[2]);
      CHECK(a.trajectories[2] == b.trajectories[3]);
      CHECK(a.trajectories[3] == b.trajectories[1]);
    }
  }

  TEST_CASE("pool-lite observation Jacobian matches finite differences") {
    const PoolLitePredictor model(PoolLiteParams::initialize(32, 12));
    Rng rng(13);
    for (int trial = 0; trial < 5; ++trial) {
      const Scene s = random_scene(rng, 3);
      const ad::Tensor c = random_tensor(rng, 3, 2);
      auto value = [&](const ad::Tensor& last) {
        Scene t = s;
        for (std::size_t i = 0; i < 3; ++i) t.agents[i].observation.back() = {last(i, 0), last(i, 1)};
        const auto p = model.predict(t);
        double v = 0.0;
        for (std::size_t i = 0; i < 3; ++i) v += c(i, 0) * p.trajectories[i][11].x + c(i, 1) * p.trajectories[i][11].y;
        return v;
      };
      ad::Tensor last(3, 2);
      for (std::size_t i = 0; i < 3; ++i) {
        last(i, 0) = s.agents[i].observation.back().x;
        last(i, 1) = s.agents[i].observation.back().y;
      }
      ad::Tape tape;
      auto obs = observation_nodes(tape, s);
      obs.back() = tape.leaf(last);
      const auto steps = model.record(tape, obs);
      const auto loss = ad::sum(ad::mul(steps.back(), tape.constant(c)));
      const auto g = tape.backward(loss).of(obs.back());
      CHECK(relative_error(g, numeric_gradient(value, last)) < 1e-3);
    }
  }

  TEST_CASE("social forces without neighbors continues straight") {
    const Scene s = linear_scene({{0, 0}}, {{0.4, 0}});
    SocialForcesParams params;
    params.desired_speed = 1.0;
    const auto sf = SocialForcesPredictor(params).predict(s);
    const auto cv = ConstantVelocityPredictor().predict(s);
    for (std::size_t t = 0; t < 12; ++t) {
      CHECK(sf.trajectories[0][t].x == doctest::Approx(cv.trajectories[0][t].x).epsilon(1e-6));
      CHECK(std::abs(sf.trajectories[0][t].y) < 1e-6);
    }
  }

  TEST_CASE("social forces keeps head-on walkers apart") {
    // 6 m apart, 1 m/s towards each other, same lane.
    const Scene s = linear_scene({{-3.0 - 8 * 0.4, 0}, {3.0 + 8 * 0.4, 0.05}}, {{0.4, 0}, {-0.4, 0}});
    const auto sf = SocialForcesPredictor().predict(s);
    const auto cv = ConstantVelocityPredictor().predict(s);
    CHECK(min_pair(sf) > 0.2);
    CHECK(min_pair(sf) > min_pair(cv));

    SocialForcesParams off;
    off.repulsion_strength = 0.0;
    const auto straight = SocialForcesPredictor(off).predict(s);
    for (std::size_t t = 0; t < 12; ++t) {
      CHECK(straight.trajectories[0][t].y == 0.0);
      CHECK(straight.trajectories[1][t].y == 0.05);
    }
  }

  TEST_CASE("social forces separates near head-on walkers more than constant velocity") {
    SyntheticOptions options;
    options.lateral_offset = 0.1;
    const auto scenes = generate_synthetic(SyntheticTemplate::head_on, 0.0, 50, 21, options);
    const SocialForcesPredictor sf;
    const ConstantVelocityPredictor cv;
    for (const Scene& s : scenes) CHECK(min_pair(sf.predict(s)) > min_pair(cv.predict(s)));
  }

  TEST_CASE("social forces parameter file round trip") {
    SocialForcesParams p;
    p.repulsion_strength = 3.5;
    p.desired_speed = 1.2;
    const auto path = temp_file("sf.json");
    p.save(path.string());
    const auto q = SocialForcesParams::load(path.string());
    CHECK(q.repulsion_strength == 3.5);
    CHECK(q.desired_speed == 1.2);
    std::filesystem::remove(path);

    SocialForcesParams bad;
    bad.relaxation_time = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
  }

  TEST_CASE("training edge cases") {
    const auto scenes = generate_synthetic(SyntheticTemplate::parallel, 0.0, 8, 1);
    TrainingConfig cfg;
    cfg.hidden = 8;
    cfg.epochs = 0;
    const auto init = PoolLiteParams::initialize(8, cfg.seed);
    auto r = train_pool_lite(scenes, cfg);
    for (std::size_t s = 0; s < PoolLiteParams::slot_count; ++s) CHECK(r.params.tensors[s].storage() == init.tensors[s].storage());
    CHECK(r.loss_curve.empty());

    cfg.epochs = 3;
    cfg.learning_rate = 0.0;
    r = train_pool_lite(scenes, cfg);
    for (std::size_t s = 0; s < PoolLiteParams::slot_count; ++s) CHECK(r.params.tensors[s].storage() == init.tensors[s].storage());

    CHECK_THROWS_AS(train_pool_lite({}, cfg), Error);
    auto missing = scenes;
    missing[3].agents[0].future.reset();
    CHECK_THROWS_AS(train_pool_lite(missing, cfg), Error);
  }

  TEST_CASE("batch gradient matches finite differences") {
    const auto scenes = generate_synthetic(SyntheticTemplate::mixed, 0.01, 4, 2);
    const auto params = PoolLiteParams::initialize(8, 3);
    const auto g = pool_lite_batch_gradient(params, scenes, Execution::serial);
    for (auto slot : {PoolLiteParams::enc_wh, PoolLiteParams::emb_w1, PoolLiteParams::head_w}) {
      auto value = [&](const ad::Tensor& t) {
        PoolLiteParams p = params;
        p.tensors[slot] = t;
        return pool_lite_batch_gradient(p, scenes, Execution::serial).loss;
      };
      CHECK(relative_error(g.grads[slot], numeric_gradient(value, params.tensors[slot])) < 1e-4);
    }
  }

  TEST_CASE("serial and parallel training agree bitwise") {
    const auto scenes = generate_synthetic(SyntheticTemplate::mixed, 0.01, 24, 4);
    TrainingConfig cfg;
    cfg.hidden = 8;
    cfg.epochs = 2;
    cfg.batch_size = 8;
    const auto a = train_pool_lite(scenes, cfg, std::nullopt, Execution::serial);
    const auto b = train_pool_lite(scenes, cfg, std::nullopt, Execution::parallel);
    CHECK(a.loss_curve == b.loss_curve);
    for (std::size_t s = 0; s < PoolLiteParams::slot_count; ++s) CHECK(a.params.tensors[s].storage() == b.params.tensors[s].storage());
  }

  TEST_CASE("training fits constant-velocity walkers") {
    const auto train = generate_synthetic(SyntheticTemplate::mixed, 0.0, 200, 31);
    const auto held_out = generate_synthetic(SyntheticTemplate::mixed, 0.0, 40, 32);
    TrainingConfig cfg;
    cfg.epochs = 60;
    cfg.seed = 1;
    const auto result = train_pool_lite(train, cfg);
    REQUIRE(result.loss_curve.size() == 60);
    // Smoothed loss is non-increasing within 5%.
    std::vector<double> smooth;
    for (std::size_t e = 4; e < result.loss_curve.size(); ++e) {
      double m = 0.0;
      for (std::size_t k = e - 4; k <= e; ++k) m += result.loss_curve[k] / 5.0;
      smooth.push_back(m);
    }
    for (std::size_t e = 1; e < smooth.size(); ++e) CHECK(smooth[e] <= smooth[e - 1] * 1.05);

    const PoolLitePredictor model(result.params);
    double ade = 0.0;
    for (const Scene& s : held_out) ade += metric_ade_fde(model.predict(s), s).ade / static_cast<double>(held_out.size());
    CHECK(ade < 0.1);
  }

  TEST_CASE("checkpoint round trip and architecture check") {
    Checkpoint ck{PoolLiteParams::initialize(16, 77), {3.0, 2.0, 1.5}};
    const auto path = temp_file("ckpt.json");
    save_checkpoint(path.string(), ck);
    const auto back = load_checkpoint(path.string());
    CHECK(back.params.hidden == 16);
    CHECK(back.params.seed == 77);
    CHECK(back.loss_curve == ck.loss_curve);
    for (std::size_t s = 0; s < PoolLiteParams::slot_count; ++s) CHECK(back.params.tensors[s].storage() == ck.params.tensors[s].storage());

    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    const auto pos = text.find(ck.params.architecture_hash());
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 4, "ffff");
    std::ofstream(path) << text;
    try {
      load_checkpoint(path.string());
      FAIL("expected a mismatch error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::mismatch);
    }
    std::ofstream(path) << "{not json";
    CHECK_THROWS_AS(load_checkpoint(path.string()), Error);
    std::filesystem::remove(path);
  }
}
