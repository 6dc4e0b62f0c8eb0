#include "sattack/predictors/pool_lite.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "sattack/core/error.hpp"

namespace sattack {

using ad::Var;

PoolLiteParams PoolLiteParams::initialize(std::size_t hidden, std::uint64_t seed) {
  if (hidden == 0) throw Error(ErrorCode::invalid_config, "hidden size must be positive");
  PoolLiteParams p;
  p.hidden = hidden;
  p.seed = seed;
  std::mt19937_64 rng(seed);
  // Biases share the fan-in of the weight matrix they accompany.
  const std::array<std::size_t, slot_count> fan_in = {2, hidden, hidden, 4, 4, hidden, hidden,
                                                      2 * hidden, 2 * hidden, hidden + 2, hidden + 2};
  for (std::size_t s = 0; s < slot_count; ++s) {
    const auto shape = p.expected_shape(static_cast<Slot>(s));
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in[s]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    ad::Tensor t(shape[0], shape[1]);
    for (double& v : t.storage()) v = dist(rng);
    p.tensors[s] = std::move(t);
  }
  return p;
}

std::array<std::size_t, 2> PoolLiteParams::expected_shape(Slot slot) const {
  const std::size_t h = hidden;
  switch (slot) {
    case enc_wx: return {2, h};
    case enc_wh: return {h, h};
    case enc_b: return {1, h};
    case emb_w1: return {4, h};
    case emb_b1: return {1, h};
    case emb_w2: return {h, h};
    case emb_b2: return {1, h};
    case dec_w1: return {2 * h, h};
    case dec_b1: return {1, h};
    case head_w: return {h + 2, 2};
    case head_b: return {1, 2};
    case slot_count: break;
  }
  throw Error(ErrorCode::shape, "unknown parameter slot");
}

std::string PoolLiteParams::architecture() const {
  std::string out = "pool-lite/v1/tanh-rnn+relu-mlp-maxpool+relu-mlp-head/H=" + std::to_string(hidden);
  for (std::size_t s = 0; s < slot_count; ++s) {
    const auto shape = expected_shape(static_cast<Slot>(s));
    out += "/" + std::string(names[s]) + ":" + std::to_string(shape[0]) + "x" + std::to_string(shape[1]);
  }
  return out;
}

std::string PoolLiteParams::architecture_hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : architecture()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

void PoolLiteParams::validate() const {
  for (std::size_t s = 0; s < slot_count; ++s) {
    const auto shape = expected_shape(static_cast<Slot>(s));
    if (tensors[s].shape() != shape) {
      throw Error(ErrorCode::shape, "parameter " + std::string(names[s]) + " has the wrong shape");
    }
    if (!tensors[s].all_finite()) {
      throw Error(ErrorCode::numeric, "parameter " + std::string(names[s]) + " is not finite");
    }
  }
}

std::size_t PoolLiteParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.size();
  return n;
}

std::vector<Var> pool_lite_forward(ad::Tape& tape, std::span<const Var> positions, std::span<const Var> params,
                                   std::size_t hidden, std::size_t t_pred) {
  using P = PoolLiteParams;
  if (params.size() != P::slot_count) throw Error(ErrorCode::shape, "pool-lite expects 11 parameter nodes");
  if (positions.size() < 2) throw Error(ErrorCode::insufficient_history, "pool-lite needs T_obs >= 2");
  const std::size_t n = positions.front().rows();
  for (const Var& p : positions) {
    if (p.rows() != n || p.cols() != 2) throw Error(ErrorCode::shape, "positions must be n x 2 per timestep");
  }

  auto cell = [&](Var velocity, Var h) {
    return ad::tanh(ad::add(ad::add(ad::matmul(velocity, params[P::enc_wx]), ad::matmul(h, params[P::enc_wh])),
                            params[P::enc_b]));
  };

  Var h = tape.constant(ad::Tensor(n, hidden));
  Var velocity;
  for (std::size_t t = 1; t < positions.size(); ++t) {
    velocity = ad::sub(positions[t], positions[t - 1]);
    h = cell(velocity, h);
  }

  std::vector<std::size_t> self_rows;
  std::vector<std::size_t> other_rows;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      self_rows.push_back(i);
      other_rows.push_back(j);
    }
  }
  const Var empty_pool = tape.constant(ad::Tensor(n, hidden));

  Var position = positions.back();
  std::vector<Var> out;
  out.reserve(t_pred);
  for (std::size_t step = 0; step < t_pred; ++step) {
    Var pooled = empty_pool;
    if (n > 1) {
      const Var rel_pos = ad::sub(ad::gather_rows(position, other_rows), ad::gather_rows(position, self_rows));
      const Var rel_vel = ad::sub(ad::gather_rows(velocity, other_rows), ad::gather_rows(velocity, self_rows));
      const std::array<Var, 2> pair_parts = {rel_pos, rel_vel};
      Var e = ad::concat(pair_parts, 1);
      e = ad::relu(ad::add(ad::matmul(e, params[P::emb_w1]), params[P::emb_b1]));
      e = ad::relu(ad::add(ad::matmul(e, params[P::emb_w2]), params[P::emb_b2]));
      pooled = ad::segment_max(e, n - 1);
    }
    const std::array<Var, 2> dec_parts = {h, pooled};
    const Var features =
        ad::relu(ad::add(ad::matmul(ad::concat(dec_parts, 1), params[P::dec_w1]), params[P::dec_b1]));
    const std::array<Var, 2> head_parts = {features, velocity};
    velocity = ad::add(ad::matmul(ad::concat(head_parts, 1), params[P::head_w]), params[P::head_b]);
    position = ad::add(position, velocity);
    out.push_back(position);
    if (step + 1 < t_pred) h = cell(velocity, h);
  }
  return out;
}

PoolLitePredictor::PoolLitePredictor(PoolLiteParams params, std::size_t t_pred)
    : params_(std::make_shared<const PoolLiteParams>(std::move(params))), t_pred_(t_pred) {
  params_->validate();
}

std::vector<Var> PoolLitePredictor::record(ad::Tape& tape, std::span<const Var> positions) const {
  std::array<Var, PoolLiteParams::slot_count> nodes;
  for (std::size_t s = 0; s < PoolLiteParams::slot_count; ++s) nodes[s] = tape.constant(params_->tensors[s]);
  return pool_lite_forward(tape, positions, nodes, params_->hidden, t_pred_);
}

}  // namespace sattack
