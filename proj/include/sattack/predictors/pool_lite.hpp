#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "sattack/predictors/predictor.hpp"

namespace sattack {

/// Weights of the pool-lite interaction predictor.
///
/// Each agent's observed displacement sequence is encoded by a tanh
/// recurrent cell. Decoding is autoregressive: at every step each agent
/// embeds the relative position and relative velocity of every other agent
/// with a two-layer ReLU perceptron, max-pools the embeddings, and feeds
/// [hidden, pooled] through another ReLU layer. A linear head over
/// [features, previous displacement] emits the next displacement, which is
/// integrated to a position and fed back into the recurrent cell.
struct PoolLiteParams {
  enum Slot : std::size_t {
    enc_wx,  // 2×H
    enc_wh,  // H×H
    enc_b,   // 1×H
    emb_w1,  // 4×H
    emb_b1,  // 1×H
    emb_w2,  // H×H
    emb_b2,  // 1×H
    dec_w1,  // 2H×H
    dec_b1,  // 1×H
    head_w,  // (H+2)×2
    head_b,  // 1×2
    slot_count,
  };

  static constexpr std::array<std::string_view, slot_count> names = {
      "enc_wx", "enc_wh", "enc_b", "emb_w1", "emb_b1", "emb_w2", "emb_b2", "dec_w1", "dec_b1", "head_w", "head_b"};

  std::size_t hidden = 32;
  std::uint64_t seed = 0;
  std::array<ad::Tensor, slot_count> tensors;

  /// Uniform in ±1/√fan_in for every weight and bias.
  static PoolLiteParams initialize(std::size_t hidden, std::uint64_t seed);

  /// Expected shape of a slot for this hidden size.
  std::array<std::size_t, 2> expected_shape(Slot slot) const;
  /// Human-readable layout descriptor; its hash guards checkpoints.
  std::string architecture() const;
  std::string architecture_hash() const;
  /// Throws Error(shape) on inconsistent shapes or non-finite entries.
  void validate() const;
  std::size_t parameter_count() const;

  friend bool operator==(const PoolLiteParams&, const PoolLiteParams&) = default;
};

/// Records the pool-lite forward pass. `params` holds one node per slot.
std::vector<ad::Var> pool_lite_forward(ad::Tape& tape, std::span<const ad::Var> positions,
                                       std::span<const ad::Var> params, std::size_t hidden, std::size_t t_pred);

class PoolLitePredictor final : public DifferentiablePredictor {
 public:
  explicit PoolLitePredictor(PoolLiteParams params, std::size_t t_pred = 12);

  std::string name() const override { return "pool-lite"; }
  std::size_t t_pred() const override { return t_pred_; }
  std::vector<ad::Var> record(ad::Tape& tape, std::span<const ad::Var> positions) const override;

  const PoolLiteParams& params() const { return *params_; }

 private:
  std::shared_ptr<const PoolLiteParams> params_;
  std::size_t t_pred_;
};

}  // namespace sattack
