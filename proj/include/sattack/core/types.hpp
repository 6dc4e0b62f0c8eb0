#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sattack {

/// A 2D position or offset in meters.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// Ordered positions of one agent, one per frame.
using Trajectory = std::vector<Point>;

struct Agent {
  std::string id;
  Trajectory observation;
  std::optional<Trajectory> future;

  friend bool operator==(const Agent&, const Agent&) = default;
};

/// Observed (and optionally ground-truth future) trajectories of every agent
/// sharing a time window. The candidate is the agent that receives the
/// perturbation; it is chosen per attack instance.
struct Scene {
  std::string id;
  std::vector<Agent> agents;
  std::size_t candidate_index = 0;

  std::size_t size() const { return agents.size(); }
  std::size_t t_obs() const { return agents.empty() ? 0 : agents.front().observation.size(); }
  /// Length of the ground-truth futures, 0 when none are present.
  std::size_t t_pred() const;
  bool has_futures() const;

  /// Throws Error(shape) when any Scene invariant is violated.
  void validate() const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Additive offset applied to the candidate observation, one row per
/// observed timestep.
class Perturbation {
 public:
  Perturbation() = default;
  explicit Perturbation(std::vector<Point> rows) : rows_(std::move(rows)) {}

  static Perturbation zeros(std::size_t t_obs) { return Perturbation(std::vector<Point>(t_obs)); }

  std::size_t size() const { return rows_.size(); }
  const std::vector<Point>& rows() const { return rows_; }
  std::vector<Point>& rows() { return rows_; }
  Point operator[](std::size_t t) const { return rows_[t]; }
  Point& operator[](std::size_t t) { return rows_[t]; }

  double row_norm(std::size_t t) const { return norm(rows_[t]); }
  /// Largest per-timestep Euclidean norm (the ‖R‖_max bound).
  double max_row_norm() const;
  double frobenius_norm() const;

  Perturbation operator-() const;

  friend bool operator==(const Perturbation&, const Perturbation&) = default;

 private:
  std::vector<Point> rows_;
};

/// Predicted futures for every agent of a scene, in scene order.
struct PredictionSet {
  std::vector<Trajectory> trajectories;

  std::size_t size() const { return trajectories.size(); }
  std::size_t t_pred() const { return trajectories.empty() ? 0 : trajectories.front().size(); }
  bool all_finite() const;

  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;
};

/// Candidate-to-neighbor distances over the prediction horizon. Row j holds
/// the neighbor scene agent neighbor_order[j].
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                 std::vector<std::size_t> neighbor_order);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t j, std::size_t t) const { return values_[j * cols_ + t]; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::size_t>& neighbor_order() const { return neighbor_order_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<std::size_t> neighbor_order_;
};

/// A (neighbor, prediction timestep) cell of the distance matrix.
struct CollisionCell {
  std::size_t row = 0;       ///< Row in the distance matrix.
  std::size_t neighbor = 0;  ///< Scene index of the neighbor agent.
  std::size_t timestep = 0;  ///< Prediction timestep, 0-based.

  friend bool operator==(const CollisionCell&, const CollisionCell&) = default;
};

enum class AttackMode { none, hard, soft, random };

std::string_view to_string(AttackMode mode);
AttackMode parse_attack_mode(std::string_view text);

struct AttackConfig {
  double epsilon = 0.2;      ///< Per-timestep row-norm cap (m).
  double gamma = 0.2;        ///< Collision threshold (m).
  double lambda_r = 0.1;
  double lambda_w = 0.5;
  int max_iters = 100;
  double step_size_r = 0.01;  ///< Largest row displacement per step (m).
  double step_size_w = 0.1;
  AttackMode mode = AttackMode::soft;
  bool freeze_neighbors = false;
  /// Soft mode only: update W first, then take the R step with W held at its
  /// new value, instead of one joint step.
  bool alternating = false;
  std::uint64_t seed = 0;  ///< Used by the random-noise baseline.

  /// Throws Error(invalid_config) on any violated invariant.
  void validate() const;
  /// Stable hex digest of every field, recorded in perturbation archives.
  std::string hash() const;
};

struct AttackReport {
  std::string scene_id;
  std::size_t candidate_index = 0;
  std::string candidate_id;
  AttackMode mode = AttackMode::soft;
  bool collided_before = false;
  bool collided = false;
  std::optional<CollisionCell> collision_cell;
  int iterations_used = 0;
  double p_avg = 0.0;
  Perturbation perturbation;
  PredictionSet predictions_before;
  PredictionSet predictions_after;
};

}  // namespace sattack
