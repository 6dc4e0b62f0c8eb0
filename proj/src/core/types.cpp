#include "sattack/core/types.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "sattack/core/error.hpp"

namespace sattack {

namespace {

bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

bool all_finite(const Trajectory& trajectory) {
  return std::all_of(trajectory.begin(), trajectory.end(), finite);
}

}  // namespace

std::size_t Scene::t_pred() const {
  for (const auto& agent : agents) {
    if (agent.future) return agent.future->size();
  }
  return 0;
}

bool Scene::has_futures() const {
  return !agents.empty() &&
         std::all_of(agents.begin(), agents.end(), [](const Agent& a) { return a.future.has_value(); });
}

void Scene::validate() const {
  if (agents.empty()) throw Error(ErrorCode::shape, "scene '" + id + "' has no agents");
  if (candidate_index >= agents.size()) {
    throw Error(ErrorCode::shape, "scene '" + id + "': candidate index out of range");
  }
  const std::size_t obs = t_obs();
  const std::size_t pred = t_pred();
  if (obs == 0) throw Error(ErrorCode::shape, "scene '" + id + "': empty observation");
  std::set<std::string> ids;
  for (const auto& agent : agents) {
    if (!ids.insert(agent.id).second) {
      throw Error(ErrorCode::shape, "scene '" + id + "': duplicate agent id '" + agent.id + "'");
    }
    if (agent.observation.size() != obs) {
      throw Error(ErrorCode::shape, "scene '" + id + "': observation lengths differ");
    }
    if (!all_finite(agent.observation)) {
      throw Error(ErrorCode::shape, "scene '" + id + "': non-finite observation");
    }
    if (agent.future) {
      if (agent.future->size() != pred || pred == 0) {
        throw Error(ErrorCode::shape, "scene '" + id + "': future lengths differ");
      }
      if (!all_finite(*agent.future)) throw Error(ErrorCode::shape, "scene '" + id + "': non-finite future");
    }
  }
}

double Perturbation::max_row_norm() const {
  double best = 0.0;
  for (const auto& row : rows_) best = std::max(best, norm(row));
  return best;
}

double Perturbation::frobenius_norm() const {
  double sum = 0.0;
  for (const auto& row : rows_) sum += row.x * row.x + row.y * row.y;
  return std::sqrt(sum);
}

Perturbation Perturbation::operator-() const {
  std::vector<Point> out(rows_.size());
  std::transform(rows_.begin(), rows_.end(), out.begin(), [](Point p) { return Point{-p.x, -p.y}; });
  return Perturbation(std::move(out));
}

bool PredictionSet::all_finite() const {
  return std::all_of(trajectories.begin(), trajectories.end(),
                     [](const Trajectory& t) { return sattack::all_finite(t); });
}

DistanceMatrix::DistanceMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                               std::vector<std::size_t> neighbor_order)
    : rows_(rows), cols_(cols), values_(std::move(values)), neighbor_order_(std::move(neighbor_order)) {
  if (values_.size() != rows_ * cols_ || neighbor_order_.size() != rows_) {
    throw Error(ErrorCode::shape, "distance matrix dimensions do not match its data");
  }
}

std::string_view to_string(AttackMode mode) {
  switch (mode) {
    case AttackMode::none: return "none";
    case AttackMode::hard: return "hard";
    case AttackMode::soft: return "soft";
    case AttackMode::random: return "random";
  }
  return "unknown";
}

AttackMode parse_attack_mode(std::string_view text) {
  if (text == "none") return AttackMode::none;
  if (text == "hard") return AttackMode::hard;
  if (text == "soft") return AttackMode::soft;
  if (text == "random") return AttackMode::random;
  throw Error(ErrorCode::invalid_config, "unknown attack mode '" + std::string(text) + "'");
}

void AttackConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::invalid_config, what);
  };
  require(std::isfinite(epsilon) && epsilon >= 0.0, "epsilon must be >= 0");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be > 0");
  require(max_iters >= 1, "max_iters must be >= 1");
  require(std::isfinite(step_size_r) && step_size_r > 0.0, "step_size_r must be > 0");
  require(std::isfinite(step_size_w) && step_size_w > 0.0, "step_size_w must be > 0");
  require(std::isfinite(lambda_r) && lambda_r >= 0.0, "lambda_r must be >= 0");
  require(std::isfinite(lambda_w) && lambda_w >= 0.0, "lambda_w must be >= 0");
}

std::string AttackConfig::hash() const {
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), "%.17g|%.17g|%.17g|%.17g|%d|%.17g|%.17g|%s|%d|%d|%llu", epsilon, gamma,
                lambda_r, lambda_w, max_iters, step_size_r, step_size_w, std::string(to_string(mode)).c_str(),
                freeze_neighbors ? 1 : 0, alternating ? 1 : 0, static_cast<unsigned long long>(seed));
  // FNV-1a, 64 bit.
  std::uint64_t h = 14695981039346656037ull;
  for (const char* c = buffer; *c; ++c) {
    h ^= static_cast<unsigned char>(*c);
    h *= 1099511628211ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace sattack
