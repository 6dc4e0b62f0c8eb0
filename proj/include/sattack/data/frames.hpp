#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sattack/core/types.hpp"

namespace sattack {

/// One row of an ETH/UCY-style annotation file.
struct FrameRecord {
  long long frame_id = 0;
  std::string agent_id;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct FrameParseResult {
  std::vector<FrameRecord> records;
  std::vector<ParseIssue> issues;  ///< Malformed lines skipped in lenient mode.
};

/// Parses `frame_id, agent_id, x, y` rows separated by tabs, commas or
/// spaces. Blank lines and lines starting with '#' are skipped. In strict
/// mode any malformed line (or a repeated (frame, agent) pair) throws
/// Error(parse) naming every offending line number.
FrameParseResult parse_frames(std::istream& in, bool strict = true);
FrameParseResult parse_frames_file(const std::string& path, bool strict = true);

/// Tab-separated, shortest round-trip decimal formatting.
std::string serialize_frames(std::span<const FrameRecord> records);

struct SceneWindowConfig {
  std::size_t t_obs = 9;
  std::size_t t_pred = 12;
  std::size_t stride = 1;         ///< Frames between window starts.
  std::size_t min_neighbors = 0;  ///< Scenes need at least 1 + min_neighbors agents.
  double frame_rate = 2.5;        ///< Metadata only.
  std::string id_prefix = "scene";

  void validate() const;
};

/// Sliding windows of t_obs + t_pred consecutive distinct frames. An agent
/// belongs to a window only if it appears in every frame of it. Agents are
/// ordered by id (numerically when both ids are integers), so the output
/// does not depend on record order.
std::vector<Scene> build_scenes(std::span<const FrameRecord> records, const SceneWindowConfig& config);

/// Formats a double so that parsing it back yields the same bits.
std::string format_double(double value);

}  // namespace sattack
