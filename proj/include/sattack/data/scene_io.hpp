#pragma once

#include <span>
#include <string>
#include <vector>

#include "sattack/core/types.hpp"

namespace sattack {

/// One scene per line: {"scene_id", "agents": [{"id", "obs", "future"}],
/// "candidate_index"}. "future" may be null or absent; "candidate_index"
/// defaults to 0.
std::string scene_line(const Scene& scene);
Scene parse_scene_line(const std::string& line);

void write_scenes(const std::string& path, std::span<const Scene> scenes);
/// Throws Error(parse) with the offending line number.
std::vector<Scene> read_scenes(const std::string& path);

}  // namespace sattack
