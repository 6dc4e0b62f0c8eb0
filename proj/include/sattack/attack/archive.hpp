#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sattack/core/types.hpp"

namespace sattack {

/// One attack instance as stored for transfer experiments.
struct ArchiveRecord {
  std::string scene_id;
  std::string candidate_id;
  std::size_t candidate_index = 0;
  AttackMode mode = AttackMode::soft;
  std::string config_hash;
  Perturbation perturbation;
  bool collided = false;
  std::optional<CollisionCell> collision_cell;
  double p_avg = 0.0;

  friend bool operator==(const ArchiveRecord&, const ArchiveRecord&) = default;
};

ArchiveRecord to_archive_record(const AttackReport& report, const std::string& config_hash);

std::string archive_line(const ArchiveRecord& record);
ArchiveRecord parse_archive_line(const std::string& line);

/// Line-delimited JSON, one record per line.
void write_archive(const std::string& path, std::span<const ArchiveRecord> records);
std::vector<ArchiveRecord> read_archive(const std::string& path);

}  // namespace sattack
