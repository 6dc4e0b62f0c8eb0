#include "sattack/attack/archive.hpp"

#include <fstream>

#include <json.hpp>

#include "sattack/core/error.hpp"

namespace sattack {

using nlohmann::ordered_json;

ArchiveRecord to_archive_record(const AttackReport& report, const std::string& config_hash) {
  ArchiveRecord r;
  r.scene_id = report.scene_id;
  r.candidate_id = report.candidate_id;
  r.candidate_index = report.candidate_index;
  r.mode = report.mode;
  r.config_hash = config_hash;
  r.perturbation = report.perturbation;
  r.collided = report.collided;
  r.collision_cell = report.collision_cell;
  r.p_avg = report.p_avg;
  return r;
}

std::string archive_line(const ArchiveRecord& record) {
  ordered_json j;
  j["scene_id"] = record.scene_id;
  j["candidate_id"] = record.candidate_id;
  j["candidate_index"] = record.candidate_index;
  j["mode"] = std::string(to_string(record.mode));
  j["cfg_hash"] = record.config_hash;
  auto rows = ordered_json::array();
  for (const Point& p : record.perturbation.rows()) rows.push_back({p.x, p.y});
  j["R"] = std::move(rows);
  j["collided"] = record.collided;
  if (record.collision_cell) {
    j["collision_cell"] = {{"row", record.collision_cell->row},
                           {"neighbor", record.collision_cell->neighbor},
                           {"timestep", record.collision_cell->timestep}};
  } else {
    j["collision_cell"] = nullptr;
  }
  j["p_avg"] = record.p_avg;
  return j.dump();
}

ArchiveRecord parse_archive_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    ArchiveRecord r;
    r.scene_id = j.at("scene_id").get<std::string>();
    r.candidate_id = j.at("candidate_id").get<std::string>();
    r.candidate_index = j.at("candidate_index").get<std::size_t>();
    r.mode = parse_attack_mode(j.at("mode").get<std::string>());
    r.config_hash = j.at("cfg_hash").get<std::string>();
    std::vector<Point> rows;
    for (const auto& row : j.at("R")) rows.push_back(Point{row.at(0).get<double>(), row.at(1).get<double>()});
    r.perturbation = Perturbation(std::move(rows));
    r.collided = j.at("collided").get<bool>();
    if (!j.at("collision_cell").is_null()) {
      const auto& c = j["collision_cell"];
      r.collision_cell = CollisionCell{c.at("row").get<std::size_t>(), c.at("neighbor").get<std::size_t>(),
                                       c.at("timestep").get<std::size_t>()};
    }
    r.p_avg = j.at("p_avg").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("archive record: ") + e.what());
  }
}

void write_archive(const std::string& path, std::span<const ArchiveRecord> records) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write archive '" + path + "'");
  for (const auto& r : records) out << archive_line(r) << "\n";
  if (!out) throw Error(ErrorCode::io, "failed writing archive '" + path + "'");
}

std::vector<ArchiveRecord> read_archive(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read archive '" + path + "'");
  std::vector<ArchiveRecord> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      out.push_back(parse_archive_line(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::parse, path + ":" + std::to_string(number) + ": " + e.detail());
    }
  }
  return out;
}

}  // namespace sattack
