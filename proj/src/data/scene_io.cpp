#include "sattack/data/scene_io.hpp"

#include <fstream>

#include <json.hpp>

#include "sattack/core/error.hpp"

namespace sattack {

using nlohmann::ordered_json;

namespace {

ordered_json points_json(const Trajectory& trajectory) {
  auto out = ordered_json::array();
  for (const Point& p : trajectory) out.push_back({p.x, p.y});
  return out;
}

Trajectory points_from(const nlohmann::json& j) {
  Trajectory out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::parse, "points must be [x, y] pairs");
    out.push_back(Point{p.at(0).get<double>(), p.at(1).get<double>()});
  }
  return out;
}

}  // namespace

std::string scene_line(const Scene& scene) {
  ordered_json j;
  j["scene_id"] = scene.id;
  auto agents = ordered_json::array();
  for (const Agent& a : scene.agents) {
    ordered_json aj;
    aj["id"] = a.id;
    aj["obs"] = points_json(a.observation);
    aj["future"] = a.future ? points_json(*a.future) : ordered_json(nullptr);
    agents.push_back(std::move(aj));
  }
  j["agents"] = std::move(agents);
  j["candidate_index"] = scene.candidate_index;
  return j.dump();
}

Scene parse_scene_line(const std::string& line) {
  Scene scene;
  try {
    const auto j = nlohmann::json::parse(line);
    scene.id = j.at("scene_id").get<std::string>();
    for (const auto& aj : j.at("agents")) {
      Agent a;
      a.id = aj.at("id").is_string() ? aj.at("id").get<std::string>() : aj.at("id").dump();
      a.observation = points_from(aj.at("obs"));
      if (aj.contains("future") && !aj.at("future").is_null()) a.future = points_from(aj.at("future"));
      scene.agents.push_back(std::move(a));
    }
    if (j.contains("candidate_index")) scene.candidate_index = j.at("candidate_index").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, e.what());
  }
  scene.validate();
  return scene;
}

void write_scenes(const std::string& path, std::span<const Scene> scenes) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path + "'");
  for (const Scene& s : scenes) out << scene_line(s) << '\n';
  if (!out) throw Error(ErrorCode::io, "write failed for '" + path + "'");
}

std::vector<Scene> read_scenes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read '" + path + "'");
  std::vector<Scene> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_scene_line(line));
    } catch (const Error& e) {
      throw Error(e.code(), path + ":" + std::to_string(number) + ": " + e.detail());
    }
  }
  return out;
}

}  // namespace sattack
