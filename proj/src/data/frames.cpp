#include "sattack/data/frames.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sattack/core/error.hpp"

namespace sattack {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == '\t' || c == ',' || c == ' ' || c == '\r'; };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) {
      // A comma always delimits, so ",," yields an empty field.
      if (line[i] == ',' && i + 1 < line.size() && line[i + 1] == ',') out.emplace_back();
      ++i;
    }
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !is_sep(line[i])) ++i;
    out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size() && std::isfinite(out);
}

bool parse_frame_id(std::string_view text, long long& out) {
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  if (res.ec == std::errc() && res.ptr == text.data() + text.size()) return true;
  // Some releases store frame ids as "780.0".
  double d = 0.0;
  if (!parse_double(text, d) || d != std::floor(d) || std::abs(d) > 9e15) return false;
  out = static_cast<long long>(d);
  return true;
}

bool is_integer(const std::string& s, long long& value) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  return !s.empty() && res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool id_less(const std::string& a, const std::string& b) {
  long long x = 0, y = 0;
  const bool ia = is_integer(a, x);
  const bool ib = is_integer(b, y);
  if (ia && ib) return x != y ? x < y : a < b;
  if (ia != ib) return ia;
  return a < b;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto res = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, res.ptr);
}

FrameParseResult parse_frames(std::istream& in, bool strict) {
  FrameParseResult result;
  std::set<std::pair<long long, std::string>> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    while (!view.empty() && (view.front() == ' ' || view.front() == '\t')) view.remove_prefix(1);
    if (view.empty() || view.front() == '#' || view == "\r") continue;

    const auto fields = split_fields(view);
    FrameRecord rec;
    std::string problem;
    if (fields.size() != 4) {
      problem = "expected 4 fields, found " + std::to_string(fields.size());
    } else if (!parse_frame_id(fields[0], rec.frame_id)) {
      problem = "bad frame id '" + std::string(fields[0]) + "'";
    } else if (fields[1].empty()) {
      problem = "empty agent id";
    } else if (!parse_double(fields[2], rec.x)) {
      problem = "bad x '" + std::string(fields[2]) + "'";
    } else if (!parse_double(fields[3], rec.y)) {
      problem = "bad y '" + std::string(fields[3]) + "'";
    } else {
      rec.agent_id = std::string(fields[1]);
      if (!seen.emplace(rec.frame_id, rec.agent_id).second) {
        problem = "duplicate (frame " + std::to_string(rec.frame_id) + ", agent " + rec.agent_id + ")";
      }
    }
    if (!problem.empty()) {
      result.issues.push_back({number, problem});
      continue;
    }
    result.records.push_back(std::move(rec));
  }
  if (strict && !result.issues.empty()) {
    std::string message = std::to_string(result.issues.size()) + " malformed line(s):";
    for (const auto& issue : result.issues) message += " line " + std::to_string(issue.line) + ": " + issue.message + ";";
    throw Error(ErrorCode::parse, message);
  }
  return result;
}

FrameParseResult parse_frames_file(const std::string& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read frame file '" + path + "'");
  try {
    return parse_frames(in, strict);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.detail());
  }
}

std::string serialize_frames(std::span<const FrameRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += std::to_string(r.frame_id) + '\t' + r.agent_id + '\t' + format_double(r.x) + '\t' + format_double(r.y) + '\n';
  }
  return out;
}

void SceneWindowConfig::validate() const {
  if (t_obs < 2) throw Error(ErrorCode::invalid_config, "t_obs must be >= 2");
  if (t_pred < 1) throw Error(ErrorCode::invalid_config, "t_pred must be >= 1");
  if (stride < 1) throw Error(ErrorCode::invalid_config, "stride must be >= 1");
}

std::vector<Scene> build_scenes(std::span<const FrameRecord> records, const SceneWindowConfig& config) {
  config.validate();
  std::set<long long> frame_set;
  std::map<std::string, std::map<long long, Point>, decltype(&id_less)> tracks(&id_less);
  for (const auto& r : records) {
    frame_set.insert(r.frame_id);
    tracks[r.agent_id][r.frame_id] = Point{r.x, r.y};
  }
  const std::vector<long long> frames(frame_set.begin(), frame_set.end());
  const std::size_t length = config.t_obs + config.t_pred;

  std::vector<Scene> scenes;
  for (std::size_t start = 0; start + length <= frames.size(); start += config.stride) {
    Scene scene;
    scene.id = config.id_prefix + ":" + std::to_string(frames[start]);
    for (const auto& [agent, track] : tracks) {
      Agent a;
      a.id = agent;
      Trajectory future;
      bool complete = true;
      for (std::size_t k = 0; k < length && complete; ++k) {
        const auto it = track.find(frames[start + k]);
        if (it == track.end()) {
          complete = false;
        } else if (k < config.t_obs) {
          a.observation.push_back(it->second);
        } else {
          future.push_back(it->second);
        }
      }
      if (!complete) continue;
      a.future = std::move(future);
      scene.agents.push_back(std::move(a));
    }
    if (scene.agents.size() < 1 + config.min_neighbors) continue;
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

}  // namespace sattack
