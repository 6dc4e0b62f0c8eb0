#include "sattack/data/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

#include "sattack/core/error.hpp"

namespace sattack {

using nlohmann::ordered_json;

namespace {

ordered_json trajectories_json(const PredictionSet& p) {
  auto out = ordered_json::array();
  for (const auto& traj : p.trajectories) {
    auto t = ordered_json::array();
    for (const Point& q : traj) t.push_back({q.x, q.y});
    out.push_back(std::move(t));
  }
  return out;
}

PredictionSet trajectories_from(const nlohmann::json& j) {
  PredictionSet out;
  for (const auto& traj : j) {
    Trajectory t;
    for (const auto& q : traj) t.push_back({q.at(0).get<double>(), q.at(1).get<double>()});
    out.trajectories.push_back(std::move(t));
  }
  return out;
}

ordered_json record_json(const AttackReport& r) {
  ordered_json j;
  j["scene_id"] = r.scene_id;
  j["candidate_index"] = r.candidate_index;
  j["candidate_id"] = r.candidate_id;
  j["mode"] = std::string(to_string(r.mode));
  j["collided_before"] = r.collided_before;
  j["collided"] = r.collided;
  if (r.collision_cell) {
    j["collision_cell"] = {{"row", r.collision_cell->row},
                           {"neighbor", r.collision_cell->neighbor},
                           {"timestep", r.collision_cell->timestep}};
  } else {
    j["collision_cell"] = nullptr;
  }
  j["iterations"] = r.iterations_used;
  j["p_avg"] = r.p_avg;
  auto rows = ordered_json::array();
  for (const Point& p : r.perturbation.rows()) rows.push_back({p.x, p.y});
  j["R"] = std::move(rows);
  j["pred_before"] = trajectories_json(r.predictions_before);
  j["pred_after"] = trajectories_json(r.predictions_after);
  return j;
}

ordered_json summary_json(const ReportSummary& s) {
  ordered_json j;
  j["instances"] = s.attack.instances;
  j["collided"] = s.attack.collided;
  j["cr_original"] = s.attack.cr_original;
  j["cr"] = s.attack.cr;
  j["mean_pavg_collided"] = s.attack.mean_pavg_collided;
  j["mean_pavg_all"] = s.attack.mean_pavg_all;
  j["ade"] = s.accuracy ? ordered_json(s.accuracy->ade) : ordered_json(nullptr);
  j["fde"] = s.accuracy ? ordered_json(s.accuracy->fde) : ordered_json(nullptr);
  if (s.attack.instances == 0) j["note"] = "0 instances";
  return ordered_json{{"summary", std::move(j)}};
}

}  // namespace

ReportSummary make_report_summary(std::span<const AttackReport> reports, std::span<const Scene> dataset) {
  ReportSummary out;
  out.attack = summarize(reports);
  std::map<std::string, const Scene*> by_id;
  for (const Scene& s : dataset) by_id.emplace(s.id, &s);

  std::map<std::string, bool> done;
  double ade = 0.0;
  double fde = 0.0;
  std::size_t agents = 0;
  for (const AttackReport& r : reports) {
    if (done[r.scene_id]) continue;
    done[r.scene_id] = true;
    const auto it = by_id.find(r.scene_id);
    if (it == by_id.end() || !it->second->has_futures()) continue;
    const auto e = metric_ade_fde(r.predictions_before, *it->second);
    const auto n = static_cast<double>(it->second->size());
    ade += e.ade * n;
    fde += e.fde * n;
    agents += it->second->size();
  }
  if (agents > 0) out.accuracy = DisplacementError{ade / static_cast<double>(agents), fde / static_cast<double>(agents)};
  return out;
}

std::string report_text(std::span<const AttackReport> reports, const ReportSummary& summary) {
  std::string out;
  for (const AttackReport& r : reports) out += record_json(r).dump() + '\n';
  out += summary_json(summary).dump() + '\n';
  return out;
}

void emit_report(std::span<const AttackReport> reports, const ReportSummary& summary, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write report '" + path + "'");
  out << report_text(reports, summary);
  if (!out) throw Error(ErrorCode::io, "write failed for '" + path + "'");
}

ParsedReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read report '" + path + "'");
  ParsedReport out;
  std::string line;
  std::size_t number = 0;
  bool have_summary = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.contains("summary")) {
        const auto& s = j["summary"];
        auto& a = out.summary.attack;
        a.instances = s.at("instances").get<std::size_t>();
        a.collided = s.at("collided").get<std::size_t>();
        a.cr_original = s.at("cr_original").get<double>();
        a.cr = s.at("cr").get<double>();
        a.mean_pavg_collided = s.at("mean_pavg_collided").get<double>();
        a.mean_pavg_all = s.at("mean_pavg_all").get<double>();
        if (!s.at("ade").is_null()) {
          out.summary.accuracy = DisplacementError{s.at("ade").get<double>(), s.at("fde").get<double>()};
        }
        have_summary = true;
        continue;
      }
      AttackReport r;
      r.scene_id = j.at("scene_id").get<std::string>();
      r.candidate_index = j.at("candidate_index").get<std::size_t>();
      r.candidate_id = j.at("candidate_id").get<std::string>();
      r.mode = parse_attack_mode(j.at("mode").get<std::string>());
      r.collided_before = j.at("collided_before").get<bool>();
      r.collided = j.at("collided").get<bool>();
      if (!j.at("collision_cell").is_null()) {
        const auto& c = j["collision_cell"];
        r.collision_cell = CollisionCell{c.at("row").get<std::size_t>(), c.at("neighbor").get<std::size_t>(),
                                         c.at("timestep").get<std::size_t>()};
      }
      r.iterations_used = j.at("iterations").get<int>();
      r.p_avg = j.at("p_avg").get<double>();
      std::vector<Point> rows;
      for (const auto& p : j.at("R")) rows.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      r.perturbation = Perturbation(std::move(rows));
      r.predictions_before = trajectories_from(j.at("pred_before"));
      r.predictions_after = trajectories_from(j.at("pred_after"));
      out.reports.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::parse, path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  if (!have_summary) throw Error(ErrorCode::parse, path + ": no summary line");
  return out;
}

std::string summary_table(const ReportSummary& summary) {
  const auto& a = summary.attack;
  char buffer[512];
  if (a.instances == 0) return "0 instances\n";
  std::snprintf(buffer, sizeof(buffer),
                "instances            %zu\n"
                "collided             %zu\n"
                "CR original (%%)      %.2f\n"
                "CR attacked (%%)      %.2f\n"
                "P-avg collided (m)   %.4f\n"
                "P-avg all (m)        %.4f\n",
                a.instances, a.collided, a.cr_original, a.cr, a.mean_pavg_collided, a.mean_pavg_all);
  std::string out = buffer;
  if (summary.accuracy) {
    std::snprintf(buffer, sizeof(buffer), "ADE (m)              %.4f\nFDE (m)              %.4f\n",
                  summary.accuracy->ade, summary.accuracy->fde);
    out += buffer;
  }
  return out;
}

namespace {

class Canvas {
 public:
  Canvas(double min_x, double min_y, double max_x, double max_y) : min_x_(min_x), max_y_(max_y) {
    const double span = std::max({max_x - min_x, max_y - min_y, 1e-6});
    scale_ = (size - 2 * margin) / span;
  }

  std::string x(double v) const { return fmt(margin + (v - min_x_) * scale_); }
  std::string y(double v) const { return fmt(margin + (max_y_ - v) * scale_); }

  std::string polyline(const Trajectory& t, const std::string& style) const {
    std::string pts;
    for (const Point& p : t) pts += x(p.x) + "," + y(p.y) + " ";
    if (!pts.empty()) pts.pop_back();
    return "  <polyline points=\"" + pts + "\" fill=\"none\" " + style + "/>\n";
  }

  static constexpr double size = 800.0;
  static constexpr double margin = 40.0;

 private:
  static std::string fmt(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", v);
    return buffer;
  }

  double min_x_;
  double max_y_;
  double scale_ = 1.0;
};

}  // namespace

std::string plot_svg(const Scene& scene, const AttackReport& report) {
  const std::size_t c = report.candidate_index;
  if (c >= scene.size()) throw Error(ErrorCode::shape, "report candidate is not in the scene");
  Trajectory perturbed = scene.agents[c].observation;
  for (std::size_t t = 0; t < perturbed.size() && t < report.perturbation.size(); ++t) {
    perturbed[t] = perturbed[t] + report.perturbation[t];
  }

  double lo_x = std::numeric_limits<double>::infinity();
  double lo_y = lo_x;
  double hi_x = -lo_x;
  double hi_y = -lo_x;
  auto extend = [&](const Trajectory& t) {
    for (const Point& p : t) {
      lo_x = std::min(lo_x, p.x);
      lo_y = std::min(lo_y, p.y);
      hi_x = std::max(hi_x, p.x);
      hi_y = std::max(hi_y, p.y);
    }
  };
  for (const Agent& a : scene.agents) extend(a.observation);
  extend(perturbed);
  for (const auto& t : report.predictions_before.trajectories) extend(t);
  for (const auto& t : report.predictions_after.trajectories) extend(t);
  if (!(lo_x <= hi_x)) lo_x = lo_y = hi_x = hi_y = 0.0;
  const Canvas canvas(lo_x, lo_y, hi_x, hi_y);

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n";
  out += "  <title>" + report.scene_id + " candidate " + report.candidate_id + "</title>\n";
  out += "  <rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const std::string colour = i == c ? "#2a7" : "#555";
    out += canvas.polyline(scene.agents[i].observation, "class=\"observed\" stroke=\"" + colour + "\" stroke-width=\"2\"");
  }
  out += canvas.polyline(perturbed, "class=\"perturbed\" stroke=\"#d22\" stroke-width=\"2\" stroke-dasharray=\"4 3\"");
  for (std::size_t i = 0; i < report.predictions_before.size(); ++i) {
    out += canvas.polyline(report.predictions_before.trajectories[i],
                           "class=\"predicted-before\" stroke=\"#36c\" stroke-width=\"1\" stroke-dasharray=\"3 3\"");
  }
  for (std::size_t i = 0; i < report.predictions_after.size(); ++i) {
    const std::string colour = i == c ? "#d22" : "#36c";
    out += canvas.polyline(report.predictions_after.trajectories[i],
                           "class=\"predicted-after\" stroke=\"" + colour + "\" stroke-width=\"2\"");
  }
  if (report.collision_cell && c < report.predictions_after.size()) {
    const auto& cell = *report.collision_cell;
    const auto& cand = report.predictions_after.trajectories[c];
    const auto& other = report.predictions_after.trajectories.at(cell.neighbor);
    const Point mid = 0.5 * (cand.at(cell.timestep) + other.at(cell.timestep));
    out += "  <circle class=\"collision-marker\" data-timestep=\"" + std::to_string(cell.timestep) + "\" data-neighbor=\"" +
           std::to_string(cell.neighbor) + "\" cx=\"" + canvas.x(mid.x) + "\" cy=\"" + canvas.y(mid.y) +
           "\" r=\"8\" fill=\"none\" stroke=\"#f80\" stroke-width=\"3\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

void emit_plot(const Scene& scene, const AttackReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write plot '" + path + "'");
  out << plot_svg(scene, report);
  if (!out) throw Error(ErrorCode::io, "write failed for '" + path + "'");
}

}  // namespace sattack
