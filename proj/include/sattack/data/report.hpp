#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sattack/attack/engine.hpp"
#include "sattack/core/metrics.hpp"

namespace sattack {

struct ReportSummary {
  AttackSummary attack;
  std::optional<DisplacementError> accuracy;  ///< Unattacked ADE/FDE when ground truth exists.
};

/// ADE/FDE are taken from each scene's unattacked predictions (the
/// predictions_before of its first report) over all agents.
ReportSummary make_report_summary(std::span<const AttackReport> reports, std::span<const Scene> dataset);

/// JSON lines: one record per attack instance, then one {"summary": ...}
/// line. An empty report still gets a summary with "instances": 0.
std::string report_text(std::span<const AttackReport> reports, const ReportSummary& summary);
void emit_report(std::span<const AttackReport> reports, const ReportSummary& summary, const std::string& path);

struct ParsedReport {
  std::vector<AttackReport> reports;
  ReportSummary summary;
};
ParsedReport read_report(const std::string& path);

/// Short human-readable block for terminals.
std::string summary_table(const ReportSummary& summary);

/// SVG with observations, the perturbed candidate observation, predictions
/// before and after the attack and a marker at the collision point.
std::string plot_svg(const Scene& scene, const AttackReport& report);
void emit_plot(const Scene& scene, const AttackReport& report, const std::string& path);

}  // namespace sattack
