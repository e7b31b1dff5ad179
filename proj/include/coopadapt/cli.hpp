#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "coopadapt/simulation.hpp"

namespace coopadapt {

/// Numbers are written with 17 significant digits so logs round-trip exactly.
void write_timeseries_csv(const std::string& path, const TimeSeries& series);
TimeSeries read_timeseries_csv(const std::string& path);

std::string summary_json_text(const RunSummary& summary);

struct RobotPeReport {
  std::string name;
  double pe_level = 0.0;
  Vec4 relative_excitation = Vec4::Zero();
  std::vector<std::string> deficient;
  /// Orthonormal near-null directions of the robot's Gramian (columns).
  Mat deficient_basis;
};

struct PeReport {
  double window_s = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  double collective = 0.0;
  std::vector<RobotPeReport> robots;
};

/// Rebuild each robot's closed-loop payload regressor from a log and the
/// scenario that produced it, then report PE over the final window.
PeReport pe_report_from_log(const Scenario& scenario, const TimeSeries& series);
std::string pe_report_text(const PeReport& report);
std::string pe_report_json_text(const PeReport& report);

/// Apply `path=value` overrides (dot-separated keys, numeric indices for arrays) to scenario JSON text.
std::string apply_overrides(const std::string& json_text, const std::vector<std::pair<std::string, std::string>>& overrides);

struct SweepAxis {
  std::string path;
  std::vector<std::string> values;
};

/// Parse "path=v1,v2,..." into an axis; throws std::invalid_argument when malformed.
SweepAxis parse_sweep_axis(const std::string& spec);

int cmd_validate(const std::string& scenario_path, std::ostream& out, std::ostream& err);
int cmd_run(const std::string& scenario_path, const std::string& out_dir, int decimate, std::ostream& out,
            std::ostream& err);
int cmd_sweep(const std::string& scenario_path, const std::string& out_dir, const std::vector<std::string>& axes,
              int decimate, int jobs, std::ostream& out, std::ostream& err);
/// `target` is a run directory (timeseries.csv + scenario.resolved) or a timeseries.csv path next to one.
int cmd_pe_report(const std::string& target, const std::string& scenario_path, bool as_json, std::ostream& out,
                  std::ostream& err);

}  // namespace coopadapt
