#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coopadapt/control.hpp"
#include "coopadapt/excitation.hpp"
#include "coopadapt/filters.hpp"
#include "coopadapt/network.hpp"
#include "coopadapt/trajectory.hpp"

namespace coopadapt {

struct RobotConfig {
  std::string name;
  std::vector<double> link_lengths_m;
  std::vector<double> joint_offsets_rad;
  std::vector<BodyParams> links;
  PayloadMount mount;
  TrajectorySpec trajectory;
  Vec lambda_per_s;
  Mat kd;
  Mat p_adapt;
  /// Present when the robot also adapts its own link parameters.
  std::optional<Mat> q_robot;
  Vec a_hat0;
  /// Initial link-parameter estimate (4 per link); used only with q_robot.
  Vec b_hat0;
  CompositeKind composite = CompositeKind::none;
  /// Initial deviation from the reference at t = 0.
  Vec q0_offset;
  Vec qd0_offset;

  PlanarModel model(const Vec2& gravity, const BodyParams& payload) const;
  ControllerGains gains() const { return {lambda_per_s, kd}; }
};

struct ScheduleConfig {
  std::vector<ScheduleInterval> intervals;
  double dwell_s = 0.0;
  std::optional<double> period_s;
};

struct NetworkConfig {
  /// Coupling gain K (consensus) or per-edge K_ij (switching, delayed).
  Mat k_coupling;
  /// Edges of the static graph; empty means all-to-all.
  std::vector<EdgeKey> edges;
  double delay_s = 0.0;
  std::optional<ScheduleConfig> schedule;
};

enum class ChannelHold { zoh, linear };

/// A fully resolved experiment: every default is materialized.
struct Scenario {
  std::string name = "scenario";
  double duration_s = 60.0;
  double step_s = 1e-3;
  Vec2 gravity_mps2 = Vec2::Zero();
  BodyParams payload{1.0, 0.1, 0.0, 0.05};
  Regime regime = Regime::direct;
  std::vector<RobotConfig> robots;
  NetworkConfig network;
  double composite_gamma = 0.9;
  double pe_window_s = 10.0;
  double deficiency_tol = 1e-6;
  /// Per-step allowance on numerically differenced V; resolved from step_s when absent in the file.
  double v_step_tolerance = 0.0;
  ChannelHold channel_hold = ChannelHold::zoh;
  int decimate = 1;
  double divergence_limit = 1e6;

  int n_robots() const { return static_cast<int>(robots.size()); }
  long n_steps() const;
  Vec payload_vector() const { return payload.to_vector(); }

  /// Static topology for consensus / delayed regimes (all-to-all when no edges are given).
  Topology topology() const;
  /// Schedule for the switching regime; a static graph becomes a one-interval schedule.
  SwitchSchedule schedule() const;
};

/// Parse the JSON scenario text. Missing keys take documented defaults;
/// unknown keys are rejected so typos do not silently fall back.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

/// Serialized scenario with all defaults materialized (pretty JSON).
std::string resolved_scenario_text(const Scenario& scenario);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> errors;
  std::vector<std::string> notes;
  std::optional<ConnectivityReport> connectivity;
};

/// Checks SPD gains, delay divisibility, trajectory reachability, regime compatibility and,
/// for switching runs, joint connectivity of the schedule over the horizon.
ValidationReport validate_scenario(const Scenario& scenario);

/// Default per-step V allowance: 10x a local truncation scale of the RK4 step.
double default_v_step_tolerance(double step_s);

}  // namespace coopadapt
