#pragma once

#include <memory>
#include <string>
#include <vector>

#include "coopadapt/scenario.hpp"

namespace coopadapt {

/// Uniformly sampled log with named columns (see csv_columns()).
struct TimeSeries {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;
  std::vector<double> series(const std::string& name) const;
};

/// Column names in log order: t, robot blocks (q, qd, s, a_hat), then V, pe_collective, consensus_max.
std::vector<std::string> csv_columns(const Scenario& scenario);

/// Per-step data of one robot kept in memory when RunOptions::record_history is set.
struct RobotHistory {
  /// State at every step boundary, with the exact integral of the bias
  /// regressor (all bodies, links then payload) over the interval that ended there.
  std::vector<MotionSample> motion;
  /// Interval-averaged joint torque and joint power; entry 0 is zero.
  std::vector<Vec> tau_avg;
  std::vector<double> power_avg;
};

struct RunOptions {
  /// Overrides the scenario's decimation when > 0.
  int decimate = 0;
  bool record_history = false;
};

struct LyapunovStats {
  double tolerance = 0.0;
  long steps = 0;
  long violations = 0;
  double max_increase = 0.0;
  double initial = 0.0;
  double final = 0.0;
};

struct RobotSummary {
  std::string name;
  double param_error_rel = 0.0;
  /// |a_hat - a| per direction (m, hx, hy, izz), final and initial.
  Vec4 direction_error = Vec4::Zero();
  Vec4 direction_error_initial = Vec4::Zero();
  Vec4 a_hat = Vec4::Zero();
  double s_max_last_5s = 0.0;
  /// Gramian of the final PE window (average of Y^T Y).
  Mat4 gramian = Mat4::Zero();
  double pe_level = 0.0;
  /// Rayleigh quotient of each unit direction divided by lambda_max.
  Vec4 relative_excitation = Vec4::Zero();
  std::vector<std::string> deficient;
  /// max |W a - LP[measurement]| after the filter transient (NaN when no filter ran).
  double filter_identity_residual = 0.0;
};

struct RunSummary {
  std::string scenario;
  std::string regime;
  double t_end = 0.0;
  long steps = 0;
  bool diverged = false;
  std::string divergence_message;
  double final_param_error_rel = 0.0;
  double pe_collective = 0.0;
  double consensus_max = 0.0;
  LyapunovStats lyapunov;
  /// Smallest per-step value of sum_i a~_i^T W_i^T e_i once composite terms are active (NaN otherwise).
  double composite_gain_min = 0.0;
  double wall_time_s = 0.0;
  std::vector<RobotSummary> robots;
};

struct RunResult {
  TimeSeries series;
  RunSummary summary;
  std::vector<RobotHistory> history;
};

/// Fixed-step RK4 integration of robots, estimates and communication channels.
///
/// The continuous states are joint positions/velocities, payload estimates
/// (one shared vector for the centralized regime), optional link-parameter
/// estimates, and per-step integrals of torque, power and bias regressors
/// that feed the discrete composite filters. Delay-line outputs, the active
/// edge set and the composite W/e samples are frozen over each step.
class Simulation {
 public:
  explicit Simulation(const Scenario& scenario, RunOptions options = {});
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;

  /// Advance one step; throws DivergenceError on non-finite or runaway states.
  void step();
  RunResult run();

  double time() const;
  long step_index() const;
  const Scenario& scenario() const;

  Vec q(int robot) const;
  Vec qd(int robot) const;
  Vec a_hat(int robot) const;
  Vec b_hat(int robot) const;
  Vec sliding(int robot) const;
  /// Lyapunov function of the current state (true payload known to the monitor).
  double lyapunov() const;
  /// Flat continuous state, for step-size studies.
  const Vec& state() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Validate, then integrate the whole horizon. Invalid scenarios raise ScenarioError with all reasons.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

}  // namespace coopadapt
