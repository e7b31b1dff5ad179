#pragma once

#include <string>
#include <vector>

#include "coopadapt/control.hpp"
#include "coopadapt/dynamics.hpp"

namespace coopadapt {

struct Sinusoid {
  double amplitude = 0.0;  // rad or m, depending on the channel
  double freq_hz = 0.0;
  double phase_rad = 0.0;
};

/// offset + sum_k A_k sin(2 pi f_k t + phi_k), with analytic derivatives.
struct SinusoidChannel {
  double offset = 0.0;
  std::vector<Sinusoid> terms;

  double value(double t) const;
  double rate(double t) const;
  double accel(double t) const;
  bool is_constant() const;
};

enum class TrajectoryMode { joint, translation, rotation };

const char* to_string(TrajectoryMode m);
TrajectoryMode trajectory_mode_from_string(const std::string& s);

/// Desired motion of one robot.
///
/// `joint` mode uses one channel per joint. The task-space modes describe the
/// payload frame pose (x, y, angle) with three channels and are resolved to
/// joint motion by inverse kinematics of a 3-link arm: `translation` keeps the
/// angle channel constant, `rotation` keeps both position channels constant.
struct TrajectorySpec {
  TrajectoryMode mode = TrajectoryMode::joint;
  std::vector<SinusoidChannel> channels;
  /// Elbow branch of the 2-link sub-chain: +1 or -1 (sign of the second joint's relative angle).
  int elbow = 1;

  /// Throws std::invalid_argument when the spec contradicts its mode or the model.
  void validate(const PlanarModel& model) const;
};

/// Desired joint position, velocity and acceleration at time t.
ReferenceSignal reference(const TrajectorySpec& spec, const PlanarModel& model, double t);

/// Payload frame pose (x, y, angle) at joint configuration q.
Eigen::Vector3d payload_pose(const PlanarModel& model, const Vec& q);

/// Joint angles placing the payload frame at `pose` (3-link arms only).
Vec inverse_kinematics(const PlanarModel& model, const Eigen::Vector3d& pose, int elbow);

/// Task Jacobian d(x, y, angle)/dq of the payload frame.
Mat payload_jacobian(const PlanarModel& model, const Vec& q);

/// Jdot * qd of the payload frame.
Eigen::Vector3d payload_jacobian_rate(const PlanarModel& model, const Vec& q, const Vec& qd);

}  // namespace coopadapt
