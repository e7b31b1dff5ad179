#include "coopadapt/trajectory.hpp"

#include <cmath>
#include <numbers>

namespace coopadapt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

}  // namespace

double SinusoidChannel::value(double t) const {
  double v = offset;
  for (const Sinusoid& s : terms) v += s.amplitude * std::sin(kTwoPi * s.freq_hz * t + s.phase_rad);
  return v;
}

double SinusoidChannel::rate(double t) const {
  double v = 0.0;
  for (const Sinusoid& s : terms) {
    const double w = kTwoPi * s.freq_hz;
    v += s.amplitude * w * std::cos(w * t + s.phase_rad);
  }
  return v;
}

double SinusoidChannel::accel(double t) const {
  double v = 0.0;
  for (const Sinusoid& s : terms) {
    const double w = kTwoPi * s.freq_hz;
    v -= s.amplitude * w * w * std::sin(w * t + s.phase_rad);
  }
  return v;
}

bool SinusoidChannel::is_constant() const {
  for (const Sinusoid& s : terms) {
    if (s.amplitude != 0.0 && s.freq_hz != 0.0) return false;
  }
  return true;
}

const char* to_string(TrajectoryMode m) {
  switch (m) {
    case TrajectoryMode::joint: return "joint";
    case TrajectoryMode::translation: return "translation";
    case TrajectoryMode::rotation: return "rotation";
  }
  return "joint";
}

TrajectoryMode trajectory_mode_from_string(const std::string& s) {
  if (s == "joint") return TrajectoryMode::joint;
  if (s == "translation") return TrajectoryMode::translation;
  if (s == "rotation") return TrajectoryMode::rotation;
  throw std::invalid_argument("unknown trajectory mode '" + s + "' (expected joint|translation|rotation)");
}

void TrajectorySpec::validate(const PlanarModel& model) const {
  if (mode == TrajectoryMode::joint) {
    detail::require(static_cast<int>(channels.size()) == model.n_joints(),
                    "trajectory: joint mode needs one channel per joint");
    return;
  }
  detail::require(model.n_links() == 3, "trajectory: task-space modes need a 3-link arm");
  detail::require(channels.size() == 3, "trajectory: task-space modes need channels (x, y, angle)");
  detail::require(elbow == 1 || elbow == -1, "trajectory: elbow must be +1 or -1");
  if (mode == TrajectoryMode::translation) {
    detail::require(channels[2].is_constant(), "trajectory: translation mode requires a constant angle channel");
  } else {
    detail::require(channels[0].is_constant() && channels[1].is_constant(),
                    "trajectory: rotation mode requires constant position channels");
  }
}

Eigen::Vector3d payload_pose(const PlanarModel& model, const Vec& q) {
  const BodyPose p = body_pose(model, q, model.payload_body());
  return {p.origin.x(), p.origin.y(), p.angle};
}

Mat payload_jacobian(const PlanarModel& model, const Vec& q) {
  const int n = model.n_joints();
  const Vec2 o = body_pose(model, q, model.payload_body()).origin;
  Mat j(3, n);
  for (int c = 0; c < n; ++c) {
    j.block<2, 1>(0, c) = perp(o - body_pose(model, q, c).origin);
    j(2, c) = 1.0;
  }
  return j;
}

Eigen::Vector3d payload_jacobian_rate(const PlanarModel& model, const Vec& q, const Vec& qd) {
  const int n = model.n_joints();
  const Vec2 o = body_pose(model, q, model.payload_body()).origin;
  std::vector<Vec2> joints(n);
  for (int c = 0; c < n; ++c) joints[c] = body_pose(model, q, c).origin;
  Vec2 acc = Vec2::Zero();
  for (int c = 0; c < n; ++c) {
    for (int k = 0; k < n; ++k) acc -= (o - joints[std::max(c, k)]) * qd[k] * qd[c];
  }
  return {acc.x(), acc.y(), 0.0};
}

Vec inverse_kinematics(const PlanarModel& model, const Eigen::Vector3d& pose, int elbow) {
  detail::require(model.n_links() == 3, "inverse_kinematics: 3-link arm required");
  const auto& l = model.link_lengths();
  const auto& off = model.joint_offsets();
  const PayloadMount& mount = model.mount();
  const double th3 = pose.z() - mount.angle_rad;
  const Eigen::Rotation2Dd r3(th3);
  const Vec2 wrist = Vec2(pose.x(), pose.y()) - r3 * mount.offset_m;
  const double c2 = (wrist.squaredNorm() - l[0] * l[0] - l[1] * l[1]) / (2.0 * l[0] * l[1]);
  if (std::abs(c2) > 1.0) throw std::invalid_argument("inverse_kinematics: pose out of reach");
  const double rel2 = elbow * std::acos(c2);
  const double th1 = std::atan2(wrist.y(), wrist.x()) - std::atan2(l[1] * std::sin(rel2), l[0] + l[1] * std::cos(rel2));
  const double th2 = th1 + rel2;
  Vec q(3);
  q << th1 - off[0], rel2 - off[1], th3 - th2 - off[2];
  return q;
}

ReferenceSignal reference(const TrajectorySpec& spec, const PlanarModel& model, double t) {
  ReferenceSignal ref;
  if (spec.mode == TrajectoryMode::joint) {
    const int n = static_cast<int>(spec.channels.size());
    ref.q.resize(n);
    ref.qd.resize(n);
    ref.qdd.resize(n);
    for (int i = 0; i < n; ++i) {
      ref.q[i] = spec.channels[i].value(t);
      ref.qd[i] = spec.channels[i].rate(t);
      ref.qdd[i] = spec.channels[i].accel(t);
    }
    return ref;
  }
  Eigen::Vector3d x, xd, xdd;
  for (int k = 0; k < 3; ++k) {
    x[k] = spec.channels[k].value(t);
    xd[k] = spec.channels[k].rate(t);
    xdd[k] = spec.channels[k].accel(t);
  }
  ref.q = inverse_kinematics(model, x, spec.elbow);
  const Mat j = payload_jacobian(model, ref.q);
  const Eigen::PartialPivLU<Mat> lu(j);
  ref.qd = lu.solve(xd);
  ref.qdd = lu.solve(xdd - payload_jacobian_rate(model, ref.q, ref.qd));
  return ref;
}

}  // namespace coopadapt
