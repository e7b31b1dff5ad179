#include <cmath>

#include <gtest/gtest.h>

#include "coopadapt/trajectory.hpp"

using namespace coopadapt;

namespace {

PlanarModel arm() {
  return PlanarModel({1.0, 0.8, 0.3}, {0.0, 0.0, 0.0}, {{2, 1, 0, 0.7}, {1.5, 0.6, 0, 0.32}, {0.5, 0.075, 0, 0.015}},
                     Vec2::Zero(), BodyParams{1.0, 0.1, 0.0, 0.05}, PayloadMount{Vec2(0.3, 0.0), 0.0});
}

TrajectorySpec translating() {
  TrajectorySpec s;
  s.mode = TrajectoryMode::translation;
  s.channels = {{0.9, {{0.25, 0.8, 0.0}}}, {0.8, {{0.2, 0.6, 0.7}, {0.1, 1.2, 0.3}}}, {0.2, {}}};
  return s;
}

TrajectorySpec rotating() {
  TrajectorySpec s;
  s.mode = TrajectoryMode::rotation;
  s.channels = {{1.1, {}}, {0.7, {}}, {0.0, {{0.8, 0.4, 0.0}, {0.5, 0.9, 1.0}}}};
  return s;
}

}  // namespace

TEST(Trajectory, SinusoidDerivatives) {
  const SinusoidChannel c{0.5, {{2.0, 0.5, 0.3}}};
  const double w = 2.0 * M_PI * 0.5, t = 0.37;
  EXPECT_NEAR(c.value(t), 0.5 + 2.0 * std::sin(w * t + 0.3), 1e-15);
  EXPECT_NEAR(c.rate(t), 2.0 * w * std::cos(w * t + 0.3), 1e-14);
  EXPECT_NEAR(c.accel(t), -2.0 * w * w * std::sin(w * t + 0.3), 1e-13);
  EXPECT_TRUE((SinusoidChannel{1.0, {}}).is_constant());
  EXPECT_FALSE(c.is_constant());
}

TEST(Trajectory, InverseKinematicsRoundTrip) {
  const PlanarModel m = arm();
  for (int elbow : {1, -1}) {
    const Eigen::Vector3d pose(0.9, 0.7, 0.4);
    const Vec q = inverse_kinematics(m, pose, elbow);
    EXPECT_LT((payload_pose(m, q) - pose).norm(), 1e-12);
    EXPECT_GT(elbow * q[1], 0.0);
  }
  EXPECT_THROW(inverse_kinematics(m, Eigen::Vector3d(5.0, 0.0, 0.0), 1), std::invalid_argument);
}

TEST(Trajectory, JacobianMatchesFiniteDifference) {
  const PlanarModel m = arm();
  const Vec q = Eigen::Vector3d(0.3, 1.1, -0.6);
  const Vec qd = Eigen::Vector3d(0.5, -0.2, 0.9);
  const double eps = 1e-6;
  const Eigen::Vector3d fd = (payload_pose(m, q + eps * qd) - payload_pose(m, q - eps * qd)) / (2 * eps);
  EXPECT_LT((payload_jacobian(m, q) * qd - fd).norm(), 1e-9);
  const Eigen::Vector3d jdot_fd =
      (payload_jacobian(m, q + eps * qd) * qd - payload_jacobian(m, q - eps * qd) * qd) / (2 * eps);
  EXPECT_LT((payload_jacobian_rate(m, q, qd) - jdot_fd).norm(), 1e-8);
}

TEST(Trajectory, ReferenceIsSelfConsistent) {
  const PlanarModel m = arm();
  for (const TrajectorySpec& spec : {translating(), rotating()}) {
    spec.validate(m);
    for (double t : {0.0, 0.9, 2.3}) {
      const double dt = 1e-5;
      const ReferenceSignal r = reference(spec, m, t), rp = reference(spec, m, t + dt), rm = reference(spec, m, t - dt);
      EXPECT_LT(((rp.q - rm.q) / (2 * dt) - r.qd).norm(), 1e-8);
      EXPECT_LT(((rp.qd - rm.qd) / (2 * dt) - r.qdd).norm(), 1e-6);
      const Eigen::Vector3d pose = payload_pose(m, r.q);
      EXPECT_NEAR(pose[0], spec.channels[0].value(t), 1e-12);
      EXPECT_NEAR(pose[1], spec.channels[1].value(t), 1e-12);
      EXPECT_NEAR(pose[2], spec.channels[2].value(t), 1e-12);
    }
  }
}

TEST(Trajectory, ModesRestrictTheirChannels) {
  const PlanarModel m = arm();
  TrajectorySpec bad = translating();
  bad.channels[2].terms.push_back({0.1, 1.0, 0.0});
  EXPECT_THROW(bad.validate(m), std::invalid_argument);
  TrajectorySpec bad_rot = rotating();
  bad_rot.channels[0].terms.push_back({0.1, 1.0, 0.0});
  EXPECT_THROW(bad_rot.validate(m), std::invalid_argument);
  TrajectorySpec joint;
  joint.channels = {{0.1, {}}, {0.2, {}}};
  EXPECT_THROW(joint.validate(m), std::invalid_argument);
}
