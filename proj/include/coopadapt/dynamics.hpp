#pragma once

#include <array>
#include <optional>
#include <vector>

#include "coopadapt/types.hpp"

namespace coopadapt {

/// Barycentric inertial parameters of a planar body, expressed in the body frame.
///
/// `hx`, `hy` are the first mass moment m*c about the frame origin and `izz`
/// is the rotational inertia about the frame origin. Estimates are free to
/// take nonphysical values; use is_physical() to check consistency.
struct BodyParams {
  double m = 0.0;
  double hx = 0.0;
  double hy = 0.0;
  double izz = 0.0;

  Vec4 to_vector() const { return {m, hx, hy, izz}; }
  static BodyParams from_vector(const Eigen::Ref<const Vec>& v);

  friend bool operator==(const BodyParams&, const BodyParams&) = default;
};

/// m > 0, izz > 0 and izz*m >= hx^2 + hy^2.
bool is_physical(const BodyParams& p);

/// Labels for the four per-body parameter directions, in vector order.
inline constexpr std::array<const char*, kParamsPerBody> kParamLabels = {"m", "hx", "hy", "izz"};

/// Rigid attachment of the payload frame to the terminal link frame.
struct PayloadMount {
  Vec2 offset_m = Vec2::Zero();
  double angle_rad = 0.0;
};

struct JointState {
  Vec q;
  Vec qd;
};

/// Serial planar chain of revolute joints, optionally carrying a payload.
///
/// Bodies are indexed 0..n_links-1 for the links and n_links for the payload
/// slot. The payload slot always exists geometrically (its frame is given by
/// the mount); its parameters are zero when no payload is attached.
class PlanarModel {
 public:
  PlanarModel(std::vector<double> link_lengths, std::vector<double> joint_offsets,
              std::vector<BodyParams> links, Vec2 gravity,
              std::optional<BodyParams> payload = std::nullopt, PayloadMount mount = {});

  int n_links() const { return static_cast<int>(link_lengths_.size()); }
  int n_joints() const { return n_links(); }
  int payload_body() const { return n_links(); }
  int n_bodies() const { return n_links() + 1; }

  const std::vector<double>& link_lengths() const { return link_lengths_; }
  const std::vector<double>& joint_offsets() const { return joint_offsets_; }
  const std::vector<BodyParams>& links() const { return links_; }
  const std::optional<BodyParams>& payload() const { return payload_; }
  const PayloadMount& mount() const { return mount_; }
  const Vec2& gravity() const { return gravity_; }

  /// Parameters of body `b`; the payload slot returns zeros when empty.
  BodyParams body_params(int b) const;

  /// Stacked parameters of the selected bodies, 4 per body.
  Vec param_vector(const std::vector<int>& bodies) const;

  PlanarModel with_payload(std::optional<BodyParams> payload) const;
  PlanarModel with_links(std::vector<BodyParams> links) const;
  PlanarModel with_gravity(Vec2 gravity) const;

  /// Payload-free model whose terminal link carries the parallel-axis composition of link and payload.
  PlanarModel compose_payload() const;

 private:
  std::vector<double> link_lengths_;
  std::vector<double> joint_offsets_;
  std::vector<BodyParams> links_;
  Vec2 gravity_;
  std::optional<BodyParams> payload_;
  PayloadMount mount_;
};

/// Body indices of every link (the robot-specific parameter set).
std::vector<int> link_bodies(const PlanarModel& model);

/// Single-element selector for the payload slot.
std::vector<int> payload_selector(const PlanarModel& model);

struct BodyPose {
  Vec2 origin;
  double angle = 0.0;
};

/// Frame of body `b` at joint configuration `q`.
BodyPose body_pose(const PlanarModel& model, const Vec& q, int b);

Mat mass_matrix(const PlanarModel& model, const Vec& q);
Mat coriolis_matrix(const PlanarModel& model, const Vec& q, const Vec& qd);
Vec gravity_vector(const PlanarModel& model, const Vec& q);
Vec inverse_dynamics(const PlanarModel& model, const Vec& q, const Vec& qd, const Vec& qdd);
Vec forward_dynamics(const PlanarModel& model, const Vec& q, const Vec& qd, const Vec& tau);

/// Y with Y*a = H(a) qr_dd + C(a; q, qd) qr_d + g(a) restricted to the selected bodies.
Mat regressor(const PlanarModel& model, const Vec& q, const Vec& qd, const Vec& qr_d,
              const Vec& qr_dd, const std::vector<int>& bodies);

/// Dynamics of the bodies at configuration q, split per unit parameter.
///
/// Every quantity of the manipulator equations is linear in the barycentric
/// parameters, so each body contributes four unit terms (H_j, dH_j/dq, g_j)
/// that are combined with the actual parameter values. Evaluating the unit
/// terms once per configuration lets the simulator assemble the true model,
/// the controller's estimated model, the regressors and the filtered
/// regressors from a single kinematics pass.
class DynamicsTerms {
 public:
  DynamicsTerms(const PlanarModel& model, const Vec& q);

  int n() const { return n_; }
  int n_bodies() const { return static_cast<int>(bodies_.size()); }

  /// H, C(qd), g for the given parameter assignment (4 values per body, all bodies).
  Mat mass_matrix(const Vec& all_params) const;
  Mat coriolis_matrix(const Vec& all_params, const Vec& qd) const;
  Vec gravity_vector(const Vec& all_params) const;

  /// Columns H_j qr_dd + C_j(qd) qr_d + g_j over the selected bodies.
  Mat regressor(const std::vector<int>& bodies, const Vec& qd, const Vec& qr_d, const Vec& qr_dd) const;

  /// Columns H_j qd (generalized momentum per unit parameter).
  Mat momentum_regressor(const std::vector<int>& bodies, const Vec& qd) const;

  /// Columns g_j - C_j(qd)^T qd: the non-momentum part of the torque, tau = d/dt(H qd) + (g - C^T qd).
  Mat bias_regressor(const std::vector<int>& bodies, const Vec& qd) const;

  /// Row of kinetic energies 0.5 qd^T H_j qd.
  Eigen::RowVectorXd kinetic_energy_regressor(const std::vector<int>& bodies, const Vec& qd) const;

  /// Row of gravity powers qd^T g_j.
  Eigen::RowVectorXd gravity_power_regressor(const std::vector<int>& bodies, const Vec& qd) const;

  /// Unit terms of one body parameter; k indexes dH/dq_k.
  const Mat& unit_mass(int body, int param) const { return bodies_[body][param].h; }
  const Mat& unit_mass_derivative(int body, int param, int k) const { return bodies_[body][param].dh[k]; }
  const Vec& unit_gravity(int body, int param) const { return bodies_[body][param].g; }

  /// C_j(qd) built from Christoffel symbols of H_j.
  Mat unit_coriolis(int body, int param, const Vec& qd) const;

 private:
  struct UnitTerm {
    Mat h;
    std::vector<Mat> dh;
    Vec g;
  };
  int n_;
  std::vector<std::array<UnitTerm, kParamsPerBody>> bodies_;
};

/// Stack of all body parameters (links then payload slot) of `model`.
Vec all_body_params(const PlanarModel& model);

}  // namespace coopadapt
