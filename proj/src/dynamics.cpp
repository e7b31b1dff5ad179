#include "coopadapt/dynamics.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace coopadapt {

namespace {

Vec2 unit_dir(double angle) { return {std::cos(angle), std::sin(angle)}; }

// z-hat cross v for planar vectors.
Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

Eigen::Matrix2d rotation(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

void check_state(const PlanarModel& model, const Vec& v, const char* what) {
  detail::require_size(v.size(), model.n_joints(), what);
}

// Joint positions p_0..p_{n-1} and absolute link angles.
struct ChainGeometry {
  std::vector<Vec2> joint;
  std::vector<double> angle;
};

ChainGeometry chain_geometry(const PlanarModel& model, const Vec& q) {
  const int n = model.n_links();
  ChainGeometry geo;
  geo.joint.resize(n);
  geo.angle.resize(n);
  Vec2 p = Vec2::Zero();
  double theta = 0.0;
  for (int i = 0; i < n; ++i) {
    theta += q[i] + model.joint_offsets()[i];
    geo.joint[i] = p;
    geo.angle[i] = theta;
    p += model.link_lengths()[i] * unit_dir(theta);
  }
  return geo;
}

BodyPose pose_from_geometry(const PlanarModel& model, const ChainGeometry& geo, int b) {
  const int n = model.n_links();
  if (b < n) return {geo.joint[b], geo.angle[b]};
  const double theta = geo.angle[n - 1];
  const Vec2 origin = geo.joint[n - 1] + rotation(theta) * model.mount().offset_m;
  return {origin, theta + model.mount().angle_rad};
}

int attach_joint(const PlanarModel& model, int b) { return b < model.n_links() ? b : model.n_links() - 1; }

}  // namespace

BodyParams BodyParams::from_vector(const Eigen::Ref<const Vec>& v) {
  detail::require_size(v.size(), kParamsPerBody, "BodyParams::from_vector");
  return {v[0], v[1], v[2], v[3]};
}

bool is_physical(const BodyParams& p) {
  return p.m > 0.0 && p.izz > 0.0 && p.izz * p.m >= p.hx * p.hx + p.hy * p.hy;
}

PlanarModel::PlanarModel(std::vector<double> link_lengths, std::vector<double> joint_offsets,
                         std::vector<BodyParams> links, Vec2 gravity, std::optional<BodyParams> payload,
                         PayloadMount mount)
    : link_lengths_(std::move(link_lengths)),
      joint_offsets_(std::move(joint_offsets)),
      links_(std::move(links)),
      gravity_(std::move(gravity)),
      payload_(payload),
      mount_(std::move(mount)) {
  detail::require(!link_lengths_.empty(), "PlanarModel: at least one link is required");
  if (joint_offsets_.empty()) joint_offsets_.assign(link_lengths_.size(), 0.0);
  detail::require(joint_offsets_.size() == link_lengths_.size(),
                  "PlanarModel: joint_offsets must have one entry per link");
  detail::require(links_.size() == link_lengths_.size(),
                  "PlanarModel: body parameters must have one entry per link");
  for (double l : link_lengths_) {
    detail::require(l > 0.0 && std::isfinite(l), "PlanarModel: link lengths must be positive");
  }
}

BodyParams PlanarModel::body_params(int b) const {
  detail::require(b >= 0 && b < n_bodies(), "PlanarModel::body_params: body index out of range");
  if (b < n_links()) return links_[b];
  return payload_.value_or(BodyParams{});
}

Vec PlanarModel::param_vector(const std::vector<int>& bodies) const {
  Vec out(kParamsPerBody * static_cast<Eigen::Index>(bodies.size()));
  for (size_t k = 0; k < bodies.size(); ++k) {
    out.segment<kParamsPerBody>(kParamsPerBody * static_cast<Eigen::Index>(k)) = body_params(bodies[k]).to_vector();
  }
  return out;
}

PlanarModel PlanarModel::with_payload(std::optional<BodyParams> payload) const {
  PlanarModel copy = *this;
  copy.payload_ = payload;
  return copy;
}

PlanarModel PlanarModel::with_links(std::vector<BodyParams> links) const {
  return PlanarModel(link_lengths_, joint_offsets_, std::move(links), gravity_, payload_, mount_);
}

PlanarModel PlanarModel::with_gravity(Vec2 gravity) const {
  PlanarModel copy = *this;
  copy.gravity_ = std::move(gravity);
  return copy;
}

PlanarModel PlanarModel::compose_payload() const {
  if (!payload_) return *this;
  const BodyParams& p = *payload_;
  const Vec2& r = mount_.offset_m;
  const Vec2 h_rot = rotation(mount_.angle_rad) * Vec2(p.hx, p.hy);
  std::vector<BodyParams> links = links_;
  BodyParams& tip = links.back();
  tip.m += p.m;
  tip.hx += p.m * r.x() + h_rot.x();
  tip.hy += p.m * r.y() + h_rot.y();
  tip.izz += p.izz + 2.0 * r.dot(h_rot) + p.m * r.squaredNorm();
  return PlanarModel(link_lengths_, joint_offsets_, std::move(links), gravity_, std::nullopt, mount_);
}

std::vector<int> link_bodies(const PlanarModel& model) {
  std::vector<int> out(model.n_links());
  for (int i = 0; i < model.n_links(); ++i) out[i] = i;
  return out;
}

std::vector<int> payload_selector(const PlanarModel& model) { return {model.payload_body()}; }

Vec all_body_params(const PlanarModel& model) {
  std::vector<int> all(model.n_bodies());
  for (int b = 0; b < model.n_bodies(); ++b) all[b] = b;
  return model.param_vector(all);
}

BodyPose body_pose(const PlanarModel& model, const Vec& q, int b) {
  check_state(model, q, "body_pose: q");
  detail::require(b >= 0 && b < model.n_bodies(), "body_pose: body index out of range");
  return pose_from_geometry(model, chain_geometry(model, q), b);
}

// ---------------------------------------------------------------------------
// DynamicsTerms

DynamicsTerms::DynamicsTerms(const PlanarModel& model, const Vec& q) : n_(model.n_joints()) {
  check_state(model, q, "DynamicsTerms: q");
  const ChainGeometry geo = chain_geometry(model, q);
  const Vec2 grav = model.gravity();
  bodies_.resize(model.n_bodies());

  for (int b = 0; b < model.n_bodies(); ++b) {
    const BodyPose pose = pose_from_geometry(model, geo, b);
    const int attach = attach_joint(model, b);

    // Jo: linear velocity Jacobian of the frame origin; jt: angular Jacobian (ones up to attach).
    Mat jo = Mat::Zero(2, n_);
    Eigen::RowVectorXd jt = Eigen::RowVectorXd::Zero(n_);
    for (int c = 0; c <= attach; ++c) {
      jo.col(c) = perp(pose.origin - geo.joint[c]);
      jt[c] = 1.0;
    }
    // d(Jo col c)/dq_k = -(o - p_max(c,k)) for c, k <= attach.
    std::vector<Mat> djo(n_, Mat::Zero(2, n_));
    for (int k = 0; k <= attach; ++k) {
      for (int c = 0; c <= attach; ++c) djo[k].col(c) = -(pose.origin - geo.joint[std::max(c, k)]);
    }

    const Vec2 rx = unit_dir(pose.angle);
    const Vec2 ry = perp(rx);
    // w = z x (R e): coefficient of the first moment in the body's kinetic energy.
    const std::array<Vec2, 2> w = {ry, Vec2(-rx)};
    // dw/dq_k = z x w for k <= attach.
    const std::array<Vec2, 2> dw = {Vec2(-rx), Vec2(-ry)};

    auto& terms = bodies_[b];

    // Mass.
    terms[0].h = jo.transpose() * jo;
    terms[0].g = -(jo.transpose() * grav);
    // First moments.
    for (int a = 0; a < 2; ++a) {
      const Mat cross = jo.transpose() * w[a] * jt;
      terms[1 + a].h = cross + cross.transpose();
      terms[1 + a].g = -grav.dot(w[a]) * jt.transpose();
    }
    // Rotational inertia.
    terms[3].h = jt.transpose() * jt;
    terms[3].g = Vec::Zero(n_);

    for (auto& t : terms) t.dh.assign(n_, Mat::Zero(n_, n_));
    for (int k = 0; k <= attach; ++k) {
      const Mat dm = djo[k].transpose() * jo;
      terms[0].dh[k] = dm + dm.transpose();
      for (int a = 0; a < 2; ++a) {
        const Mat d = djo[k].transpose() * w[a] * jt + jo.transpose() * dw[a] * jt;
        terms[1 + a].dh[k] = d + d.transpose();
      }
    }
  }
}

Mat DynamicsTerms::unit_coriolis(int body, int param, const Vec& qd) const {
  const UnitTerm& t = bodies_[body][param];
  Mat c = Mat::Zero(n_, n_);
  for (int k = 0; k < n_; ++k) {
    if (qd[k] == 0.0) continue;
    for (int i = 0; i < n_; ++i) {
      for (int l = 0; l < n_; ++l) {
        c(i, l) += 0.5 * (t.dh[k](i, l) + t.dh[l](i, k) - t.dh[i](l, k)) * qd[k];
      }
    }
  }
  return c;
}

Mat DynamicsTerms::mass_matrix(const Vec& p) const {
  detail::require_size(p.size(), kParamsPerBody * n_bodies(), "DynamicsTerms::mass_matrix: params");
  Mat h = Mat::Zero(n_, n_);
  for (int b = 0; b < n_bodies(); ++b) {
    for (int j = 0; j < kParamsPerBody; ++j) {
      const double v = p[kParamsPerBody * b + j];
      if (v != 0.0) h += v * bodies_[b][j].h;
    }
  }
  return h;
}

Mat DynamicsTerms::coriolis_matrix(const Vec& p, const Vec& qd) const {
  detail::require_size(p.size(), kParamsPerBody * n_bodies(), "DynamicsTerms::coriolis_matrix: params");
  detail::require_size(qd.size(), n_, "DynamicsTerms::coriolis_matrix: qd");
  Mat c = Mat::Zero(n_, n_);
  for (int b = 0; b < n_bodies(); ++b) {
    for (int j = 0; j < kParamsPerBody; ++j) {
      const double v = p[kParamsPerBody * b + j];
      if (v != 0.0) c += v * unit_coriolis(b, j, qd);
    }
  }
  return c;
}

Vec DynamicsTerms::gravity_vector(const Vec& p) const {
  detail::require_size(p.size(), kParamsPerBody * n_bodies(), "DynamicsTerms::gravity_vector: params");
  Vec g = Vec::Zero(n_);
  for (int b = 0; b < n_bodies(); ++b) {
    for (int j = 0; j < kParamsPerBody; ++j) g += p[kParamsPerBody * b + j] * bodies_[b][j].g;
  }
  return g;
}

namespace {

void check_selector(const std::vector<int>& bodies, int n_bodies) {
  detail::require(!bodies.empty(), "regressor: body selector must not be empty");
  for (int b : bodies) detail::require(b >= 0 && b < n_bodies, "regressor: body index out of range");
}

}  // namespace

Mat DynamicsTerms::regressor(const std::vector<int>& bodies, const Vec& qd, const Vec& qr_d,
                             const Vec& qr_dd) const {
  check_selector(bodies, n_bodies());
  detail::require_size(qd.size(), n_, "regressor: qd");
  detail::require_size(qr_d.size(), n_, "regressor: qr_d");
  detail::require_size(qr_dd.size(), n_, "regressor: qr_dd");
  Mat y(n_, kParamsPerBody * static_cast<Eigen::Index>(bodies.size()));
  for (size_t k = 0; k < bodies.size(); ++k) {
    const int b = bodies[k];
    for (int j = 0; j < kParamsPerBody; ++j) {
      const auto& t = bodies_[b][j];
      y.col(kParamsPerBody * static_cast<Eigen::Index>(k) + j) = t.h * qr_dd + unit_coriolis(b, j, qd) * qr_d + t.g;
    }
  }
  return y;
}

Mat DynamicsTerms::momentum_regressor(const std::vector<int>& bodies, const Vec& qd) const {
  check_selector(bodies, n_bodies());
  Mat out(n_, kParamsPerBody * static_cast<Eigen::Index>(bodies.size()));
  for (size_t k = 0; k < bodies.size(); ++k) {
    for (int j = 0; j < kParamsPerBody; ++j) {
      out.col(kParamsPerBody * static_cast<Eigen::Index>(k) + j) = bodies_[bodies[k]][j].h * qd;
    }
  }
  return out;
}

Mat DynamicsTerms::bias_regressor(const std::vector<int>& bodies, const Vec& qd) const {
  check_selector(bodies, n_bodies());
  Mat out(n_, kParamsPerBody * static_cast<Eigen::Index>(bodies.size()));
  for (size_t k = 0; k < bodies.size(); ++k) {
    const int b = bodies[k];
    for (int j = 0; j < kParamsPerBody; ++j) {
      out.col(kParamsPerBody * static_cast<Eigen::Index>(k) + j) =
          bodies_[b][j].g - unit_coriolis(b, j, qd).transpose() * qd;
    }
  }
  return out;
}

Eigen::RowVectorXd DynamicsTerms::kinetic_energy_regressor(const std::vector<int>& bodies, const Vec& qd) const {
  check_selector(bodies, n_bodies());
  Eigen::RowVectorXd out(kParamsPerBody * static_cast<Eigen::Index>(bodies.size()));
  for (size_t k = 0; k < bodies.size(); ++k) {
    for (int j = 0; j < kParamsPerBody; ++j) {
      out[kParamsPerBody * static_cast<Eigen::Index>(k) + j] = 0.5 * qd.dot(bodies_[bodies[k]][j].h * qd);
    }
  }
  return out;
}

Eigen::RowVectorXd DynamicsTerms::gravity_power_regressor(const std::vector<int>& bodies, const Vec& qd) const {
  check_selector(bodies, n_bodies());
  Eigen::RowVectorXd out(kParamsPerBody * static_cast<Eigen::Index>(bodies.size()));
  for (size_t k = 0; k < bodies.size(); ++k) {
    for (int j = 0; j < kParamsPerBody; ++j) {
      out[kParamsPerBody * static_cast<Eigen::Index>(k) + j] = qd.dot(bodies_[bodies[k]][j].g);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Free functions

Mat mass_matrix(const PlanarModel& model, const Vec& q) {
  check_state(model, q, "mass_matrix: q");
  return DynamicsTerms(model, q).mass_matrix(all_body_params(model));
}

Mat coriolis_matrix(const PlanarModel& model, const Vec& q, const Vec& qd) {
  check_state(model, q, "coriolis_matrix: q");
  check_state(model, qd, "coriolis_matrix: qd");
  return DynamicsTerms(model, q).coriolis_matrix(all_body_params(model), qd);
}

Vec gravity_vector(const PlanarModel& model, const Vec& q) {
  check_state(model, q, "gravity_vector: q");
  return DynamicsTerms(model, q).gravity_vector(all_body_params(model));
}

Vec inverse_dynamics(const PlanarModel& model, const Vec& q, const Vec& qd, const Vec& qdd) {
  check_state(model, q, "inverse_dynamics: q");
  check_state(model, qd, "inverse_dynamics: qd");
  check_state(model, qdd, "inverse_dynamics: qdd");
  const DynamicsTerms terms(model, q);
  const Vec p = all_body_params(model);
  return terms.mass_matrix(p) * qdd + terms.coriolis_matrix(p, qd) * qd + terms.gravity_vector(p);
}

Vec forward_dynamics(const PlanarModel& model, const Vec& q, const Vec& qd, const Vec& tau) {
  check_state(model, q, "forward_dynamics: q");
  check_state(model, qd, "forward_dynamics: qd");
  check_state(model, tau, "forward_dynamics: tau");
  const DynamicsTerms terms(model, q);
  const Vec p = all_body_params(model);
  const Mat h = terms.mass_matrix(p);
  Eigen::LLT<Mat> llt(h);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-13) {
    throw SingularMatrixError("forward_dynamics: mass matrix is singular or not positive definite");
  }
  return llt.solve(tau - terms.coriolis_matrix(p, qd) * qd - terms.gravity_vector(p));
}

Mat regressor(const PlanarModel& model, const Vec& q, const Vec& qd, const Vec& qr_d, const Vec& qr_dd,
              const std::vector<int>& bodies) {
  check_state(model, q, "regressor: q");
  check_selector(bodies, model.n_bodies());
  return DynamicsTerms(model, q).regressor(bodies, qd, qr_d, qr_dd);
}

}  // namespace coopadapt
