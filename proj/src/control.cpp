#include "coopadapt/control.hpp"

namespace coopadapt {

ControllerGains::ControllerGains(Vec lambda_diag, Mat kd) : lambda_(std::move(lambda_diag)), kd_(std::move(kd)) {
  detail::require(lambda_.size() > 0, "ControllerGains: lambda must not be empty");
  detail::require((lambda_.array() > 0.0).all() && lambda_.allFinite(),
                  "ControllerGains: lambda entries must be positive");
  detail::require_size(kd_.rows(), lambda_.size(), "ControllerGains: K_D rows");
  require_spd(kd_, "ControllerGains: K_D");
}

ControllerGains ControllerGains::uniform(int n, double lambda_per_s, double kd) {
  return ControllerGains(Vec::Constant(n, lambda_per_s), kd * Mat::Identity(n, n));
}

SlidingState sliding_state(const JointState& state, const ReferenceSignal& ref, const ControllerGains& gains) {
  const auto n = gains.n();
  detail::require_size(state.q.size(), n, "sliding_state: q");
  detail::require_size(state.qd.size(), n, "sliding_state: qd");
  detail::require_size(ref.q.size(), n, "sliding_state: reference q");
  detail::require_size(ref.qd.size(), n, "sliding_state: reference qd");
  detail::require_size(ref.qdd.size(), n, "sliding_state: reference qdd");

  SlidingState out;
  out.q_tilde = state.q - ref.q;
  const Vec q_tilde_dot = state.qd - ref.qd;
  const auto lambda = gains.lambda().asDiagonal();
  out.qr_dot = ref.qd - lambda * out.q_tilde;
  out.qr_ddot = ref.qdd - lambda * q_tilde_dot;
  out.s = state.qd - out.qr_dot;
  return out;
}

namespace {

Vec feedforward(const DynamicsTerms& terms, const Vec& params, const SlidingState& sl, const JointState& state) {
  return terms.mass_matrix(params) * sl.qr_ddot + terms.coriolis_matrix(params, state.qd) * sl.qr_dot +
         terms.gravity_vector(params);
}

}  // namespace

Vec control_torque(const PlanarModel& model, const Vec& a_hat, const SlidingState& sliding, const JointState& state,
                   const ControllerGains& gains) {
  Vec links(kParamsPerBody * model.n_links());
  for (int i = 0; i < model.n_links(); ++i) links.segment<kParamsPerBody>(kParamsPerBody * i) = model.links()[i].to_vector();
  return control_torque(model, a_hat, links, sliding, state, gains);
}

Vec control_torque(const PlanarModel& model, const Vec& a_hat, const Vec& b_hat, const SlidingState& sliding,
                   const JointState& state, const ControllerGains& gains) {
  const int n = model.n_joints();
  detail::require_size(gains.n(), n, "control_torque: gains");
  detail::require_size(a_hat.size(), kParamsPerBody, "control_torque: a_hat");
  detail::require_size(b_hat.size(), kParamsPerBody * model.n_links(), "control_torque: b_hat");
  detail::require_size(sliding.s.size(), n, "control_torque: s");
  detail::require_size(state.q.size(), n, "control_torque: q");
  detail::require_size(state.qd.size(), n, "control_torque: qd");

  Vec params(kParamsPerBody * model.n_bodies());
  params << b_hat, a_hat;
  const DynamicsTerms terms(model, state.q);
  return feedforward(terms, params, sliding, state) - gains.kd() * sliding.s;
}

}  // namespace coopadapt
