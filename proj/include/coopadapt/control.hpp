#pragma once

#include "coopadapt/dynamics.hpp"

namespace coopadapt {

/// Desired joint trajectory sample at one instant.
struct ReferenceSignal {
  Vec q;
  Vec qd;
  Vec qdd;
};

/// Tracking error bookkeeping; s == q_tilde_dot + lambda*q_tilde by construction.
struct SlidingState {
  Vec q_tilde;
  Vec s;
  Vec qr_dot;
  Vec qr_ddot;
};

/// Lambda (positive diagonal, 1/s) and K_D (SPD, N*m*s/rad).
class ControllerGains {
 public:
  ControllerGains(Vec lambda_diag, Mat kd);
  static ControllerGains uniform(int n, double lambda_per_s, double kd);

  const Vec& lambda() const { return lambda_; }
  const Mat& kd() const { return kd_; }
  int n() const { return static_cast<int>(lambda_.size()); }

 private:
  Vec lambda_;
  Mat kd_;
};

SlidingState sliding_state(const JointState& state, const ReferenceSignal& ref, const ControllerGains& gains);

/// Certainty-equivalence torque with the links treated as known.
///
/// tau = H_hat qr_ddot + C_hat qr_dot + g_hat - K_D s where the hatted terms
/// use the model's link parameters and `a_hat` for the payload slot. The
/// model's own payload (if any) is ignored.
Vec control_torque(const PlanarModel& model, const Vec& a_hat, const SlidingState& sliding,
                   const JointState& state, const ControllerGains& gains);

/// Same, but the link parameters come from the estimate `b_hat` (4 per link).
Vec control_torque(const PlanarModel& model, const Vec& a_hat, const Vec& b_hat, const SlidingState& sliding,
                   const JointState& state, const ControllerGains& gains);

}  // namespace coopadapt
