#pragma once

#include <vector>

#include "coopadapt/dynamics.hpp"

namespace coopadapt {

enum class CompositeKind { none, torque, energy, both };

const char* to_string(CompositeKind kind);
CompositeKind composite_kind_from_string(const std::string& s);

/// Discrete first-order low-pass (1-gamma)/(1 - gamma z^-1) on matrix-valued signals.
struct LowPassState {
  double gamma = 0.9;
  Mat y;
  double step_s = 1e-3;
};

/// y <- gamma*y + (1-gamma)*x; returns the new output.
const Mat& lp_step(LowPassState& state, const Mat& x);

/// Momentum scaling of the discrete summation-by-parts identity, (1-gamma)/(gamma*T).
double filter_beta(double gamma, double step_s);

/// Online construction of a filtered regressor W with W*a = LP[measurement].
///
/// Along the sampled history the torque satisfies, over each sample interval,
///   integral(tau) = [H qd]_k - [H qd]_{k-1} + integral(g - C^T qd),
/// so filtering the interval-averaged torque and summing by parts gives
///   LP[tau]_k = beta*[H qd]_k - LP[beta*H qd - avg(g - C^T qd)]_k,
/// exactly, with no acceleration measurement. The energy variant is the
/// scalar analogue with 0.5 qd^T H qd as momentum and qd^T g as bias.
/// Starting with LP[beta*momentum] = beta*momentum_0 and LP[measurement] = 0
/// makes the identity hold from the first sample.
class FilteredRegressor {
 public:
  FilteredRegressor(double gamma, double step_s, const Mat& momentum0);

  /// Advance one sample. `bias_avg` and `measurement_avg` are interval averages over the step that ended here.
  void step(const Mat& momentum, const Mat& bias_avg, const Vec& measurement_avg);

  Mat w() const;
  Vec filtered_measurement() const { return lp_measurement_.y.col(0); }
  long samples() const { return samples_; }
  double gamma() const { return lp_regressor_.gamma; }
  double beta() const { return beta_; }

 private:
  double beta_;
  Mat momentum_;
  LowPassState lp_regressor_;
  LowPassState lp_measurement_;
  long samples_ = 0;
};

/// One sample of joint motion, with the optional exact integral of the bias
/// term over the interval that ended at this sample (rows x columns of the
/// selected bodies). Without it the integral is approximated by trapezoid.
struct MotionSample {
  Vec q;
  Vec qd;
  Mat bias_integral;
};

/// W per sample for the filtered-torque identity (n rows each); sample 0 has W = 0.
std::vector<Mat> filtered_torque_regressor(const PlanarModel& model, const std::vector<int>& bodies,
                                           const std::vector<MotionSample>& history, double gamma, double step_s);

/// W per sample for the filtered-energy identity (1 row each); sample 0 has W = 0.
std::vector<Mat> filtered_energy_regressor(const PlanarModel& model, const std::vector<int>& bodies,
                                           const std::vector<MotionSample>& history, double gamma, double step_s);

/// Low-pass of a measured sequence, zero initial state.
std::vector<Vec> filter_sequence(double gamma, const std::vector<Vec>& xs);

/// e = W a_hat - y_filt.
Vec modeling_error(const Mat& w, const Vec& a_hat, const Vec& filtered_measurement);

/// Number of initial samples during which composite injection is suppressed (5 filter time constants).
long composite_suppression_samples(double gamma);

struct CompositeSample {
  Mat w;
  Vec e;
  CompositeKind kind = CompositeKind::none;
};

}  // namespace coopadapt
