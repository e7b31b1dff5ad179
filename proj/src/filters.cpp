#include "coopadapt/filters.hpp"

#include <cmath>
#include <string>

namespace coopadapt {

const char* to_string(CompositeKind kind) {
  switch (kind) {
    case CompositeKind::none: return "none";
    case CompositeKind::torque: return "torque";
    case CompositeKind::energy: return "energy";
    case CompositeKind::both: return "both";
  }
  return "none";
}

CompositeKind composite_kind_from_string(const std::string& s) {
  if (s == "none") return CompositeKind::none;
  if (s == "torque") return CompositeKind::torque;
  if (s == "energy") return CompositeKind::energy;
  if (s == "both") return CompositeKind::both;
  throw std::invalid_argument("unknown composite kind '" + s + "' (expected none|torque|energy|both)");
}

const Mat& lp_step(LowPassState& state, const Mat& x) {
  detail::require(state.gamma > 0.0 && state.gamma < 1.0, "lp_step: gamma must lie in (0, 1)");
  if (state.y.size() == 0) state.y = Mat::Zero(x.rows(), x.cols());
  detail::require(state.y.rows() == x.rows() && state.y.cols() == x.cols(), "lp_step: shape mismatch");
  state.y = state.gamma * state.y + (1.0 - state.gamma) * x;
  return state.y;
}

double filter_beta(double gamma, double step_s) {
  detail::require(gamma > 0.0 && gamma < 1.0, "filter_beta: gamma must lie in (0, 1)");
  detail::require(step_s > 0.0, "filter_beta: step must be positive");
  return (1.0 - gamma) / (gamma * step_s);
}

FilteredRegressor::FilteredRegressor(double gamma, double step_s, const Mat& momentum0)
    : beta_(filter_beta(gamma, step_s)), momentum_(momentum0) {
  lp_regressor_ = {gamma, beta_ * momentum0, step_s};
  lp_measurement_ = {gamma, Mat::Zero(momentum0.rows(), 1), step_s};
}

void FilteredRegressor::step(const Mat& momentum, const Mat& bias_avg, const Vec& measurement_avg) {
  detail::require(momentum.rows() == momentum_.rows() && momentum.cols() == momentum_.cols(),
                  "FilteredRegressor::step: momentum shape");
  detail::require(bias_avg.rows() == momentum.rows() && bias_avg.cols() == momentum.cols(),
                  "FilteredRegressor::step: bias shape");
  detail::require_size(measurement_avg.size(), momentum.rows(), "FilteredRegressor::step: measurement");
  momentum_ = momentum;
  lp_step(lp_regressor_, beta_ * momentum - bias_avg);
  lp_step(lp_measurement_, measurement_avg);
  ++samples_;
}

Mat FilteredRegressor::w() const { return beta_ * momentum_ - lp_regressor_.y; }

namespace {

enum class Variant { torque, energy };

std::vector<Mat> build_filtered(const PlanarModel& model, const std::vector<int>& bodies,
                                const std::vector<MotionSample>& history, double gamma, double step_s,
                                Variant variant) {
  detail::require(!history.empty(), "filtered regressor: history must contain at least one sample");
  auto momentum_of = [&](const DynamicsTerms& terms, const Vec& qd) -> Mat {
    if (variant == Variant::torque) return terms.momentum_regressor(bodies, qd);
    return terms.kinetic_energy_regressor(bodies, qd);
  };
  auto bias_of = [&](const DynamicsTerms& terms, const Vec& qd) -> Mat {
    if (variant == Variant::torque) return terms.bias_regressor(bodies, qd);
    return terms.gravity_power_regressor(bodies, qd);
  };

  std::vector<Mat> out;
  out.reserve(history.size());
  DynamicsTerms prev_terms(model, history.front().q);
  Mat prev_bias = bias_of(prev_terms, history.front().qd);
  FilteredRegressor filt(gamma, step_s, momentum_of(prev_terms, history.front().qd));
  out.push_back(filt.w());
  for (size_t k = 1; k < history.size(); ++k) {
    const MotionSample& smp = history[k];
    const DynamicsTerms terms(model, smp.q);
    const Mat bias_now = bias_of(terms, smp.qd);
    Mat bias_avg;
    if (smp.bias_integral.size() > 0) {
      bias_avg = smp.bias_integral / step_s;
    } else {
      bias_avg = 0.5 * (bias_now + prev_bias);
    }
    // The measurement is unused for W; feed zeros of the right size.
    filt.step(momentum_of(terms, smp.qd), bias_avg, Vec::Zero(bias_avg.rows()));
    out.push_back(filt.w());
    prev_bias = bias_now;
  }
  return out;
}

}  // namespace

std::vector<Mat> filtered_torque_regressor(const PlanarModel& model, const std::vector<int>& bodies,
                                           const std::vector<MotionSample>& history, double gamma, double step_s) {
  return build_filtered(model, bodies, history, gamma, step_s, Variant::torque);
}

std::vector<Mat> filtered_energy_regressor(const PlanarModel& model, const std::vector<int>& bodies,
                                           const std::vector<MotionSample>& history, double gamma, double step_s) {
  return build_filtered(model, bodies, history, gamma, step_s, Variant::energy);
}

std::vector<Vec> filter_sequence(double gamma, const std::vector<Vec>& xs) {
  std::vector<Vec> out;
  out.reserve(xs.size());
  LowPassState st{gamma, Mat(), 0.0};
  for (const Vec& x : xs) out.push_back(lp_step(st, x).col(0));
  return out;
}

Vec modeling_error(const Mat& w, const Vec& a_hat, const Vec& filtered_measurement) {
  detail::require_size(w.cols(), a_hat.size(), "modeling_error: W columns vs a_hat");
  detail::require_size(w.rows(), filtered_measurement.size(), "modeling_error: W rows vs measurement");
  return w * a_hat - filtered_measurement;
}

long composite_suppression_samples(double gamma) {
  detail::require(gamma > 0.0 && gamma < 1.0, "composite_suppression_samples: gamma must lie in (0, 1)");
  return static_cast<long>(std::ceil(5.0 / (1.0 - gamma) - 1e-9));
}

}  // namespace coopadapt
