#include <cmath>

#include <gtest/gtest.h>

#include "coopadapt/filters.hpp"
#include "support.hpp"

using namespace coopadapt;
using namespace coopadapt::testing;

TEST(Filters, LowPassImpulseResponse) {
  const double gamma = 0.9;
  std::vector<Vec> xs(20, Vec::Zero(1));
  xs[0][0] = 1.0;
  const std::vector<Vec> ys = filter_sequence(gamma, xs);
  for (int k = 0; k < 20; ++k) EXPECT_NEAR(ys[k][0], (1.0 - gamma) * std::pow(gamma, k), 1e-15);
}

TEST(Filters, LowPassUnitDcGain) {
  LowPassState st{0.8, Mat(), 1e-3};
  for (int k = 0; k < 400; ++k) lp_step(st, Mat::Constant(2, 1, 3.0));
  EXPECT_NEAR(st.y(0, 0), 3.0, 1e-12);
}

TEST(Filters, BetaAndSuppression) {
  EXPECT_NEAR(filter_beta(0.9, 1e-3), 0.1 / 0.9e-3, 1e-9);
  EXPECT_EQ(composite_suppression_samples(0.9), 50);
  EXPECT_EQ(composite_suppression_samples(0.5), 10);
  EXPECT_THROW(filter_beta(1.0, 1e-3), std::invalid_argument);
}

TEST(Filters, ModelingErrorExamples) {
  const Mat w = Mat::Identity(2, 4);
  const Vec a = Vec::LinSpaced(4, 1, 4), y = Vec::Constant(2, 0.5);
  EXPECT_EQ(modeling_error(w, a, w * a), Vec::Zero(2));
  EXPECT_EQ(modeling_error(Mat::Zero(2, 4), a, y), -y);
}

namespace {

// Independent closed-form torque run: fine RK4 of a 2-link arm under a smooth open-loop
// torque, with the interval integrals of tau, qd^T tau and the bias columns carried as
// extra quadrature states. Returns samples every T.
struct Recorded {
  std::vector<MotionSample> torque_history, energy_history;
  std::vector<Vec> tau_avg, power_avg;
};

Recorded record(const PlanarModel& model, double T, int substeps, int samples) {
  const int n = model.n_joints();
  const std::vector<int> bodies = all_bodies(model);
  const int nc = kParamsPerBody * static_cast<int>(bodies.size());
  auto torque = [&](double t) {
    Vec tau(n);
    for (int j = 0; j < n; ++j) tau[j] = 2.0 * std::sin(1.3 * t + j) + 0.5 * std::cos(3.1 * t);
    return tau;
  };
  const int dim = 2 * n + n + 1 + n * nc + nc;
  auto f = [&](double t, const Vec& x) {
    const Vec q = x.head(n), qd = x.segment(n, n);
    const Vec tau = torque(t) - 3.0 * qd;  // damping keeps the motion bounded
    Vec dx = Vec::Zero(dim);
    dx.head(n) = qd;
    dx.segment(n, n) = forward_dynamics(model, q, qd, tau);
    const DynamicsTerms terms(model, q);
    int o = 2 * n;
    dx.segment(o, n) = tau;
    o += n;
    dx[o++] = qd.dot(tau);
    const Mat bias = terms.bias_regressor(bodies, qd);
    dx.segment(o, n * nc) = Eigen::Map<const Vec>(bias.data(), bias.size());
    o += n * nc;
    dx.segment(o, nc) = terms.gravity_power_regressor(bodies, qd).transpose();
    return dx;
  };

  Recorded rec;
  Vec x = Vec::Zero(dim);
  x.head(n) = Vec::LinSpaced(n, -1.0, 0.5);
  rec.torque_history.push_back({x.head(n), x.segment(n, n), Mat()});
  rec.energy_history.push_back({x.head(n), x.segment(n, n), Mat()});
  const double h = T / substeps;
  double t = 0.0;
  for (int k = 0; k < samples; ++k) {
    x.tail(dim - 2 * n).setZero();
    for (int m = 0; m < substeps; ++m) {
      const Vec k1 = f(t, x), k2 = f(t + h / 2, x + h / 2 * k1), k3 = f(t + h / 2, x + h / 2 * k2),
                k4 = f(t + h, x + h * k3);
      x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      t += h;
    }
    int o = 2 * n;
    rec.tau_avg.push_back(x.segment(o, n) / T);
    o += n;
    rec.power_avg.push_back(Vec::Constant(1, x[o++] / T));
    const Mat bias_int = Eigen::Map<const Mat>(x.data() + o, n, nc);
    o += n * nc;
    rec.torque_history.push_back({x.head(n), x.segment(n, n), bias_int});
    rec.energy_history.push_back({x.head(n), x.segment(n, n), x.segment(o, nc).transpose()});
  }
  return rec;
}

}  // namespace

TEST(Filters, DiscreteTorqueIdentityHoldsWithoutAcceleration) {
  const PlanarModel model({1.0, 0.8}, {0.0, 0.0}, {{1.0, 0.5, 0.05, 0.4}, {0.8, 0.3, 0.0, 0.15}}, Vec2(0.0, -9.81),
                          BodyParams{0.6, 0.1, 0.02, 0.05});
  const double gamma = 0.9, T = 0.01;
  const Recorded rec = record(model, T, 20, 400);
  const std::vector<Mat> w = filtered_torque_regressor(model, all_bodies(model), rec.torque_history, gamma, T);
  const std::vector<Vec> lp = filter_sequence(gamma, rec.tau_avg);
  const Vec a = all_body_params(model);
  double worst = 0.0;
  for (size_t k = 1; k < w.size(); ++k) worst = std::max(worst, (w[k] * a - lp[k - 1]).cwiseAbs().maxCoeff());
  EXPECT_LT(worst, 1e-9);
}

TEST(Filters, DiscreteEnergyIdentityHoldsWithoutAcceleration) {
  const PlanarModel model({1.0, 0.8}, {0.0, 0.0}, {{1.0, 0.5, 0.05, 0.4}, {0.8, 0.3, 0.0, 0.15}}, Vec2(0.0, -9.81),
                          BodyParams{0.6, 0.1, 0.02, 0.05});
  const double gamma = 0.9, T = 0.01;
  const Recorded rec = record(model, T, 20, 400);
  const std::vector<Mat> w = filtered_energy_regressor(model, all_bodies(model), rec.energy_history, gamma, T);
  const std::vector<Vec> lp = filter_sequence(gamma, rec.power_avg);
  const Vec a = all_body_params(model);
  double worst = 0.0;
  for (size_t k = 1; k < w.size(); ++k) worst = std::max(worst, std::abs((w[k] * a)[0] - lp[k - 1][0]));
  EXPECT_LT(worst, 1e-9);
}

TEST(Filters, TrapezoidBiasIsOnlyApproximate) {
  const PlanarModel model({1.0, 0.8}, {0.0, 0.0}, {{1.0, 0.5, 0.05, 0.4}, {0.8, 0.3, 0.0, 0.15}}, Vec2(0.0, -9.81),
                          BodyParams{0.6, 0.1, 0.02, 0.05});
  const double gamma = 0.9, T = 0.01;
  Recorded rec = record(model, T, 20, 200);
  for (MotionSample& s : rec.torque_history) s.bias_integral.resize(0, 0);
  const std::vector<Mat> w = filtered_torque_regressor(model, all_bodies(model), rec.torque_history, gamma, T);
  const std::vector<Vec> lp = filter_sequence(gamma, rec.tau_avg);
  const Vec a = all_body_params(model);
  double worst = 0.0;
  for (size_t k = 1; k < w.size(); ++k) worst = std::max(worst, (w[k] * a - lp[k - 1]).cwiseAbs().maxCoeff());
  EXPECT_GT(worst, 1e-9);
  EXPECT_LT(worst, 1e-1);
}

TEST(Filters, OnlineFilterMatchesOffline) {
  const PlanarModel model({1.0, 0.8}, {0.0, 0.0}, {{1.0, 0.5, 0.05, 0.4}, {0.8, 0.3, 0.0, 0.15}}, Vec2(0.0, -9.81),
                          BodyParams{0.6, 0.1, 0.02, 0.05});
  const double gamma = 0.9, T = 0.01;
  const Recorded rec = record(model, T, 10, 60);
  const std::vector<int> bodies = all_bodies(model);
  const std::vector<Mat> offline = filtered_torque_regressor(model, bodies, rec.torque_history, gamma, T);
  FilteredRegressor online(gamma, T, DynamicsTerms(model, rec.torque_history[0].q).momentum_regressor(bodies, rec.torque_history[0].qd));
  for (size_t k = 1; k < rec.torque_history.size(); ++k) {
    const MotionSample& s = rec.torque_history[k];
    online.step(DynamicsTerms(model, s.q).momentum_regressor(bodies, s.qd), s.bias_integral / T, rec.tau_avg[k - 1]);
    EXPECT_LT((online.w() - offline[k]).norm(), 1e-12);
  }
  EXPECT_EQ(online.samples(), 60);
  EXPECT_LT((online.filtered_measurement() - filter_sequence(gamma, rec.tau_avg).back()).norm(), 1e-12);
}
