#include <random>

#include <gtest/gtest.h>

#include "coopadapt/adaptation.hpp"
#include "support.hpp"

using namespace coopadapt;
using namespace coopadapt::testing;

namespace {

Mat random_mat(std::mt19937& rng, int r, int c) {
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = std::uniform_real_distribution<double>(-1, 1)(rng);
  return m;
}

Mat random_spd(std::mt19937& rng, int n) {
  const Mat a = random_mat(rng, n, n);
  return a * a.transpose() + 0.5 * Mat::Identity(n, n);
}

}  // namespace

TEST(Adaptation, DirectWithIdentityGains) {
  Mat y = Mat::Zero(4, 4);
  y.setIdentity();
  Vec s = Vec::Zero(4);
  s[0] = 1.0;
  const Vec rate = direct_update(Mat::Identity(4, 4), y, s);
  EXPECT_EQ(rate, -y.transpose() * s);
}

TEST(Adaptation, CentralizedEqualsStackedRegressor) {
  std::mt19937 rng(1);
  const Mat p = random_spd(rng, 4);
  std::vector<RegressorSample> samples;
  for (int i = 0; i < 3; ++i) samples.push_back({random_mat(rng, 3, 4), random_vec(rng, 3, 1.0)});
  Mat y_stack(9, 4);
  Vec s_stack(9);
  for (int i = 0; i < 3; ++i) {
    y_stack.middleRows(3 * i, 3) = samples[i].y;
    s_stack.segment(3 * i, 3) = samples[i].s;
  }
  EXPECT_LT((centralized_update(p, samples) - (-p * y_stack.transpose() * s_stack)).norm(), 1e-13);
}

TEST(Adaptation, ConsensusMatchesDefinition) {
  std::mt19937 rng(2);
  const Mat p = random_spd(rng, 4), k = random_spd(rng, 4);
  std::vector<Vec> est;
  for (int i = 0; i < 4; ++i) est.push_back(random_vec(rng, 4, 1.0));
  const Mat y = random_mat(rng, 3, 4);
  const Vec s = random_vec(rng, 3, 1.0);
  Vec sum = Vec::Zero(4);
  for (const Vec& a : est) sum += a - est[2];
  const Vec expect = -p * (y.transpose() * s - k / 4.0 * sum);
  EXPECT_LT((consensus_update(p, k, 2, y, s, est) - expect).norm(), 1e-13);
}

TEST(Adaptation, ZeroDelayWavesReduceToSwitchingLaw) {
  std::mt19937 rng(3);
  const Mat p = random_spd(rng, 4);
  std::vector<Vec> est{random_vec(rng, 4, 1.0), random_vec(rng, 4, 1.0), random_vec(rng, 4, 1.0)};
  const Mat k1 = random_spd(rng, 4), k2 = random_spd(rng, 4);
  const Mat y = random_mat(rng, 3, 4);
  const Vec s = random_vec(rng, 3, 1.0);
  // Robot 0 hears robots 1 and 2 with no delay: tau_j0 = G^T a_j, coupling sum G (tau - G^T a_0).
  std::vector<WaveInput> waves;
  for (auto [j, k] : {std::pair{1, k1}, std::pair{2, k2}}) {
    const Mat g = factor_gain(k);
    waves.push_back({g, wave_encode(g, est[j]) - wave_encode(g, est[0])});
  }
  const std::vector<Neighbor> nb{{1, k1}, {2, k2}};
  EXPECT_LT((delayed_update(p, y, s, waves) - switching_update(p, 0, y, s, nb, est)).norm(), 1e-12);
}

TEST(Adaptation, DelayedLawChecksDeclaredNeighbors) {
  const Mat p = Mat::Identity(4, 4);
  const Mat y = Mat::Zero(1, 4);
  const Vec s = Vec::Zero(1);
  const std::vector<int> declared{1, 2};
  const std::vector<std::pair<int, WaveInput>> channels{{1, {Mat::Identity(4, 4), Vec::Ones(4)}}};
  EXPECT_THROW(delayed_update(p, y, s, declared, channels), std::invalid_argument);
}

TEST(Adaptation, CompositeAddsModelingErrorTerm) {
  std::mt19937 rng(4);
  const Mat p = random_spd(rng, 4);
  const Mat y = random_mat(rng, 3, 4), w = random_mat(rng, 3, 4);
  const Vec s = random_vec(rng, 3, 1.0), e = random_vec(rng, 3, 1.0), c = random_vec(rng, 4, 1.0);
  EXPECT_LT((composite_update(p, y, s, w, e, c) - (-p * (y.transpose() * s + w.transpose() * e - c))).norm(), 1e-13);
  // Without a filter sample the law is the direct law plus coupling.
  EXPECT_LT((composite_update(p, y, s, Mat(0, 4), Vec(0), Vec::Zero(4)) - direct_update(p, y, s)).norm(), 1e-15);
}

TEST(Adaptation, CompositeTermIsDissipative) {
  // a~^T W^T e = |W a~|^2 >= 0 when e = W a~.
  std::mt19937 rng(5);
  for (int d = 0; d < 20; ++d) {
    const Mat w = random_mat(rng, 3, 4);
    const Vec at = random_vec(rng, 4, 1.0);
    EXPECT_GE(at.dot(w.transpose() * (w * at)), 0.0);
  }
}

TEST(Adaptation, RobotParameterLaw) {
  std::mt19937 rng(6);
  const Mat q = random_spd(rng, 8), z = random_mat(rng, 2, 8);
  const Vec s = random_vec(rng, 2, 1.0);
  EXPECT_LT((robot_param_update(q, z, s) + q * z.transpose() * s).norm(), 1e-14);
}

TEST(Adaptation, ShapeErrorsThrow) {
  EXPECT_THROW(direct_update(Mat::Identity(4, 4), Mat::Zero(2, 3), Vec::Zero(2)), std::invalid_argument);
  EXPECT_THROW(direct_update(Mat::Identity(4, 4), Mat::Zero(2, 4), Vec::Zero(3)), std::invalid_argument);
  EXPECT_THROW(AdaptationGains(-Mat::Identity(4, 4)), std::invalid_argument);
}
