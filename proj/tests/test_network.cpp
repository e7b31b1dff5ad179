#include <random>

#include <gtest/gtest.h>

#include "coopadapt/network.hpp"
#include "support.hpp"

using namespace coopadapt;
using namespace coopadapt::testing;

namespace {

Mat random_spd(std::mt19937& rng, int n) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = std::uniform_real_distribution<double>(-1, 1)(rng);
  return a * a.transpose() + 0.5 * Mat::Identity(n, n);
}

}  // namespace

TEST(Network, FactorGainSquaresBack) {
  std::mt19937 rng(1);
  for (int d = 0; d < 10; ++d) {
    const Mat k = random_spd(rng, 4);
    const Mat g = factor_gain(k);
    EXPECT_LT((g * g.transpose() - k).norm(), 1e-12);
    EXPECT_LT((g - g.transpose()).norm(), 1e-12);
  }
  EXPECT_THROW(factor_gain(-Mat::Identity(2, 2)), std::invalid_argument);
}

TEST(Network, QuorumFormEqualsPairwiseSum) {
  std::mt19937 rng(2);
  const Mat k = random_spd(rng, 4);
  std::vector<Vec> est;
  for (int i = 0; i < 5; ++i) est.push_back(random_vec(rng, 4, 1.0));
  for (int i = 0; i < 5; ++i) {
    EXPECT_LT((all_to_all_coupling(k, i, est) - quorum_coupling(k, i, est)).norm(), 1e-13);
  }
}

TEST(Network, LaplacianIsPsdWithConsensusNullSpace) {
  std::mt19937 rng(3);
  const Mat k = random_spd(rng, 4);
  const Mat l = all_to_all_laplacian(3, k);
  ASSERT_EQ(l.rows(), 12);
  EXPECT_LT((l - l.transpose()).norm(), 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat> es(l);
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12);
  // Gauge: equal estimates are invisible to the coupling.
  const Vec a = random_vec(rng, 4, 1.0);
  Vec stacked(12);
  stacked << a, a, a;
  EXPECT_LT((l * stacked).norm(), 1e-12);
  // -L a stacks the all-to-all coupling inputs.
  std::vector<Vec> est{random_vec(rng, 4, 1.0), random_vec(rng, 4, 1.0), random_vec(rng, 4, 1.0)};
  stacked << est[0], est[1], est[2];
  const Vec lx = l * stacked;
  for (int i = 0; i < 3; ++i) EXPECT_LT((lx.segment(4 * i, 4) + all_to_all_coupling(k, i, est)).norm(), 1e-12);
}

TEST(Network, DelayLineReturnsImpulseAfterDelay) {
  const Vec zero = Vec::Zero(1);
  DelayLine line(5, zero);
  std::vector<double> out;
  for (int k = 0; k < 10; ++k) out.push_back(line.push_pop(Vec::Constant(1, k == 0 ? 1.0 : 0.0))[0]);
  for (int k = 0; k < 10; ++k) EXPECT_DOUBLE_EQ(out[k], k == 5 ? 1.0 : 0.0) << "step " << k;
}

TEST(Network, ZeroDelayLineIsTransparent) {
  DelayLine line(0, Vec::Zero(2));
  const Vec v = Vec::Constant(2, 3.0);
  EXPECT_EQ(line.push_pop(v), v);
  EXPECT_EQ(line.front(v), v);
}

TEST(Network, DelayStepsMustDivide) {
  EXPECT_EQ(delay_steps(0.25, 1e-3), 250);
  EXPECT_EQ(delay_steps(0.0, 1e-3), 0);
  EXPECT_THROW(delay_steps(0.2505, 1e-3), std::invalid_argument);
  EXPECT_THROW(delay_steps(-0.1, 1e-3), std::invalid_argument);
}

TEST(Network, StoredEnergyOfConstantSignal) {
  DelayLine line(4, Vec::Constant(1, 2.0));
  // |v - 0|^2 = 4 over 4 steps of 0.1 s.
  EXPECT_NEAR(line.stored_energy(Vec::Constant(1, 2.0), 0.1, Vec::Zero(1)), 1.6, 1e-14);
}

TEST(Network, PeriodicScheduleArithmetic) {
  const SwitchSchedule s(3, {{0.0, {EdgeKey(0, 1)}}, {0.5, {EdgeKey(1, 2)}}}, 0.5, 1.0);
  EXPECT_EQ(s.active_edges(3.7).front(), EdgeKey(1, 2));
  EXPECT_EQ(s.active_edges(3.2).front(), EdgeKey(0, 1));
  // Right-continuous at the switching instants.
  EXPECT_EQ(s.active_edges(3.5).front(), EdgeKey(1, 2));
  EXPECT_EQ(s.active_edges(4.0).front(), EdgeKey(0, 1));
  const std::vector<double> times = s.switch_times(2.0);
  ASSERT_EQ(times.size(), 4u);
  EXPECT_DOUBLE_EQ(times[0], 0.5);
  EXPECT_DOUBLE_EQ(times[3], 2.0);
}

TEST(Network, ScheduleRejectsDwellViolation) {
  EXPECT_THROW(SwitchSchedule(2, {{0.0, {EdgeKey(0, 1)}}, {0.1, {}}}, 0.5), std::invalid_argument);
  EXPECT_THROW(SwitchSchedule(2, {{0.0, {EdgeKey(0, 3)}}}, 0.5), std::invalid_argument);
}

TEST(Network, UnionFindConnectivity) {
  const std::vector<EdgeKey> chain{EdgeKey(0, 1), EdgeKey(1, 2)};
  EXPECT_TRUE(edges_connect(3, chain));
  const std::vector<EdgeKey> partial{EdgeKey(0, 1)};
  EXPECT_FALSE(edges_connect(3, partial));
  EXPECT_TRUE(edges_connect(1, {}));
}

TEST(Network, AlternatingEdgesAreJointlyConnected) {
  const SwitchSchedule s(3, {{0.0, {EdgeKey(0, 1)}}, {0.5, {EdgeKey(1, 2)}}}, 0.5, 1.0);
  const ConnectivityReport rep = joint_connectivity_check(s, 10.0);
  EXPECT_TRUE(rep.jointly_connected);
  EXPECT_NEAR(rep.max_window_s, 1.0, 1e-12);
  for (const ConnectivityWindow& w : rep.intervals) EXPECT_FALSE(w.connected);

  const SwitchSchedule isolated(3, {{0.0, {EdgeKey(0, 1)}}, {0.5, {EdgeKey(0, 1)}}}, 0.5, 1.0);
  EXPECT_FALSE(joint_connectivity_check(isolated, 10.0).jointly_connected);
}

TEST(Network, TopologyValidation) {
  const Mat k = Mat::Identity(4, 4);
  EXPECT_THROW(Topology(2, {Edge{EdgeKey(0, 1), k, {}, 0.0, 0.0}, Edge{EdgeKey(1, 0), k, {}, 0.0, 0.0}}),
               std::invalid_argument);
  EXPECT_THROW(Topology(2, {Edge{EdgeKey(0, 1), -k, {}, 0.0, 0.0}}), std::invalid_argument);
  const Topology t = Topology::complete(3, k);
  EXPECT_EQ(t.edges().size(), 3u);
  EXPECT_TRUE(t.is_connected());
  EXPECT_EQ(t.neighbors(0).size(), 2u);
  EXPECT_LT((t.edges()[0].g_factor - k).norm(), 1e-12);
}
