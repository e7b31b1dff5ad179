#pragma once

#include <optional>
#include <span>
#include <vector>

#include "coopadapt/network.hpp"
#include "coopadapt/types.hpp"

namespace coopadapt {

// Parameter update laws. Every function returns a derivative of an estimate;
// integration is the simulator's job. None of them projects or clamps the
// estimate, so nonphysical intermediate values (negative mass) are expected.

/// Per-robot adaptation gains: P for the payload, optional Q for the robot's own links.
struct AdaptationGains {
  Mat p;
  std::optional<Mat> q_robot;

  AdaptationGains(Mat p, std::optional<Mat> q_robot = std::nullopt);
};

/// One robot's contribution to a shared update: regressor Y_i and sliding variable s_i.
struct RegressorSample {
  Mat y;
  Vec s;
};

/// Incoming wave signal tau_ji together with the edge factor G_ji.
struct WaveInput {
  Mat g;
  Vec tau;
};

/// -P Y^T s.
Vec direct_update(const Mat& p, const Mat& y, const Vec& s);

/// -P sum_i Y_i^T s_i (one shared estimate).
Vec centralized_update(const Mat& p, std::span<const RegressorSample> samples);

/// -P_i [Y_i^T s_i - (K/n) sum_j (a_j - a_i)].
Vec consensus_update(const Mat& p, const Mat& k, int i, const Mat& y, const Vec& s, std::span<const Vec> estimates);

/// -P_i [Y_i^T s_i - sum_{j in N_i(t)} K_ij (a_j - a_i)].
Vec switching_update(const Mat& p, int i, const Mat& y, const Vec& s, std::span<const Neighbor> neighbors,
                     std::span<const Vec> estimates);

/// -P_i [Y_i^T s_i - sum_j G_ji tau_ji].
Vec delayed_update(const Mat& p, const Mat& y, const Vec& s, std::span<const WaveInput> waves);

/// Delayed law with the declared neighbor list checked against the supplied channels.
Vec delayed_update(const Mat& p, const Mat& y, const Vec& s, std::span<const int> declared_neighbors,
                   std::span<const std::pair<int, WaveInput>> channels);

/// -P_i [Y_i^T s_i + W_i^T e_i - coupling]; `coupling` comes from any network form (zero when decoupled).
Vec composite_update(const Mat& p, const Mat& y, const Vec& s, const Mat& w, const Vec& e, const Vec& coupling);

/// -Q_i Z_i^T s_i for robot-specific parameters.
Vec robot_param_update(const Mat& q, const Mat& z, const Vec& s);

}  // namespace coopadapt
