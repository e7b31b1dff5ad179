#include "coopadapt/adaptation.hpp"

#include <algorithm>
#include <string>

namespace coopadapt {

AdaptationGains::AdaptationGains(Mat p_in, std::optional<Mat> q_in) : p(std::move(p_in)), q_robot(std::move(q_in)) {
  require_spd(p, "AdaptationGains: P");
  if (q_robot) require_spd(*q_robot, "AdaptationGains: Q");
}

namespace {

Vec tracking_term(const Mat& p, const Mat& y, const Vec& s) {
  detail::require_size(y.rows(), s.size(), "update law: Y rows vs s");
  detail::require_size(p.rows(), y.cols(), "update law: P vs Y columns");
  detail::require_size(p.cols(), y.cols(), "update law: P columns");
  return y.transpose() * s;
}

}  // namespace

Vec direct_update(const Mat& p, const Mat& y, const Vec& s) { return -p * tracking_term(p, y, s); }

Vec centralized_update(const Mat& p, std::span<const RegressorSample> samples) {
  detail::require(!samples.empty(), "centralized_update: no robots");
  Vec sum = Vec::Zero(p.rows());
  for (const RegressorSample& r : samples) sum += tracking_term(p, r.y, r.s);
  return -p * sum;
}

Vec consensus_update(const Mat& p, const Mat& k, int i, const Mat& y, const Vec& s, std::span<const Vec> estimates) {
  const Vec track = tracking_term(p, y, s);
  detail::require_size(k.rows(), p.rows(), "consensus_update: K");
  return -p * (track - all_to_all_coupling(k, i, estimates));
}

Vec switching_update(const Mat& p, int i, const Mat& y, const Vec& s, std::span<const Neighbor> neighbors,
                     std::span<const Vec> estimates) {
  const Vec track = tracking_term(p, y, s);
  return -p * (track - neighbor_coupling(i, neighbors, estimates));
}

Vec delayed_update(const Mat& p, const Mat& y, const Vec& s, std::span<const WaveInput> waves) {
  Vec acc = tracking_term(p, y, s);
  for (const WaveInput& w : waves) {
    detail::require_size(w.tau.size(), w.g.cols(), "delayed_update: tau vs G");
    acc -= w.g * w.tau;
  }
  return -p * acc;
}

Vec delayed_update(const Mat& p, const Mat& y, const Vec& s, std::span<const int> declared_neighbors,
                   std::span<const std::pair<int, WaveInput>> channels) {
  std::vector<WaveInput> waves;
  for (int j : declared_neighbors) {
    auto it = std::find_if(channels.begin(), channels.end(), [j](const auto& c) { return c.first == j; });
    if (it == channels.end()) {
      throw std::invalid_argument("delayed_update: no channel for declared neighbor " + std::to_string(j));
    }
    waves.push_back(it->second);
  }
  return delayed_update(p, y, s, waves);
}

Vec composite_update(const Mat& p, const Mat& y, const Vec& s, const Mat& w, const Vec& e, const Vec& coupling) {
  Vec acc = tracking_term(p, y, s);
  detail::require_size(w.rows(), e.size(), "composite_update: W rows vs e");
  detail::require_size(w.cols(), p.rows(), "composite_update: W columns");
  detail::require_size(coupling.size(), p.rows(), "composite_update: coupling");
  acc += w.transpose() * e;
  return -p * (acc - coupling);
}

Vec robot_param_update(const Mat& q, const Mat& z, const Vec& s) { return -q * tracking_term(q, z, s); }

}  // namespace coopadapt
