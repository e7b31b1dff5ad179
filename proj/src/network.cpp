#include "coopadapt/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace coopadapt {

Mat factor_gain(const Mat& k) {
  require_spd(k, "factor_gain: K");
  Eigen::SelfAdjointEigenSolver<Mat> eig(k);
  return eig.operatorSqrt();
}

// ---------------------------------------------------------------------------
// Topology

Topology::Topology(int n_robots, std::vector<Edge> edges) : n_robots_(n_robots), edges_(std::move(edges)) {
  detail::require(n_robots_ >= 1, "Topology: need at least one robot");
  std::vector<EdgeKey> seen;
  for (Edge& e : edges_) {
    detail::require(e.key.i >= 0 && e.key.j < n_robots_ && e.key.i != e.key.j,
                    "Topology: edge endpoints must be distinct robots in range");
    detail::require(std::find(seen.begin(), seen.end(), e.key) == seen.end(), "Topology: duplicate edge");
    seen.push_back(e.key);
    require_spd(e.k_gain, "Topology: edge gain K_ij");
    if (e.g_factor.size() == 0) e.g_factor = factor_gain(e.k_gain);
    detail::require(e.delay_ij_s >= 0.0 && e.delay_ji_s >= 0.0, "Topology: delays must be non-negative");
  }
}

Topology Topology::complete(int n_robots, const Mat& k_gain) {
  std::vector<Edge> edges;
  for (int i = 0; i < n_robots; ++i) {
    for (int j = i + 1; j < n_robots; ++j) edges.push_back(Edge{EdgeKey(i, j), k_gain, {}, 0.0, 0.0});
  }
  return Topology(n_robots, std::move(edges));
}

std::vector<int> Topology::neighbors(int i) const {
  std::vector<int> out;
  for (const Edge& e : edges_) {
    if (e.key.i == i) out.push_back(e.key.j);
    if (e.key.j == i) out.push_back(e.key.i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

const Edge* Topology::find(int i, int j) const {
  const EdgeKey key(i, j);
  for (const Edge& e : edges_) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

bool Topology::is_connected() const {
  std::vector<EdgeKey> keys;
  for (const Edge& e : edges_) keys.push_back(e.key);
  return edges_connect(n_robots_, keys);
}

bool edges_connect(int n, std::span<const EdgeKey> edges) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n;
  for (const EdgeKey& e : edges) {
    if (e.i < 0 || e.j >= n) continue;
    const int a = root(e.i);
    const int b = root(e.j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

// ---------------------------------------------------------------------------
// Coupling terms

namespace {

void check_estimates(int i, std::span<const Vec> estimates) {
  detail::require(i >= 0 && static_cast<size_t>(i) < estimates.size(), "coupling: robot index out of range");
  for (const Vec& a : estimates) detail::require_size(a.size(), estimates[i].size(), "coupling: estimate");
}

}  // namespace

Vec all_to_all_coupling(const Mat& k, int i, std::span<const Vec> estimates) {
  check_estimates(i, estimates);
  detail::require_size(k.rows(), estimates[i].size(), "all_to_all_coupling: K");
  Vec sum = Vec::Zero(estimates[i].size());
  for (const Vec& a : estimates) sum += a - estimates[i];
  return k * sum / static_cast<double>(estimates.size());
}

Vec quorum_coupling(const Mat& k, int i, std::span<const Vec> estimates) {
  check_estimates(i, estimates);
  Vec mean = Vec::Zero(estimates[i].size());
  for (const Vec& a : estimates) mean += a;
  mean /= static_cast<double>(estimates.size());
  return k * (mean - estimates[i]);
}

Vec neighbor_coupling(int i, std::span<const Neighbor> neighbors, std::span<const Vec> estimates) {
  check_estimates(i, estimates);
  Vec out = Vec::Zero(estimates[i].size());
  for (const Neighbor& nb : neighbors) {
    detail::require(nb.id >= 0 && static_cast<size_t>(nb.id) < estimates.size(),
                    "neighbor_coupling: neighbor id " + std::to_string(nb.id) + " out of range");
    out += nb.k_gain * (estimates[nb.id] - estimates[i]);
  }
  return out;
}

Mat block_laplacian(int n_robots, std::span<const std::pair<EdgeKey, Mat>> weighted_edges) {
  detail::require(!weighted_edges.empty(), "block_laplacian: no edges");
  const auto p = weighted_edges.front().second.rows();
  Mat l = Mat::Zero(n_robots * p, n_robots * p);
  for (const auto& [key, k] : weighted_edges) {
    l.block(key.i * p, key.i * p, p, p) += k;
    l.block(key.j * p, key.j * p, p, p) += k;
    l.block(key.i * p, key.j * p, p, p) -= k;
    l.block(key.j * p, key.i * p, p, p) -= k;
  }
  return l;
}

Mat all_to_all_laplacian(int n_robots, const Mat& k) {
  std::vector<std::pair<EdgeKey, Mat>> edges;
  const Mat kn = k / static_cast<double>(n_robots);
  for (int i = 0; i < n_robots; ++i) {
    for (int j = i + 1; j < n_robots; ++j) edges.emplace_back(EdgeKey(i, j), kn);
  }
  if (edges.empty()) return Mat::Zero(k.rows() * n_robots, k.rows() * n_robots);
  return block_laplacian(n_robots, edges);
}

Vec wave_encode(const Mat& g, const Vec& a_hat) {
  detail::require_size(g.rows(), a_hat.size(), "wave_encode: G rows");
  return g.transpose() * a_hat;
}

// ---------------------------------------------------------------------------
// DelayLine

DelayLine::DelayLine(int delay_steps, const Vec& initial) {
  detail::require(delay_steps >= 0, "DelayLine: negative delay");
  buffer_.assign(static_cast<size_t>(delay_steps), initial);
}

Vec DelayLine::push_pop(const Vec& v_now) {
  if (buffer_.empty()) return v_now;
  Vec out = std::move(buffer_[head_]);
  buffer_[head_] = v_now;
  head_ = (head_ + 1) % buffer_.size();
  return out;
}

const Vec& DelayLine::front(const Vec& v_now) const { return buffer_.empty() ? v_now : buffer_[head_]; }

const Vec& DelayLine::at(int k, const Vec& v_now) const {
  const int d = delay_steps();
  detail::require(k >= 0 && k <= d, "DelayLine::at: index out of range");
  if (k == d) return v_now;
  return buffer_[(head_ + static_cast<size_t>(k)) % buffer_.size()];
}

double DelayLine::stored_energy(const Vec& v_now, double h, const Vec& offset) const {
  const int d = delay_steps();
  if (d == 0) return 0.0;
  double sum = 0.0;
  for (int k = 0; k <= d; ++k) {
    const double w = (k == 0 || k == d) ? 0.5 : 1.0;
    sum += w * (at(k, v_now) - offset).squaredNorm();
  }
  return sum * h;
}

int delay_steps(double delay_s, double h) {
  detail::require(h > 0.0, "delay_steps: step must be positive");
  detail::require(delay_s >= 0.0, "delay_steps: delay must be non-negative");
  const double steps = std::round(delay_s / h);
  if (std::abs(steps * h - delay_s) > 1e-9) {
    throw std::invalid_argument("delay " + std::to_string(delay_s) + " s is not a multiple of the step " +
                                std::to_string(h) + " s");
  }
  return static_cast<int>(steps);
}

// ---------------------------------------------------------------------------
// SwitchSchedule

SwitchSchedule::SwitchSchedule(int n_robots, std::vector<ScheduleInterval> intervals, double dwell_s,
                               std::optional<double> period_s)
    : n_robots_(n_robots), intervals_(std::move(intervals)), dwell_s_(dwell_s), period_s_(period_s) {
  detail::require(!intervals_.empty(), "SwitchSchedule: empty schedule");
  detail::require(dwell_s_ > 0.0, "SwitchSchedule: dwell time must be positive");
  detail::require(intervals_.front().start_s == 0.0, "SwitchSchedule: first interval must start at t = 0");
  for (size_t k = 1; k < intervals_.size(); ++k) {
    detail::require(intervals_[k].start_s - intervals_[k - 1].start_s >= dwell_s_ - 1e-12,
                    "SwitchSchedule: switching times violate the dwell time");
  }
  if (period_s_) {
    detail::require(*period_s_ - intervals_.back().start_s >= dwell_s_ - 1e-12,
                    "SwitchSchedule: last interval of the period is shorter than the dwell time");
  }
  for (auto& iv : intervals_) {
    for (const EdgeKey& e : iv.edges) {
      detail::require(e.i >= 0 && e.j < n_robots_ && e.i != e.j, "SwitchSchedule: edge endpoint out of range");
    }
  }
}

size_t SwitchSchedule::interval_index(double t) const {
  double local = t;
  if (period_s_) {
    local = t - std::floor(t / *period_s_) * *period_s_;
    // Guard against fmod-style roundoff putting local at the period boundary.
    if (local >= *period_s_) local = 0.0;
  }
  // Right-continuous: an interval owns its start time.
  size_t idx = 0;
  for (size_t k = 0; k < intervals_.size(); ++k) {
    if (intervals_[k].start_s <= local) idx = k;
  }
  return idx;
}

const std::vector<EdgeKey>& SwitchSchedule::active_edges(double t) const { return intervals_[interval_index(t)].edges; }

std::vector<double> SwitchSchedule::switch_times(double horizon) const {
  std::vector<double> out;
  if (!period_s_) {
    for (size_t k = 1; k < intervals_.size(); ++k) {
      if (intervals_[k].start_s <= horizon) out.push_back(intervals_[k].start_s);
    }
    return out;
  }
  for (long cycle = 0;; ++cycle) {
    const double base = static_cast<double>(cycle) * *period_s_;
    if (base > horizon) break;
    for (size_t k = 0; k < intervals_.size(); ++k) {
      const double t = base + intervals_[k].start_s;
      if (t == 0.0) continue;
      if (t > horizon) return out;
      if (intervals_.size() == 1 && k == 0) continue;  // a single-interval period never switches
      out.push_back(t);
    }
  }
  return out;
}

std::vector<EdgeKey> active_edges(const SwitchSchedule& schedule, double t) { return schedule.active_edges(t); }

ConnectivityReport joint_connectivity_check(const SwitchSchedule& schedule, double horizon) {
  detail::require(horizon > 0.0, "joint_connectivity_check: horizon must be positive");
  ConnectivityReport report;

  std::vector<double> bounds{0.0};
  for (double t : schedule.switch_times(horizon)) {
    if (t < horizon) bounds.push_back(t);
  }
  bounds.push_back(horizon);

  const int n = schedule.n_robots();
  std::vector<EdgeKey> accumulated;
  double window_start = 0.0;
  for (size_t k = 0; k + 1 < bounds.size(); ++k) {
    const double a = bounds[k];
    const double b = bounds[k + 1];
    const auto& edges = schedule.active_edges(a);
    report.intervals.push_back({a, b, edges_connect(n, edges)});

    accumulated.insert(accumulated.end(), edges.begin(), edges.end());
    if (edges_connect(n, accumulated)) {
      report.windows.push_back({window_start, b, true});
      report.max_window_s = std::max(report.max_window_s, b - window_start);
      accumulated.clear();
      window_start = b;
    }
  }
  // A trailing window cut off by the horizon is acceptable while it is no
  // longer than the windows that did close.
  const bool any_closed = !report.windows.empty();
  if (window_start < horizon) report.windows.push_back({window_start, horizon, false});
  report.jointly_connected = any_closed && horizon - window_start <= report.max_window_s;
  return report;
}

}  // namespace coopadapt
