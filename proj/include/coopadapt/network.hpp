#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "coopadapt/types.hpp"

namespace coopadapt {

/// Unordered robot pair, stored with i < j.
struct EdgeKey {
  int i = 0;
  int j = 0;

  EdgeKey() = default;
  EdgeKey(int a, int b) : i(std::min(a, b)), j(std::max(a, b)) {}
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

/// Bidirectional link between two robots.
///
/// K_ij = K_ji is the coupling gain and G its symmetric square root. Delays
/// are per direction: delay_ij_s carries robot i's wave signal to j.
struct Edge {
  EdgeKey key;
  Mat k_gain;
  Mat g_factor;
  double delay_ij_s = 0.0;
  double delay_ji_s = 0.0;
};

/// Symmetric square root G of an SPD matrix K, so that G G^T = K.
Mat factor_gain(const Mat& k);

class Topology {
 public:
  /// Validates SPD gains, T >= 0, endpoints in range and no duplicate edges.
  Topology(int n_robots, std::vector<Edge> edges);

  /// All-to-all graph with the same gain on every edge and no delays.
  static Topology complete(int n_robots, const Mat& k_gain);

  int n_robots() const { return n_robots_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::vector<int> neighbors(int i) const;
  const Edge* find(int i, int j) const;
  bool is_connected() const;

 private:
  int n_robots_;
  std::vector<Edge> edges_;
};

/// Neighbor j of some robot together with the edge gain K_ij.
struct Neighbor {
  int id = 0;
  Mat k_gain;
};

/// (K/n) * sum_j (a_j - a_i): all-to-all coupling input of robot i.
Vec all_to_all_coupling(const Mat& k, int i, std::span<const Vec> estimates);

/// Same coupling expressed through the group mean: K (mean - a_i).
Vec quorum_coupling(const Mat& k, int i, std::span<const Vec> estimates);

/// sum_{j in N_i} K_ij (a_j - a_i).
Vec neighbor_coupling(int i, std::span<const Neighbor> neighbors, std::span<const Vec> estimates);

/// Block Laplacian over matrix-valued edge gains (size n*p square).
Mat block_laplacian(int n_robots, std::span<const std::pair<EdgeKey, Mat>> weighted_edges);

/// Block Laplacian of all-to-all coupling with gain K/n on every pair.
Mat all_to_all_laplacian(int n_robots, const Mat& k);

/// v_ij = G_ji^T a_i.
Vec wave_encode(const Mat& g, const Vec& a_hat);

/// Fixed-delay FIFO of wave samples at a fixed step.
///
/// push_pop(v) returns the sample pushed `delay_steps` calls earlier; the
/// line is pre-filled with the initial sample (constant-history start).
class DelayLine {
 public:
  DelayLine(int delay_steps, const Vec& initial);

  int delay_steps() const { return static_cast<int>(buffer_.size()); }
  Vec push_pop(const Vec& v_now);

  /// Oldest buffered sample (what the next push_pop returns); equals `v_now` when the delay is 0.
  const Vec& front(const Vec& v_now) const;

  /// Buffered sample k steps after the front, k in [0, delay_steps); k == delay_steps gives v_now.
  const Vec& at(int k, const Vec& v_now) const;

  /// Trapezoid integral over the last delay_steps*h seconds of |v - offset|^2,
  /// with `v_now` as the newest sample.
  double stored_energy(const Vec& v_now, double h, const Vec& offset) const;

 private:
  std::vector<Vec> buffer_;
  size_t head_ = 0;
};

/// Delay as an integer number of steps; throws unless within 1e-9 s of a multiple of h.
int delay_steps(double delay_s, double h);

struct ScheduleInterval {
  double start_s = 0.0;
  std::vector<EdgeKey> edges;
};

/// Piecewise-constant, right-continuous sequence of edge sets.
///
/// With a period, the interval list describes one period starting at t=0 and
/// repeats indefinitely; otherwise the last interval extends to infinity.
class SwitchSchedule {
 public:
  SwitchSchedule(int n_robots, std::vector<ScheduleInterval> intervals, double dwell_s,
                 std::optional<double> period_s = std::nullopt);

  int n_robots() const { return n_robots_; }
  double dwell_s() const { return dwell_s_; }
  const std::optional<double>& period_s() const { return period_s_; }
  const std::vector<ScheduleInterval>& intervals() const { return intervals_; }

  const std::vector<EdgeKey>& active_edges(double t) const;

  /// Switching times in (0, horizon].
  std::vector<double> switch_times(double horizon) const;

 private:
  size_t interval_index(double t) const;

  int n_robots_;
  std::vector<ScheduleInterval> intervals_;
  double dwell_s_;
  std::optional<double> period_s_;
};

std::vector<EdgeKey> active_edges(const SwitchSchedule& schedule, double t);

struct ConnectivityWindow {
  double start_s = 0.0;
  double end_s = 0.0;
  bool connected = false;
};

struct ConnectivityReport {
  /// Each constant-topology interval up to the horizon and whether its graph alone is connected.
  std::vector<ConnectivityWindow> intervals;
  /// Greedy consecutive windows whose union graph is connected; a trailing
  /// window that never becomes connected is reported with connected=false.
  std::vector<ConnectivityWindow> windows;
  /// True when windows keep closing up to the horizon (a trailing open window
  /// no longer than the longest closed one is tolerated).
  bool jointly_connected = false;
  /// Longest closed window; convergence needs these uniformly bounded.
  double max_window_s = 0.0;
};

ConnectivityReport joint_connectivity_check(const SwitchSchedule& schedule, double horizon);

/// Whether the edge set connects all `n` robots (union-find).
bool edges_connect(int n, std::span<const EdgeKey> edges);

}  // namespace coopadapt
