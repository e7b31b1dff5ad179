#pragma once

#include <deque>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "coopadapt/network.hpp"
#include "coopadapt/types.hpp"

namespace coopadapt {

/// Sliding trapezoid integral of Y^T Y over the most recent `window_s` seconds.
class GramianWindow {
 public:
  GramianWindow(double window_s, int dim);

  /// Samples must arrive with non-decreasing time.
  void add(double t, const Mat& y);
  void add_gram(double t, const Mat& yty);

  double window_s() const { return window_s_; }
  int dim() const { return dim_; }
  bool empty() const { return samples_.empty(); }
  size_t size() const { return samples_.size(); }
  /// Covered time span (<= window_s).
  double span() const;

  /// Integral of Y^T Y over the covered span (symmetric PSD).
  const Mat& integral() const { return integral_; }
  /// (1/T) * integral with T the window length (the span while the window is still filling).
  Mat average() const;

 private:
  struct Sample {
    double t;
    Mat gram;
  };
  double window_s_;
  int dim_;
  std::deque<Sample> samples_;
  Mat integral_;
};

/// Smallest eigenvalue of the window's averaged Gramian (clamped at 0).
double pe_level(const GramianWindow& window);
double pe_level(const Mat& gramian);

/// Smallest eigenvalue of (1/T) sum_i integral Y_i^T Y_i.
double collective_pe_level(std::span<const GramianWindow> windows);

/// Sum of averaged Gramians across robots.
Mat collective_gramian(std::span<const GramianWindow> windows);

/// Orthonormal columns spanning eigenvectors with eigenvalue < tol * lambda_max (all columns when the Gramian is 0).
Mat deficiency_directions(const Mat& gramian, double tol = 1e-6);
Mat deficiency_directions(const GramianWindow& window, double tol = 1e-6);

/// Rayleigh quotient of direction `d` normalized by lambda_max.
double relative_excitation(const Mat& gramian, const Vec& direction);

enum class Regime { passive, direct, centralized, consensus, switching, delayed };

const char* to_string(Regime r);
Regime regime_from_string(const std::string& s);

/// Everything the Lyapunov monitor needs from one robot at one instant.
struct RobotEnergyInput {
  Mat h;
  Vec s;
  Vec a_tilde;
  Mat p;
  Vec b_tilde;  // empty when robot parameters are known
  Mat q;        // empty when robot parameters are known
};

/// V = sum 0.5 (s^T H s + a~^T P^-1 a~ + b~^T Q^-1 b~) + channel_energy.
///
/// For the centralized regime the payload estimate is shared, so only the
/// first robot's a~/P enter. `channel_energy` is the already-halved sum of
/// stored wave energies for delayed runs.
double lyapunov_value(Regime regime, std::span<const RobotEnergyInput> robots, double channel_energy = 0.0);

struct ConsensusError {
  /// Norms of consecutive differences a_{i+1} - a_i.
  std::vector<double> successive;
  /// Norm of the stacked successive differences.
  double stacked_norm = 0.0;
  /// max_{i,j} |a_i - a_j|.
  double max_pairwise = 0.0;
};

ConsensusError consensus_error(std::span<const Vec> estimates);

/// Per-step record of V with increase statistics.
class LyapunovTrace {
 public:
  explicit LyapunovTrace(double step_tolerance) : tol_(step_tolerance) {}

  void add(double t, double v);

  double step_tolerance() const { return tol_; }
  long violations() const { return violations_; }
  double max_increase() const { return max_increase_; }
  double max_decrease() const { return max_decrease_; }
  long steps() const { return steps_; }
  double last() const { return last_v_; }
  double mean_rate() const { return steps_ > 0 ? sum_rate_ / static_cast<double>(steps_) : 0.0; }

 private:
  double tol_;
  bool started_ = false;
  double last_t_ = 0.0;
  double last_v_ = 0.0;
  long steps_ = 0;
  long violations_ = 0;
  double max_increase_ = -std::numeric_limits<double>::infinity();
  double max_decrease_ = 0.0;
  double sum_rate_ = 0.0;
};

struct DecayFit {
  /// Fitted k in V ~ exp(-k t); NaN when fewer than three samples qualify.
  double rate = 0.0;
  int samples = 0;
  double t_first = 0.0;
  double t_last = 0.0;
};

/// Least-squares slope of -log V over samples with t in [t0, t1] and V > floor.
/// The floor keeps roundoff-level values, which no longer decay, out of the fit.
DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> v, double t0, double t1, double floor);

}  // namespace coopadapt
