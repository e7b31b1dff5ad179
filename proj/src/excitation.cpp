#include "coopadapt/excitation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coopadapt {

GramianWindow::GramianWindow(double window_s, int dim)
    : window_s_(window_s), dim_(dim), integral_(Mat::Zero(dim, dim)) {
  detail::require(window_s > 0.0, "GramianWindow: window length must be positive");
  detail::require(dim > 0, "GramianWindow: dimension must be positive");
}

void GramianWindow::add(double t, const Mat& y) {
  detail::require_size(y.cols(), dim_, "GramianWindow::add: regressor columns");
  add_gram(t, y.transpose() * y);
}

void GramianWindow::add_gram(double t, const Mat& yty) {
  detail::require(yty.rows() == dim_ && yty.cols() == dim_, "GramianWindow::add_gram: shape");
  if (!samples_.empty()) {
    const Sample& last = samples_.back();
    detail::require(t >= last.t, "GramianWindow: time must not decrease");
    integral_ += 0.5 * (t - last.t) * (last.gram + yty);
  }
  samples_.push_back({t, yty});
  // Drop leading segments that fall entirely outside the window.
  while (samples_.size() >= 2 && t - samples_[1].t >= window_s_ - 1e-12) {
    const Sample& a = samples_[0];
    const Sample& b = samples_[1];
    integral_ -= 0.5 * (b.t - a.t) * (a.gram + b.gram);
    samples_.pop_front();
  }
  integral_ = 0.5 * (integral_ + integral_.transpose()).eval();
}

double GramianWindow::span() const { return samples_.size() < 2 ? 0.0 : samples_.back().t - samples_.front().t; }

Mat GramianWindow::average() const {
  const double s = span();
  if (s <= 0.0) return Mat::Zero(dim_, dim_);
  return integral_ / s;
}

namespace {

Eigen::SelfAdjointEigenSolver<Mat> eig_of(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (g + g.transpose()));
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigen decomposition of Gramian failed");
  return eig;
}

}  // namespace

double pe_level(const Mat& gramian) { return std::max(0.0, eig_of(gramian).eigenvalues().minCoeff()); }

double pe_level(const GramianWindow& window) { return pe_level(window.average()); }

Mat collective_gramian(std::span<const GramianWindow> windows) {
  detail::require(!windows.empty(), "collective_gramian: no windows");
  Mat sum = Mat::Zero(windows.front().dim(), windows.front().dim());
  for (const GramianWindow& w : windows) sum += w.average();
  return sum;
}

double collective_pe_level(std::span<const GramianWindow> windows) { return pe_level(collective_gramian(windows)); }

Mat deficiency_directions(const Mat& gramian, double tol) {
  const auto eig = eig_of(gramian);
  const Vec& vals = eig.eigenvalues();
  const double lmax = vals.maxCoeff();
  std::vector<int> keep;
  for (int k = 0; k < vals.size(); ++k) {
    if (lmax <= 0.0 || vals[k] < tol * lmax) keep.push_back(k);
  }
  Mat out(gramian.rows(), static_cast<Eigen::Index>(keep.size()));
  for (size_t c = 0; c < keep.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(keep[c]);
  return out;
}

Mat deficiency_directions(const GramianWindow& window, double tol) {
  detail::require(window.size() >= 2, "deficiency_directions: empty window");
  return deficiency_directions(window.average(), tol);
}

double relative_excitation(const Mat& gramian, const Vec& direction) {
  const double lmax = eig_of(gramian).eigenvalues().maxCoeff();
  if (lmax <= 0.0) return 0.0;
  const Vec d = direction.normalized();
  return d.dot(gramian * d) / lmax;
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::passive: return "passive";
    case Regime::direct: return "direct";
    case Regime::centralized: return "centralized";
    case Regime::consensus: return "consensus";
    case Regime::switching: return "switching";
    case Regime::delayed: return "delayed";
  }
  return "direct";
}

Regime regime_from_string(const std::string& s) {
  for (Regime r : {Regime::passive, Regime::direct, Regime::centralized, Regime::consensus, Regime::switching,
                   Regime::delayed}) {
    if (s == to_string(r)) return r;
  }
  throw std::invalid_argument("unknown regime '" + s +
                              "' (expected passive|direct|centralized|consensus|switching|delayed)");
}

double lyapunov_value(Regime regime, std::span<const RobotEnergyInput> robots, double channel_energy) {
  double v = channel_energy;
  for (size_t i = 0; i < robots.size(); ++i) {
    const RobotEnergyInput& r = robots[i];
    if (r.s.size() > 0) v += 0.5 * r.s.dot(r.h * r.s);
    const bool count_payload = regime != Regime::centralized || i == 0;
    if (count_payload && r.a_tilde.size() > 0) v += 0.5 * r.a_tilde.dot(r.p.ldlt().solve(r.a_tilde));
    if (r.b_tilde.size() > 0) v += 0.5 * r.b_tilde.dot(r.q.ldlt().solve(r.b_tilde));
  }
  return v;
}

ConsensusError consensus_error(std::span<const Vec> estimates) {
  ConsensusError out;
  double stacked = 0.0;
  for (size_t i = 0; i + 1 < estimates.size(); ++i) {
    const double d = (estimates[i + 1] - estimates[i]).norm();
    out.successive.push_back(d);
    stacked += d * d;
  }
  out.stacked_norm = std::sqrt(stacked);
  for (size_t i = 0; i < estimates.size(); ++i) {
    for (size_t j = i + 1; j < estimates.size(); ++j) {
      out.max_pairwise = std::max(out.max_pairwise, (estimates[i] - estimates[j]).norm());
    }
  }
  return out;
}

void LyapunovTrace::add(double t, double v) {
  if (started_) {
    const double dv = v - last_v_;
    const double dt = t - last_t_;
    ++steps_;
    max_increase_ = std::max(max_increase_, dv);
    max_decrease_ = std::min(max_decrease_, dv);
    if (dv > tol_) ++violations_;
    if (dt > 0.0) sum_rate_ += dv / dt;
  }
  started_ = true;
  last_t_ = t;
  last_v_ = v;
}

DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> v, double t0, double t1, double floor) {
  detail::require(t.size() == v.size(), "fit_decay_rate: size mismatch");
  DecayFit out;
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  const double eps = 1e-9 * std::max(1.0, std::abs(t1));
  for (size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t0 - eps || t[k] > t1 + eps || !(v[k] > floor)) continue;
    const double y = std::log(v[k]);
    if (out.samples == 0) out.t_first = t[k];
    out.t_last = t[k];
    st += t[k];
    sy += y;
    stt += t[k] * t[k];
    sty += t[k] * y;
    ++out.samples;
  }
  const double n = out.samples;
  const double den = n * stt - st * st;
  out.rate = (out.samples < 3 || den <= 0.0) ? std::numeric_limits<double>::quiet_NaN() : -(n * sty - st * sy) / den;
  return out;
}

}  // namespace coopadapt
