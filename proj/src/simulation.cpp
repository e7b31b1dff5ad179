#include "coopadapt/simulation.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "coopadapt/adaptation.hpp"

namespace coopadapt {

int TimeSeries::column(const std::string& name) const {
  for (size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] == name) return static_cast<int>(k);
  }
  throw std::invalid_argument("TimeSeries: no column '" + name + "'");
}

std::vector<double> TimeSeries::series(const std::string& name) const {
  const int c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

std::vector<std::string> csv_columns(const Scenario& sc) {
  std::vector<std::string> cols{"t"};
  for (int i = 0; i < sc.n_robots(); ++i) {
    const int n = static_cast<int>(sc.robots[i].link_lengths_m.size());
    const std::string p = "r" + std::to_string(i) + "_";
    for (int j = 0; j < n; ++j) cols.push_back(p + "q" + std::to_string(j));
    for (int j = 0; j < n; ++j) cols.push_back(p + "qd" + std::to_string(j));
    for (int j = 0; j < n; ++j) cols.push_back(p + "s" + std::to_string(j));
    for (const char* l : kParamLabels) cols.push_back(p + "ahat_" + l);
  }
  cols.insert(cols.end(), {"V", "pe_collective", "consensus_max"});
  return cols;
}

namespace {

/// Directed wave channel carrying robot `from`'s encoded estimate to robot `to`.
struct Channel {
  int from = 0;
  int to = 0;
  Mat g;
  DelayLine line;
  // Values held over the current step.
  Vec u0;
  Vec u1;
};

struct RobotRuntime {
  RobotRuntime(RobotConfig c, PlanarModel m, ControllerGains g)
      : cfg(std::move(c)), model(std::move(m)), gains(std::move(g)) {}

  RobotConfig cfg;
  PlanarModel model;
  ControllerGains gains;
  int n = 0;
  int ncols = 0;
  Vec true_params;
  Vec link_params;
  std::vector<int> all_bodies;
  std::vector<int> payload_sel;
  std::vector<int> link_sel;
  Mat p;
  Mat p_inv;
  int off_q = 0;
  int off_qd = 0;
  int off_a = -1;
  int off_b = -1;
  int off_aux = -1;

  std::optional<FilteredRegressor> torque_filter;
  std::optional<FilteredRegressor> energy_filter;
  bool composite_active = false;
  Mat w;
  Vec y_filt;
  double filter_residual = std::numeric_limits<double>::quiet_NaN();

  std::optional<GramianWindow> gramian;
  double s_max_tail = 0.0;
  RobotHistory history;
};

/// Quantities of one robot at one (t, x).
struct RobotEval {
  JointState js;
  SlidingState sl;
  Vec a_hat;
  Vec b_hat;
  Mat y_all;
  Mat h;
  Vec bias;  // C qd + g with true parameters
  Vec tau;
};

}  // namespace

struct Simulation::Impl {
  Scenario sc;
  RunOptions opts;
  std::vector<RobotRuntime> robots;
  std::vector<Channel> channels;
  std::optional<SwitchSchedule> schedule;
  std::vector<std::vector<Neighbor>> neighbors;
  Vec a_true;
  Vec x;
  int off_shared = -1;
  long k = 0;
  long n_steps = 0;
  double h = 0.0;
  int decimate = 1;
  long suppression = 0;
  std::optional<LyapunovTrace> trace;
  double v_initial = 0.0;
  double composite_gain_min = std::numeric_limits<double>::quiet_NaN();
  TimeSeries series;

  explicit Impl(const Scenario& scenario, RunOptions options) : sc(scenario), opts(options) {
    h = sc.step_s;
    n_steps = sc.n_steps();
    decimate = opts.decimate > 0 ? opts.decimate : sc.decimate;
    a_true = sc.payload_vector();
    suppression = composite_suppression_samples(sc.composite_gamma);

    int offset = 0;
    for (const RobotConfig& cfg : sc.robots) {
      RobotRuntime r{cfg, cfg.model(sc.gravity_mps2, sc.payload), cfg.gains()};
      r.n = r.model.n_joints();
      r.ncols = kParamsPerBody * r.model.n_bodies();
      r.true_params = all_body_params(r.model);
      r.link_params = r.true_params.head(kParamsPerBody * r.n);
      for (int b = 0; b < r.model.n_bodies(); ++b) r.all_bodies.push_back(b);
      r.payload_sel = payload_selector(r.model);
      r.link_sel = link_bodies(r.model);
      r.p = cfg.p_adapt;
      r.p_inv = cfg.p_adapt.inverse();
      r.off_q = offset;
      r.off_qd = offset + r.n;
      offset += 2 * r.n;
      if (sc.regime != Regime::centralized) {
        r.off_a = offset;
        offset += kParamsPerBody;
      }
      if (cfg.q_robot && sc.regime != Regime::passive) {
        r.off_b = offset;
        offset += kParamsPerBody * r.n;
      }
      if (cfg.composite != CompositeKind::none || opts.record_history) {
        r.off_aux = offset;
        offset += r.n + 1 + r.n * r.ncols + r.ncols;
      }
      if (sc.regime != Regime::passive) r.gramian.emplace(sc.pe_window_s, kParamsPerBody);
      robots.push_back(std::move(r));
    }
    if (sc.regime == Regime::centralized) {
      off_shared = offset;
      offset += kParamsPerBody;
    }

    x = Vec::Zero(offset);
    for (RobotRuntime& r : robots) {
      const ReferenceSignal ref = reference(r.cfg.trajectory, r.model, 0.0);
      x.segment(r.off_q, r.n) = ref.q + r.cfg.q0_offset;
      x.segment(r.off_qd, r.n) = ref.qd + r.cfg.qd0_offset;
      if (r.off_a >= 0) x.segment(r.off_a, kParamsPerBody) = r.cfg.a_hat0;
      if (r.off_b >= 0) x.segment(r.off_b, kParamsPerBody * r.n) = r.cfg.b_hat0;
    }
    if (off_shared >= 0) x.segment(off_shared, kParamsPerBody) = sc.robots.front().a_hat0;

    if (sc.regime == Regime::switching) schedule.emplace(sc.schedule());
    neighbors.assign(robots.size(), {});
    if (sc.regime == Regime::delayed) {
      const Topology topo = sc.topology();
      const int d = delay_steps(sc.network.delay_s, h);
      for (const Edge& e : topo.edges()) {
        for (const auto& [from, to] : {std::pair{e.key.i, e.key.j}, std::pair{e.key.j, e.key.i}}) {
          const Vec v0 = wave_encode(e.g_factor, estimate(from, x));
          channels.push_back(Channel{from, to, e.g_factor, DelayLine(d, v0), {}, {}});
        }
      }
    }

    for (RobotRuntime& r : robots) init_filters(r);

    if (sc.regime != Regime::passive) trace.emplace(sc.v_step_tolerance);
    series.columns = csv_columns(sc);
    monitor_and_log(true);
  }

  Vec estimate(int i, const Vec& state) const {
    if (off_shared >= 0) return state.segment(off_shared, kParamsPerBody);
    return state.segment(robots[i].off_a, kParamsPerBody);
  }

  double time() const { return static_cast<double>(k) * h; }

  void init_filters(RobotRuntime& r) {
    if (r.off_aux < 0) return;
    const Vec q = x.segment(r.off_q, r.n);
    const Vec qd = x.segment(r.off_qd, r.n);
    const DynamicsTerms terms(r.model, q);
    r.torque_filter.emplace(sc.composite_gamma, h, terms.momentum_regressor(r.all_bodies, qd));
    r.energy_filter.emplace(sc.composite_gamma, h, Mat(terms.kinetic_energy_regressor(r.all_bodies, qd)));
    if (opts.record_history) {
      r.history.motion.push_back({q, qd, Mat::Zero(r.n, r.ncols)});
      r.history.tau_avg.push_back(Vec::Zero(r.n));
      r.history.power_avg.push_back(0.0);
    }
    update_composite(r);
  }

  RobotEval evaluate(int i, double t, const Vec& state) const {
    const RobotRuntime& r = robots[i];
    RobotEval ev;
    ev.js = {state.segment(r.off_q, r.n), state.segment(r.off_qd, r.n)};
    const ReferenceSignal ref = reference(r.cfg.trajectory, r.model, t);
    ev.sl = sliding_state(ev.js, ref, r.gains);
    const DynamicsTerms terms(r.model, ev.js.q);
    ev.h = terms.mass_matrix(r.true_params);
    ev.bias = terms.coriolis_matrix(r.true_params, ev.js.qd) * ev.js.qd + terms.gravity_vector(r.true_params);
    if (sc.regime == Regime::passive) {
      ev.tau = Vec::Zero(r.n);
      return ev;
    }
    ev.a_hat = estimate(i, state);
    ev.b_hat = r.off_b >= 0 ? Vec(state.segment(r.off_b, kParamsPerBody * r.n)) : r.link_params;
    ev.y_all = terms.regressor(r.all_bodies, ev.js.qd, ev.sl.qr_dot, ev.sl.qr_ddot);
    Vec est(r.ncols);
    est << ev.b_hat, ev.a_hat;
    ev.tau = ev.y_all * est - r.gains.kd() * ev.sl.s;
    return ev;
  }

  static Mat payload_y(const RobotEval& ev) { return ev.y_all.rightCols(kParamsPerBody); }

  Vec composite_term(const RobotRuntime& r, const Vec& a_hat) const {
    if (!r.composite_active) return Vec::Zero(kParamsPerBody);
    return r.w.transpose() * (r.w * a_hat - r.y_filt);
  }

  Vec derivative(double t, const Vec& state) const {
    Vec dx = Vec::Zero(state.size());
    const int nr = static_cast<int>(robots.size());
    std::vector<Vec> est(nr);
    for (int i = 0; i < nr; ++i) est[i] = estimate(i, state);
    Vec shared_rate;
    if (off_shared >= 0) shared_rate = Vec::Zero(kParamsPerBody);
    const double c = (t - time()) / h;

    for (int i = 0; i < nr; ++i) {
      const RobotRuntime& r = robots[i];
      const RobotEval ev = evaluate(i, t, state);
      Eigen::LLT<Mat> llt(ev.h);
      if (llt.info() != Eigen::Success) throw SingularMatrixError("simulation: mass matrix lost positive definiteness");
      const Vec qdd = llt.solve(ev.tau - ev.bias);
      dx.segment(r.off_q, r.n) = ev.js.qd;
      dx.segment(r.off_qd, r.n) = qdd;

      if (r.off_aux >= 0) {
        const DynamicsTerms terms(r.model, ev.js.q);
        int o = r.off_aux;
        dx.segment(o, r.n) = ev.tau;
        o += r.n;
        dx[o++] = ev.js.qd.dot(ev.tau);
        const Mat bias = terms.bias_regressor(r.all_bodies, ev.js.qd);
        dx.segment(o, r.n * r.ncols) = Eigen::Map<const Vec>(bias.data(), bias.size());
        o += r.n * r.ncols;
        dx.segment(o, r.ncols) = terms.gravity_power_regressor(r.all_bodies, ev.js.qd).transpose();
      }
      if (sc.regime == Regime::passive) continue;

      const Mat y = payload_y(ev);
      const Vec comp = composite_term(r, est[i]);
      if (r.off_b >= 0) {
        dx.segment(r.off_b, kParamsPerBody * r.n) =
            robot_param_update(*r.cfg.q_robot, ev.y_all.leftCols(kParamsPerBody * r.n), ev.sl.s);
      }
      Vec coupling = Vec::Zero(kParamsPerBody);
      switch (sc.regime) {
        case Regime::centralized:
          shared_rate += -r.p * (y.transpose() * ev.sl.s + comp);
          continue;
        case Regime::direct:
          break;
        case Regime::consensus:
          coupling = all_to_all_coupling(sc.network.k_coupling, i, est);
          break;
        case Regime::switching:
          coupling = neighbor_coupling(i, neighbors[i], est);
          break;
        case Regime::delayed:
          for (const Channel& ch : channels) {
            if (ch.to != i) continue;
            const Vec v_out = wave_encode(ch.g, est[i]);
            Vec u;
            if (ch.line.delay_steps() == 0) {
              u = wave_encode(ch.g, est[ch.from]);
            } else if (sc.channel_hold == ChannelHold::linear) {
              u = (1.0 - c) * ch.u0 + c * ch.u1;
            } else {
              u = ch.u0;
            }
            coupling += ch.g * (u - v_out);
          }
          break;
        case Regime::passive:
          break;
      }
      const Mat w = r.composite_active ? r.w : Mat(0, kParamsPerBody);
      const Vec e = r.composite_active ? Vec(r.w * est[i] - r.y_filt) : Vec(0);
      dx.segment(r.off_a, kParamsPerBody) = composite_update(r.p, y, ev.sl.s, w, e, coupling);
    }
    if (off_shared >= 0) dx.segment(off_shared, kParamsPerBody) = shared_rate;
    return dx;
  }

  void freeze_inputs() {
    if (schedule) {
      // Right-continuous schedule, sampled just after the step start to absorb roundoff in k*h.
      const double t = (static_cast<double>(k) + 1e-6) * h;
      const std::vector<EdgeKey>& active = schedule->active_edges(t);
      for (auto& nb : neighbors) nb.clear();
      for (const EdgeKey& e : active) {
        neighbors[e.i].push_back({e.j, sc.network.k_coupling});
        neighbors[e.j].push_back({e.i, sc.network.k_coupling});
      }
    }
    for (Channel& ch : channels) {
      const Vec v_now = wave_encode(ch.g, estimate(ch.from, x));
      ch.u0 = ch.line.front(v_now);
      ch.u1 = ch.line.delay_steps() > 0 ? ch.line.at(1, v_now) : v_now;
    }
  }

  void clear_aux() {
    for (const RobotRuntime& r : robots) {
      if (r.off_aux >= 0) x.segment(r.off_aux, r.n + 1 + r.n * r.ncols + r.ncols).setZero();
    }
  }

  void update_composite(RobotRuntime& r) {
    if (!r.torque_filter) return;
    const CompositeKind kind = r.cfg.composite;
    const int np = kParamsPerBody;
    const int nl = kParamsPerBody * r.n;
    std::vector<Mat> w_parts;
    std::vector<Vec> y_parts;
    auto add = [&](const FilteredRegressor& f) {
      const Mat w_full = f.w();
      w_parts.push_back(w_full.rightCols(np));
      y_parts.push_back(f.filtered_measurement() - w_full.leftCols(nl) * r.link_params);
      if (f.samples() >= suppression) {
        const double res = (w_full * r.true_params - f.filtered_measurement()).cwiseAbs().maxCoeff();
        r.filter_residual = std::isnan(r.filter_residual) ? res : std::max(r.filter_residual, res);
      }
    };
    if (kind == CompositeKind::torque || kind == CompositeKind::both || kind == CompositeKind::none) add(*r.torque_filter);
    if (kind == CompositeKind::energy || kind == CompositeKind::both || kind == CompositeKind::none) add(*r.energy_filter);
    if (kind == CompositeKind::none) {
      r.w.resize(0, np);
      r.y_filt.resize(0);
      r.composite_active = false;
      return;
    }
    Eigen::Index rows = 0;
    for (const Mat& m : w_parts) rows += m.rows();
    r.w.resize(rows, np);
    r.y_filt.resize(rows);
    Eigen::Index at = 0;
    for (size_t p = 0; p < w_parts.size(); ++p) {
      r.w.middleRows(at, w_parts[p].rows()) = w_parts[p];
      r.y_filt.segment(at, y_parts[p].size()) = y_parts[p];
      at += w_parts[p].rows();
    }
    r.composite_active = r.torque_filter->samples() >= suppression;
  }

  void advance_filters() {
    for (RobotRuntime& r : robots) {
      if (r.off_aux < 0) continue;
      const Vec q = x.segment(r.off_q, r.n);
      const Vec qd = x.segment(r.off_qd, r.n);
      int o = r.off_aux;
      const Vec tau_avg = x.segment(o, r.n) / h;
      o += r.n;
      const double power_avg = x[o++] / h;
      const Mat bias_int = Eigen::Map<const Mat>(x.data() + o, r.n, r.ncols);
      o += r.n * r.ncols;
      const Eigen::RowVectorXd power_int = x.segment(o, r.ncols).transpose();
      const DynamicsTerms terms(r.model, q);
      r.torque_filter->step(terms.momentum_regressor(r.all_bodies, qd), bias_int / h, tau_avg);
      r.energy_filter->step(Mat(terms.kinetic_energy_regressor(r.all_bodies, qd)), Mat(power_int / h),
                            Vec::Constant(1, power_avg));
      if (opts.record_history) {
        r.history.motion.push_back({q, qd, bias_int});
        r.history.tau_avg.push_back(tau_avg);
        r.history.power_avg.push_back(power_avg);
      }
      update_composite(r);
    }
  }

  double channel_energy() const {
    double e = 0.0;
    for (const Channel& ch : channels) {
      const Vec v_now = wave_encode(ch.g, estimate(ch.from, x));
      e += 0.5 * ch.line.stored_energy(v_now, h, wave_encode(ch.g, a_true));
    }
    return e;
  }

  double mechanical_energy(const RobotRuntime& r, const RobotEval& ev) const {
    double pe = 0.0;
    for (int b = 0; b < r.model.n_bodies(); ++b) {
      const BodyPose pose = body_pose(r.model, ev.js.q, b);
      const BodyParams p = r.model.body_params(b);
      const Vec2 com_moment = p.m * pose.origin + Eigen::Rotation2Dd(pose.angle) * Vec2(p.hx, p.hy);
      pe -= r.model.gravity().dot(com_moment);
    }
    return 0.5 * ev.js.qd.dot(ev.h * ev.js.qd) + pe;
  }

  double lyapunov(const std::vector<RobotEval>& evs) const {
    if (sc.regime == Regime::passive) {
      double e = 0.0;
      for (size_t i = 0; i < robots.size(); ++i) e += mechanical_energy(robots[i], evs[i]);
      return e;
    }
    std::vector<RobotEnergyInput> in;
    for (size_t i = 0; i < robots.size(); ++i) {
      const RobotRuntime& r = robots[i];
      RobotEnergyInput e{evs[i].h, evs[i].sl.s, evs[i].a_hat - a_true, r.p, {}, {}};
      if (r.off_b >= 0) {
        e.b_tilde = evs[i].b_hat - r.link_params;
        e.q = *r.cfg.q_robot;
      }
      in.push_back(std::move(e));
    }
    return lyapunov_value(sc.regime, in, channel_energy());
  }

  std::vector<RobotEval> evaluate_all() const {
    std::vector<RobotEval> evs;
    for (size_t i = 0; i < robots.size(); ++i) evs.push_back(evaluate(static_cast<int>(i), time(), x));
    return evs;
  }

  void monitor_and_log(bool force_log) {
    const double t = time();
    const std::vector<RobotEval> evs = evaluate_all();
    const double v = lyapunov(evs);
    if (k == 0) v_initial = v;
    if (trace) trace->add(t, v);

    std::vector<Vec> est;
    double gain = 0.0;
    bool any_composite = false;
    for (size_t i = 0; i < robots.size(); ++i) {
      RobotRuntime& r = robots[i];
      if (sc.regime != Regime::passive) {
        est.push_back(evs[i].a_hat);
        const Mat y = payload_y(evs[i]);
        r.gramian->add_gram(t, y.transpose() * y);
        if (r.composite_active) {
          any_composite = true;
          const Vec a_tilde = evs[i].a_hat - a_true;
          gain += a_tilde.dot(composite_term(r, evs[i].a_hat));
        }
      }
      if (t >= sc.duration_s - 5.0 - 1e-9) r.s_max_tail = std::max(r.s_max_tail, evs[i].sl.s.norm());
    }
    if (any_composite) composite_gain_min = std::isnan(composite_gain_min) ? gain : std::min(composite_gain_min, gain);

    if (!(force_log || k % decimate == 0 || k == n_steps)) return;
    std::vector<double> row;
    row.reserve(series.columns.size());
    row.push_back(t);
    for (size_t i = 0; i < robots.size(); ++i) {
      const RobotEval& ev = evs[i];
      for (int j = 0; j < ev.js.q.size(); ++j) row.push_back(ev.js.q[j]);
      for (int j = 0; j < ev.js.qd.size(); ++j) row.push_back(ev.js.qd[j]);
      for (int j = 0; j < ev.sl.s.size(); ++j) row.push_back(ev.sl.s[j]);
      const Vec a = sc.regime == Regime::passive ? Vec(Vec::Zero(kParamsPerBody)) : ev.a_hat;
      for (int j = 0; j < kParamsPerBody; ++j) row.push_back(a[j]);
    }
    row.push_back(v);
    row.push_back(pe_collective());
    row.push_back(est.empty() ? 0.0 : consensus_error(est).max_pairwise);
    series.rows.push_back(std::move(row));
  }

  double pe_collective() const {
    if (sc.regime == Regime::passive) return 0.0;
    std::vector<GramianWindow> ws;
    for (const RobotRuntime& r : robots) ws.push_back(*r.gramian);
    return collective_pe_level(ws);
  }

  void check_finite() const {
    const double lim = sc.divergence_limit;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      if (!std::isfinite(x[j])) throw DivergenceError("non-finite state component " + std::to_string(j), time());
    }
    for (const RobotRuntime& r : robots) {
      const double m = std::max(x.segment(r.off_q, 2 * r.n).cwiseAbs().maxCoeff(),
                                r.off_a >= 0 ? x.segment(r.off_a, kParamsPerBody).cwiseAbs().maxCoeff() : 0.0);
      if (m > lim) throw DivergenceError("state exceeded the divergence limit", time());
    }
  }

  void step() {
    if (k >= n_steps) throw std::logic_error("Simulation::step: horizon reached");
    freeze_inputs();
    std::vector<Vec> v_start;
    for (const Channel& ch : channels) v_start.push_back(wave_encode(ch.g, estimate(ch.from, x)));
    clear_aux();

    const double t = time();
    const Vec k1 = derivative(t, x);
    const Vec k2 = derivative(t + 0.5 * h, x + 0.5 * h * k1);
    const Vec k3 = derivative(t + 0.5 * h, x + 0.5 * h * k2);
    const Vec k4 = derivative(t + h, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    for (size_t c = 0; c < channels.size(); ++c) channels[c].line.push_pop(v_start[c]);
    ++k;
    check_finite();
    advance_filters();
    monitor_and_log(false);
  }
};

Simulation::Simulation(const Scenario& scenario, RunOptions options)
    : impl_(std::make_unique<Impl>(scenario, options)) {}
Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

void Simulation::step() { impl_->step(); }
double Simulation::time() const { return impl_->time(); }
long Simulation::step_index() const { return impl_->k; }
const Scenario& Simulation::scenario() const { return impl_->sc; }
const Vec& Simulation::state() const { return impl_->x; }

Vec Simulation::q(int i) const { return impl_->x.segment(impl_->robots.at(i).off_q, impl_->robots.at(i).n); }
Vec Simulation::qd(int i) const { return impl_->x.segment(impl_->robots.at(i).off_qd, impl_->robots.at(i).n); }
Vec Simulation::a_hat(int i) const {
  (void)impl_->robots.at(i);
  return impl_->estimate(i, impl_->x);
}
Vec Simulation::b_hat(int i) const {
  const RobotRuntime& r = impl_->robots.at(i);
  return r.off_b >= 0 ? Vec(impl_->x.segment(r.off_b, kParamsPerBody * r.n)) : r.link_params;
}
Vec Simulation::sliding(int i) const { return impl_->evaluate(i, impl_->time(), impl_->x).sl.s; }
double Simulation::lyapunov() const { return impl_->lyapunov(impl_->evaluate_all()); }

RunResult Simulation::run() {
  Impl& s = *impl_;
  const auto start = std::chrono::steady_clock::now();
  RunResult out;
  try {
    while (s.k < s.n_steps) s.step();
  } catch (const DivergenceError& e) {
    out.summary.diverged = true;
    out.summary.divergence_message = std::string(e.what()) + " at t=" + std::to_string(e.time()) + " s";
  } catch (const SingularMatrixError& e) {
    out.summary.diverged = true;
    out.summary.divergence_message = std::string(e.what()) + " at t=" + std::to_string(s.time()) + " s";
  }
  RunSummary& sum = out.summary;
  sum.scenario = s.sc.name;
  sum.regime = to_string(s.sc.regime);
  sum.t_end = s.time();
  sum.steps = s.k;
  const double a_norm = s.a_true.norm();
  std::vector<Vec> est;
  for (size_t i = 0; i < s.robots.size(); ++i) {
    const RobotRuntime& r = s.robots[i];
    RobotSummary rs;
    rs.name = r.cfg.name;
    rs.s_max_last_5s = r.s_max_tail;
    rs.filter_identity_residual = r.filter_residual;
    if (s.sc.regime != Regime::passive) {
      const Vec a = s.estimate(static_cast<int>(i), s.x);
      est.push_back(a);
      rs.a_hat = a;
      rs.direction_error = (a - s.a_true).cwiseAbs();
      const Vec a0 = s.sc.regime == Regime::centralized ? s.sc.robots.front().a_hat0 : r.cfg.a_hat0;
      rs.direction_error_initial = (a0 - s.a_true).cwiseAbs();
      rs.param_error_rel = (a - s.a_true).norm() / a_norm;
      sum.final_param_error_rel = std::max(sum.final_param_error_rel, rs.param_error_rel);
      rs.gramian = r.gramian->average();
      rs.pe_level = pe_level(Mat(rs.gramian));
      for (int d = 0; d < kParamsPerBody; ++d) {
        rs.relative_excitation[d] = relative_excitation(rs.gramian, Vec::Unit(kParamsPerBody, d));
        if (rs.relative_excitation[d] <= s.sc.deficiency_tol) rs.deficient.emplace_back(kParamLabels[d]);
      }
    }
    sum.robots.push_back(std::move(rs));
  }
  sum.pe_collective = s.pe_collective();
  sum.consensus_max = est.empty() ? 0.0 : consensus_error(est).max_pairwise;
  if (s.trace) {
    sum.lyapunov = {s.trace->step_tolerance(), s.trace->steps(), s.trace->violations(),
                    s.trace->steps() > 0 ? s.trace->max_increase() : 0.0, s.v_initial, s.trace->last()};
  }
  sum.composite_gain_min = s.composite_gain_min;
  sum.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.series = std::move(s.series);
  for (RobotRuntime& r : s.robots) out.history.push_back(std::move(r.history));
  return out;
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  const ValidationReport rep = validate_scenario(scenario);
  if (!rep.ok) {
    std::string msg = "scenario '" + scenario.name + "' is invalid:";
    for (const std::string& e : rep.errors) msg += "\n  - " + e;
    throw ScenarioError(msg);
  }
  Simulation sim(scenario, options);
  return sim.run();
}

}  // namespace coopadapt
