#include "coopadapt/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace coopadapt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// NaN/inf are not JSON; store them as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec_json(const Eigen::Ref<const Vec>& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(num(v[k]));
  return out;
}

json labeled(const Vec4& v) {
  json out = json::object();
  for (int d = 0; d < kParamsPerBody; ++d) out[kParamLabels[d]] = num(v[d]);
  return out;
}

}  // namespace

void write_timeseries_csv(const std::string& path, const TimeSeries& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (size_t c = 0; c < series.columns.size(); ++c) out << (c ? "," : "") << series.columns[c];
  out << '\n';
  std::string line;
  for (const auto& row : series.rows) {
    line.clear();
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) line += ',';
      line += fmt17(row[c]);
    }
    out << line << '\n';
  }
}

TimeSeries read_timeseries_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  TimeSeries ts;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) ts.columns.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.c_str();
    while (*p) {
      char* end = nullptr;
      row.push_back(std::strtod(p, &end));
      if (end == p) throw std::runtime_error("malformed number in '" + path + "'");
      p = end;
      if (*p == ',') ++p;
    }
    if (row.size() != ts.columns.size()) throw std::runtime_error("ragged row in '" + path + "'");
    ts.rows.push_back(std::move(row));
  }
  return ts;
}

std::string summary_json_text(const RunSummary& s) {
  json robots = json::array();
  for (const RobotSummary& r : s.robots) {
    robots.push_back({{"name", r.name},
                      {"param_error_rel", num(r.param_error_rel)},
                      {"a_hat", labeled(r.a_hat)},
                      {"direction_error", labeled(r.direction_error)},
                      {"direction_error_initial", labeled(r.direction_error_initial)},
                      {"s_max_last_5s", num(r.s_max_last_5s)},
                      {"pe_level", num(r.pe_level)},
                      {"relative_excitation", labeled(r.relative_excitation)},
                      {"deficient_directions", r.deficient},
                      {"filter_identity_residual", num(r.filter_identity_residual)}});
  }
  json out = {{"scenario", s.scenario},
              {"regime", s.regime},
              {"t_end", s.t_end},
              {"steps", s.steps},
              {"diverged", s.diverged},
              {"divergence_message", s.divergence_message},
              {"final_param_error_rel", num(s.final_param_error_rel)},
              {"pe_collective", num(s.pe_collective)},
              {"consensus_max", num(s.consensus_max)},
              {"lyapunov",
               {{"step_tolerance", s.lyapunov.tolerance},
                {"steps", s.lyapunov.steps},
                {"violations", s.lyapunov.violations},
                {"max_increase", num(s.lyapunov.max_increase)},
                {"initial", num(s.lyapunov.initial)},
                {"final", num(s.lyapunov.final)}}},
              {"composite_gain_min", num(s.composite_gain_min)},
              {"wall_time_s", s.wall_time_s},
              {"robots", robots}};
  return out.dump(2) + "\n";
}

PeReport pe_report_from_log(const Scenario& sc, const TimeSeries& series) {
  detail::require(!series.rows.empty(), "pe_report: empty log");
  PeReport rep;
  rep.window_s = sc.pe_window_s;
  const int tcol = series.column("t");
  std::vector<GramianWindow> windows;
  for (int i = 0; i < sc.n_robots(); ++i) {
    const RobotConfig& cfg = sc.robots[i];
    const PlanarModel model = cfg.model(sc.gravity_mps2, sc.payload);
    const ControllerGains gains = cfg.gains();
    const int n = model.n_joints();
    const std::string p = "r" + std::to_string(i) + "_";
    const int cq = series.column(p + "q0");
    const int cqd = series.column(p + "qd0");
    const int cs = series.column(p + "s0");
    GramianWindow win(sc.pe_window_s, kParamsPerBody);
    for (const auto& row : series.rows) {
      const double t = row[tcol];
      const Vec q = Eigen::Map<const Vec>(row.data() + cq, n);
      const Vec qd = Eigen::Map<const Vec>(row.data() + cqd, n);
      const Vec s = Eigen::Map<const Vec>(row.data() + cs, n);
      const ReferenceSignal ref = reference(cfg.trajectory, model, t);
      const Vec qr_d = qd - s;
      const Vec qr_dd = ref.qdd - gains.lambda().cwiseProduct(qd - ref.qd);
      const Mat y = regressor(model, q, qd, qr_d, qr_dd, payload_selector(model));
      win.add_gram(t, y.transpose() * y);
    }
    RobotPeReport rr;
    rr.name = cfg.name;
    const Mat g = win.average();
    rr.pe_level = pe_level(g);
    for (int d = 0; d < kParamsPerBody; ++d) {
      rr.relative_excitation[d] = relative_excitation(g, Vec::Unit(kParamsPerBody, d));
      if (rr.relative_excitation[d] <= sc.deficiency_tol) rr.deficient.emplace_back(kParamLabels[d]);
    }
    rr.deficient_basis = deficiency_directions(g, sc.deficiency_tol);
    rep.robots.push_back(std::move(rr));
    windows.push_back(std::move(win));
  }
  rep.t_end = series.rows.back()[tcol];
  rep.t_start = rep.t_end - windows.front().span();
  rep.collective = collective_pe_level(windows);
  return rep;
}

std::string pe_report_text(const PeReport& rep) {
  std::ostringstream os;
  os << "PE window [" << rep.t_start << ", " << rep.t_end << "] s\n";
  for (const RobotPeReport& r : rep.robots) {
    os << r.name << ": lambda_min=" << r.pe_level << "  relative excitation";
    for (int d = 0; d < kParamsPerBody; ++d) os << ' ' << kParamLabels[d] << '=' << r.relative_excitation[d];
    os << "\n  deficient: ";
    if (r.deficient.empty()) os << "none";
    for (size_t k = 0; k < r.deficient.size(); ++k) os << (k ? ", " : "") << r.deficient[k];
    os << '\n';
  }
  os << "collective lambda_min=" << rep.collective << '\n';
  return os.str();
}

std::string pe_report_json_text(const PeReport& rep) {
  json robots = json::array();
  for (const RobotPeReport& r : rep.robots) {
    json basis = json::array();
    for (Eigen::Index c = 0; c < r.deficient_basis.cols(); ++c) basis.push_back(vec_json(r.deficient_basis.col(c)));
    robots.push_back({{"name", r.name},
                      {"pe_level", num(r.pe_level)},
                      {"relative_excitation", labeled(r.relative_excitation)},
                      {"deficient_directions", r.deficient},
                      {"deficient_basis", basis}});
  }
  json out = {{"window_s", rep.window_s},
              {"t_start", rep.t_start},
              {"t_end", rep.t_end},
              {"pe_collective", num(rep.collective)},
              {"robots", robots}};
  return out.dump(2) + "\n";
}

std::string apply_overrides(const std::string& json_text,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
  json root = json::parse(json_text);
  for (const auto& [path, value] : overrides) {
    std::vector<std::string> keys;
    std::stringstream ss(path);
    std::string key;
    while (std::getline(ss, key, '.')) keys.push_back(key);
    if (keys.empty() || path.empty()) throw std::invalid_argument("empty override path");
    json* node = &root;
    for (size_t k = 0; k + 1 < keys.size(); ++k) {
      const std::string& kk = keys[k];
      if (node->is_array()) {
        const size_t idx = std::stoul(kk);
        if (idx >= node->size()) throw std::invalid_argument("override path '" + path + "': index out of range");
        node = &(*node)[idx];
      } else {
        if (!node->is_object()) throw std::invalid_argument("override path '" + path + "' crosses a non-object");
        node = &(*node)[kk];
        if (node->is_null()) *node = json::object();
      }
    }
    json parsed;
    try {
      parsed = json::parse(value);
    } catch (const json::parse_error&) {
      parsed = value;
    }
    if (node->is_array()) {
      const size_t idx = std::stoul(keys.back());
      if (idx >= node->size()) throw std::invalid_argument("override path '" + path + "': index out of range");
      (*node)[idx] = parsed;
    } else {
      (*node)[keys.back()] = parsed;
    }
  }
  return root.dump(2);
}

SweepAxis parse_sweep_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw std::invalid_argument("malformed grid axis '" + spec + "' (want path=v1,v2)");
  SweepAxis axis;
  axis.path = spec.substr(0, eq);
  std::stringstream ss(spec.substr(eq + 1));
  std::string v;
  while (std::getline(ss, v, ',')) {
    if (v.empty()) throw std::invalid_argument("malformed grid axis '" + spec + "': empty value");
    axis.values.push_back(v);
  }
  if (axis.values.empty()) throw std::invalid_argument("malformed grid axis '" + spec + "': no values");
  return axis;
}

int cmd_validate(const std::string& scenario_path, std::ostream& out, std::ostream& err) {
  Scenario sc;
  try {
    sc = load_scenario(scenario_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  const ValidationReport rep = validate_scenario(sc);
  if (rep.connectivity) {
    const ConnectivityReport& c = *rep.connectivity;
    out << "joint connectivity: " << (c.jointly_connected ? "ok" : "FAILED") << " (" << c.windows.size()
        << " windows, longest " << c.max_window_s << " s)\n";
  }
  for (const std::string& n : rep.notes) out << "note: " << n << '\n';
  if (!rep.ok) {
    for (const std::string& e : rep.errors) err << "error: " << e << '\n';
    return 1;
  }
  out << "ok: " << sc.name << " (" << to_string(sc.regime) << ", " << sc.n_robots()
      << (sc.n_robots() == 1 ? " robot, " : " robots, ") << sc.n_steps() << " steps)\n";
  return 0;
}

namespace {

/// Run one scenario into `dir`; returns 0 on success, 2 on divergence.
int run_into(const Scenario& sc, const fs::path& dir, int decimate, RunSummary* summary_out) {
  fs::create_directories(dir);
  write_file(dir / "scenario.resolved", resolved_scenario_text(sc));
  RunOptions opts;
  opts.decimate = decimate;
  const RunResult res = run_scenario(sc, opts);
  write_timeseries_csv((dir / "timeseries.csv").string(), res.series);
  write_file(dir / "summary.json", summary_json_text(res.summary));
  if (summary_out) *summary_out = res.summary;
  return res.summary.diverged ? 2 : 0;
}

}  // namespace

int cmd_run(const std::string& scenario_path, const std::string& out_dir, int decimate, std::ostream& out,
            std::ostream& err) {
  try {
    const Scenario sc = load_scenario(scenario_path);
    RunSummary s;
    const int code = run_into(sc, out_dir, decimate, &s);
    out << sc.name << ": t_end=" << s.t_end << " s  final_param_error_rel=" << s.final_param_error_rel
        << "  consensus_max=" << s.consensus_max << "  V violations=" << s.lyapunov.violations
        << "  wall=" << s.wall_time_s << " s\n";
    if (code != 0) err << "diverged: " << s.divergence_message << '\n';
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_sweep(const std::string& scenario_path, const std::string& out_dir, const std::vector<std::string>& axis_specs,
              int decimate, int jobs, std::ostream& out, std::ostream& err) {
  std::vector<SweepAxis> axes;
  std::string base;
  try {
    for (const std::string& a : axis_specs) axes.push_back(parse_sweep_axis(a));
    base = read_file(scenario_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  // Cross product, last axis fastest.
  struct Point {
    std::vector<std::pair<std::string, std::string>> overrides;
    std::string dir;
  };
  std::vector<Point> points(1);
  for (const SweepAxis& ax : axes) {
    std::vector<Point> next;
    for (const Point& p : points) {
      for (const std::string& v : ax.values) {
        Point q = p;
        q.overrides.emplace_back(ax.path, v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  std::vector<Scenario> scenarios;
  try {
    for (size_t k = 0; k < points.size(); ++k) {
      char idx[16];
      std::snprintf(idx, sizeof idx, "%04zu", k);
      std::string name = std::string("point_") + idx;
      for (const auto& [path, v] : points[k].overrides) name += "__" + path + "=" + v;
      for (char& c : name) {
        if (c == '/' || c == ' ' || c == '[' || c == ']') c = '_';
      }
      points[k].dir = name;
      scenarios.push_back(parse_scenario(apply_overrides(base, points[k].overrides)));
      const ValidationReport rep = validate_scenario(scenarios.back());
      if (!rep.ok) throw ScenarioError("grid point " + name + " is invalid: " + rep.errors.front());
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  std::vector<RunSummary> summaries(points.size());
  std::vector<int> codes(points.size(), 0);
  std::vector<std::string> errors(points.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k = next++; k < points.size(); k = next++) {
      try {
        codes[k] = run_into(scenarios[k], fs::path(out_dir) / points[k].dir, decimate, &summaries[k]);
      } catch (const std::exception& e) {
        codes[k] = 1;
        errors[k] = e.what();
      }
    }
  };
  const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  json index = json::array();
  int worst = 0;
  for (size_t k = 0; k < points.size(); ++k) {
    json params = json::object();
    for (const auto& [path, v] : points[k].overrides) params[path] = v;
    json entry = {{"dir", points[k].dir}, {"params", params}, {"exit_code", codes[k]}};
    if (codes[k] == 1) {
      entry["error"] = errors[k];
    } else {
      entry["summary"] = json::parse(summary_json_text(summaries[k]));
    }
    index.push_back(entry);
    worst = std::max(worst, codes[k]);
    out << points[k].dir << ": "
        << (codes[k] == 1 ? "error: " + errors[k] : "final_param_error_rel=" + fmt17(summaries[k].final_param_error_rel))
        << '\n';
  }
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "index.json", index.dump(2) + "\n");
  return worst;
}

int cmd_pe_report(const std::string& target, const std::string& scenario_path, bool as_json, std::ostream& out,
                  std::ostream& err) {
  try {
    fs::path csv = target;
    if (fs::is_directory(csv)) csv /= "timeseries.csv";
    const fs::path scen = scenario_path.empty() ? csv.parent_path() / "scenario.resolved" : fs::path(scenario_path);
    const Scenario sc = load_scenario(scen.string());
    const PeReport rep = pe_report_from_log(sc, read_timeseries_csv(csv.string()));
    out << (as_json ? pe_report_json_text(rep) : pe_report_text(rep));
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace coopadapt
