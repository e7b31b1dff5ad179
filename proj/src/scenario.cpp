#include "coopadapt/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace coopadapt {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) { throw ScenarioError(where + ": " + msg); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key())) fail(where, "unknown key '" + it.key() + "'");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj[key], where + "." + key) : fallback;
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

/// Scalar -> s*I, flat list -> diagonal, nested list -> full matrix.
Mat matrix(const json& j, int dim, const std::string& where) {
  if (j.is_number()) return j.get<double>() * Mat::Identity(dim, dim);
  if (!j.is_array()) fail(where, "expected a number, a diagonal list or a nested matrix");
  if (!j.empty() && j[0].is_array()) {
    Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    for (size_t r = 0; r < j.size(); ++r) {
      const auto row = numbers(j[r], where + "[" + std::to_string(r) + "]");
      if (static_cast<Eigen::Index>(row.size()) != m.cols()) fail(where, "ragged matrix rows");
      for (size_t c = 0; c < row.size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
    if (m.rows() != dim || m.cols() != dim) fail(where, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
    return m;
  }
  const auto d = numbers(j, where);
  if (static_cast<int>(d.size()) != dim) fail(where, "expected " + std::to_string(dim) + " diagonal entries");
  return to_vec(d).asDiagonal();
}

json matrix_json(const Mat& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

json vec_json(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

BodyParams body(const json& j, const std::string& where) {
  check_keys(j, where, {"mass_kg", "hx_kgm", "hy_kgm", "izz_kgm2"});
  return {number_or(j, "mass_kg", 0.0, where), number_or(j, "hx_kgm", 0.0, where), number_or(j, "hy_kgm", 0.0, where),
          number_or(j, "izz_kgm2", 0.0, where)};
}

json body_json(const BodyParams& p) {
  return {{"mass_kg", p.m}, {"hx_kgm", p.hx}, {"hy_kgm", p.hy}, {"izz_kgm2", p.izz}};
}

std::vector<EdgeKey> edge_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a list of [i, j] pairs");
  std::vector<EdgeKey> out;
  for (size_t k = 0; k < j.size(); ++k) {
    const auto pair = numbers(j[k], where + "[" + std::to_string(k) + "]");
    if (pair.size() != 2) fail(where, "each edge is a pair [i, j]");
    out.emplace_back(static_cast<int>(pair[0]), static_cast<int>(pair[1]));
  }
  return out;
}

json edges_json(const std::vector<EdgeKey>& edges) {
  json out = json::array();
  for (const EdgeKey& e : edges) out.push_back({e.i, e.j});
  return out;
}

SinusoidChannel channel(const json& j, const std::string& where) {
  check_keys(j, where, {"offset", "terms"});
  SinusoidChannel c;
  c.offset = number_or(j, "offset", 0.0, where);
  if (j.contains("terms")) {
    if (!j["terms"].is_array()) fail(where + ".terms", "expected an array");
    for (size_t k = 0; k < j["terms"].size(); ++k) {
      const json& t = j["terms"][k];
      const std::string w = where + ".terms[" + std::to_string(k) + "]";
      check_keys(t, w, {"amplitude", "freq_hz", "phase_rad"});
      c.terms.push_back({number_or(t, "amplitude", 0.0, w), number_or(t, "freq_hz", 0.0, w),
                         number_or(t, "phase_rad", 0.0, w)});
    }
  }
  return c;
}

TrajectorySpec trajectory(const json& j, const std::string& where) {
  check_keys(j, where, {"mode", "elbow", "channels"});
  TrajectorySpec spec;
  try {
    spec.mode = trajectory_mode_from_string(j.value("mode", std::string("joint")));
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  spec.elbow = static_cast<int>(number_or(j, "elbow", 1.0, where));
  if (!j.contains("channels") || !j["channels"].is_array()) fail(where, "missing 'channels' array");
  for (size_t k = 0; k < j["channels"].size(); ++k) {
    spec.channels.push_back(channel(j["channels"][k], where + ".channels[" + std::to_string(k) + "]"));
  }
  return spec;
}

json trajectory_json(const TrajectorySpec& spec) {
  json chans = json::array();
  for (const SinusoidChannel& c : spec.channels) {
    json terms = json::array();
    for (const Sinusoid& s : c.terms) {
      terms.push_back({{"amplitude", s.amplitude}, {"freq_hz", s.freq_hz}, {"phase_rad", s.phase_rad}});
    }
    chans.push_back({{"offset", c.offset}, {"terms", terms}});
  }
  return {{"mode", to_string(spec.mode)}, {"elbow", spec.elbow}, {"channels", chans}};
}

RobotConfig robot(const json& j, int index) {
  const std::string where = "robots[" + std::to_string(index) + "]";
  check_keys(j, where,
             {"name", "link_lengths_m", "joint_offsets_rad", "links", "payload_mount", "trajectory", "lambda_per_s",
              "kd_nms_per_rad", "p_adapt", "q_robot", "a_hat0", "b_hat0", "composite", "q0_offset_rad",
              "qd0_offset_rad_per_s"});
  RobotConfig r;
  r.name = j.value("name", "robot" + std::to_string(index));
  if (!j.contains("link_lengths_m")) fail(where, "missing 'link_lengths_m'");
  r.link_lengths_m = numbers(j["link_lengths_m"], where + ".link_lengths_m");
  const int n = static_cast<int>(r.link_lengths_m.size());
  if (n < 1) fail(where, "need at least one link");
  r.joint_offsets_rad = j.contains("joint_offsets_rad") ? numbers(j["joint_offsets_rad"], where + ".joint_offsets_rad")
                                                        : std::vector<double>(n, 0.0);
  if (!j.contains("links") || !j["links"].is_array()) fail(where, "missing 'links' array");
  for (size_t k = 0; k < j["links"].size(); ++k) {
    r.links.push_back(body(j["links"][k], where + ".links[" + std::to_string(k) + "]"));
  }
  if (j.contains("payload_mount")) {
    const json& m = j["payload_mount"];
    check_keys(m, where + ".payload_mount", {"offset_m", "angle_rad"});
    if (m.contains("offset_m")) {
      const auto o = numbers(m["offset_m"], where + ".payload_mount.offset_m");
      if (o.size() != 2) fail(where + ".payload_mount.offset_m", "expected [x, y]");
      r.mount.offset_m = {o[0], o[1]};
    }
    r.mount.angle_rad = number_or(m, "angle_rad", 0.0, where + ".payload_mount");
  } else {
    r.mount.offset_m = {r.link_lengths_m.back(), 0.0};
  }
  if (!j.contains("trajectory")) fail(where, "missing 'trajectory'");
  r.trajectory = trajectory(j["trajectory"], where + ".trajectory");
  r.lambda_per_s = j.contains("lambda_per_s") ? Vec(matrix(j["lambda_per_s"], n, where + ".lambda_per_s").diagonal())
                                              : Vec::Constant(n, 4.0);
  r.kd = j.contains("kd_nms_per_rad") ? matrix(j["kd_nms_per_rad"], n, where + ".kd_nms_per_rad")
                                      : Mat(4.0 * Mat::Identity(n, n));
  r.p_adapt = j.contains("p_adapt") ? matrix(j["p_adapt"], kParamsPerBody, where + ".p_adapt")
                                    : Mat(Mat::Identity(kParamsPerBody, kParamsPerBody));
  if (j.contains("q_robot")) r.q_robot = matrix(j["q_robot"], kParamsPerBody * n, where + ".q_robot");
  r.a_hat0 = j.contains("a_hat0") ? to_vec(numbers(j["a_hat0"], where + ".a_hat0")) : Vec(Vec::Zero(kParamsPerBody));
  if (j.contains("b_hat0")) {
    r.b_hat0 = to_vec(numbers(j["b_hat0"], where + ".b_hat0"));
  } else if (r.q_robot) {
    r.b_hat0 = Vec::Zero(kParamsPerBody * n);
  }
  try {
    r.composite = composite_kind_from_string(j.value("composite", std::string("none")));
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  r.q0_offset = j.contains("q0_offset_rad") ? to_vec(numbers(j["q0_offset_rad"], where + ".q0_offset_rad"))
                                            : Vec(Vec::Zero(n));
  r.qd0_offset = j.contains("qd0_offset_rad_per_s")
                     ? to_vec(numbers(j["qd0_offset_rad_per_s"], where + ".qd0_offset_rad_per_s"))
                     : Vec(Vec::Zero(n));
  return r;
}

json robot_json(const RobotConfig& r) {
  json links = json::array();
  for (const BodyParams& b : r.links) links.push_back(body_json(b));
  json out = {{"name", r.name},
              {"link_lengths_m", r.link_lengths_m},
              {"joint_offsets_rad", r.joint_offsets_rad},
              {"links", links},
              {"payload_mount", {{"offset_m", {r.mount.offset_m.x(), r.mount.offset_m.y()}}, {"angle_rad", r.mount.angle_rad}}},
              {"trajectory", trajectory_json(r.trajectory)},
              {"lambda_per_s", vec_json(r.lambda_per_s)},
              {"kd_nms_per_rad", matrix_json(r.kd)},
              {"p_adapt", matrix_json(r.p_adapt)},
              {"a_hat0", vec_json(r.a_hat0)},
              {"composite", to_string(r.composite)},
              {"q0_offset_rad", vec_json(r.q0_offset)},
              {"qd0_offset_rad_per_s", vec_json(r.qd0_offset)}};
  if (r.q_robot) {
    out["q_robot"] = matrix_json(*r.q_robot);
    out["b_hat0"] = vec_json(r.b_hat0);
  }
  return out;
}

/// Shallow merge: keys of `over` replace those of `base`.
json merged(const json& base, const json& over) {
  json out = base;
  for (auto it = over.begin(); it != over.end(); ++it) out[it.key()] = it.value();
  return out;
}

}  // namespace

PlanarModel RobotConfig::model(const Vec2& gravity, const BodyParams& payload) const {
  PayloadMount m = mount;
  return PlanarModel(link_lengths_m, joint_offsets_rad, links, gravity, payload, m);
}

long Scenario::n_steps() const {
  const double ratio = duration_s / step_s;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw ScenarioError("duration_s must be an integer multiple of step_s");
  }
  return static_cast<long>(rounded);
}

Topology Scenario::topology() const {
  std::vector<EdgeKey> keys = network.edges;
  if (keys.empty()) {
    for (int i = 0; i < n_robots(); ++i) {
      for (int j = i + 1; j < n_robots(); ++j) keys.emplace_back(i, j);
    }
  }
  std::vector<Edge> edges;
  for (const EdgeKey& k : keys) edges.push_back(Edge{k, network.k_coupling, {}, network.delay_s, network.delay_s});
  return Topology(n_robots(), std::move(edges));
}

SwitchSchedule Scenario::schedule() const {
  if (network.schedule) {
    const ScheduleConfig& s = *network.schedule;
    return SwitchSchedule(n_robots(), s.intervals, s.dwell_s, s.period_s);
  }
  const Topology topo = topology();
  std::vector<EdgeKey> keys;
  for (const Edge& e : topo.edges()) keys.push_back(e.key);
  return SwitchSchedule(n_robots(), {ScheduleInterval{0.0, keys}}, duration_s);
}

double default_v_step_tolerance(double step_s) {
  // RK4 local error scales as h^5; at h = 1 ms this is 1e-15 per unit of V,
  // i.e. roundoff level, so the floor is the accumulated roundoff of a step.
  const double truncation = std::pow(step_s, 5) * 1e3;
  return 10.0 * std::max(truncation, 1e-12);
}

Scenario parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  check_keys(root, "scenario",
             {"name", "duration_s", "step_s", "gravity_mps2", "payload", "regime", "network", "composite", "monitors",
              "channel_hold", "decimate", "robot_defaults", "robots"});
  Scenario sc;
  sc.name = root.value("name", std::string("scenario"));
  sc.duration_s = number_or(root, "duration_s", 60.0, "scenario");
  sc.step_s = number_or(root, "step_s", 1e-3, "scenario");
  if (!(sc.duration_s > 0.0)) fail("scenario.duration_s", "must be positive");
  if (!(sc.step_s > 0.0)) fail("scenario.step_s", "must be positive");
  if (root.contains("gravity_mps2")) {
    const auto g = numbers(root["gravity_mps2"], "scenario.gravity_mps2");
    if (g.size() != 2) fail("scenario.gravity_mps2", "expected [gx, gy]");
    sc.gravity_mps2 = {g[0], g[1]};
  }
  if (root.contains("payload")) sc.payload = body(root["payload"], "scenario.payload");
  try {
    sc.regime = regime_from_string(root.value("regime", std::string("direct")));
  } catch (const std::invalid_argument& e) {
    fail("scenario.regime", e.what());
  }

  const json defaults = root.value("robot_defaults", json::object());
  if (!defaults.is_object()) fail("scenario.robot_defaults", "expected an object");
  if (!root.contains("robots") || !root["robots"].is_array() || root["robots"].empty()) {
    fail("scenario", "'robots' must be a non-empty array");
  }
  for (size_t k = 0; k < root["robots"].size(); ++k) {
    sc.robots.push_back(robot(merged(defaults, root["robots"][k]), static_cast<int>(k)));
  }

  const json net = root.value("network", json::object());
  check_keys(net, "scenario.network", {"k_coupling", "edges", "delay_s", "schedule"});
  sc.network.k_coupling = net.contains("k_coupling") ? matrix(net["k_coupling"], kParamsPerBody, "network.k_coupling")
                                                     : Mat(5.0 * Mat::Identity(kParamsPerBody, kParamsPerBody));
  if (net.contains("edges")) sc.network.edges = edge_list(net["edges"], "network.edges");
  sc.network.delay_s = number_or(net, "delay_s", 0.0, "network");
  if (net.contains("schedule")) {
    const json& s = net["schedule"];
    check_keys(s, "network.schedule", {"dwell_s", "period_s", "intervals"});
    ScheduleConfig cfg;
    cfg.dwell_s = number_or(s, "dwell_s", 0.0, "network.schedule");
    if (s.contains("period_s")) cfg.period_s = number(s["period_s"], "network.schedule.period_s");
    if (!s.contains("intervals") || !s["intervals"].is_array()) fail("network.schedule", "missing 'intervals' array");
    for (size_t k = 0; k < s["intervals"].size(); ++k) {
      const json& iv = s["intervals"][k];
      const std::string w = "network.schedule.intervals[" + std::to_string(k) + "]";
      check_keys(iv, w, {"start_s", "edges"});
      cfg.intervals.push_back({number_or(iv, "start_s", 0.0, w), iv.contains("edges") ? edge_list(iv["edges"], w + ".edges")
                                                                                      : std::vector<EdgeKey>{}});
    }
    sc.network.schedule = cfg;
  }

  const json comp = root.value("composite", json::object());
  check_keys(comp, "scenario.composite", {"gamma"});
  sc.composite_gamma = number_or(comp, "gamma", 0.9, "composite");

  const json mon = root.value("monitors", json::object());
  check_keys(mon, "scenario.monitors", {"pe_window_s", "deficiency_tol", "v_step_tolerance", "divergence_limit"});
  sc.pe_window_s = number_or(mon, "pe_window_s", 10.0, "monitors");
  sc.deficiency_tol = number_or(mon, "deficiency_tol", 1e-6, "monitors");
  sc.v_step_tolerance = number_or(mon, "v_step_tolerance", default_v_step_tolerance(sc.step_s), "monitors");
  sc.divergence_limit = number_or(mon, "divergence_limit", 1e6, "monitors");

  const std::string hold = root.value("channel_hold", std::string("zoh"));
  if (hold == "zoh") {
    sc.channel_hold = ChannelHold::zoh;
  } else if (hold == "linear") {
    sc.channel_hold = ChannelHold::linear;
  } else {
    fail("scenario.channel_hold", "expected zoh|linear");
  }
  sc.decimate = static_cast<int>(number_or(root, "decimate", 1.0, "scenario"));
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string resolved_scenario_text(const Scenario& sc) {
  json robots = json::array();
  for (const RobotConfig& r : sc.robots) robots.push_back(robot_json(r));
  json net = {{"k_coupling", matrix_json(sc.network.k_coupling)},
              {"edges", edges_json(sc.network.edges)},
              {"delay_s", sc.network.delay_s}};
  if (sc.network.schedule) {
    json ivs = json::array();
    for (const ScheduleInterval& iv : sc.network.schedule->intervals) {
      ivs.push_back({{"start_s", iv.start_s}, {"edges", edges_json(iv.edges)}});
    }
    json s = {{"dwell_s", sc.network.schedule->dwell_s}, {"intervals", ivs}};
    if (sc.network.schedule->period_s) s["period_s"] = *sc.network.schedule->period_s;
    net["schedule"] = s;
  }
  json root = {{"name", sc.name},
               {"duration_s", sc.duration_s},
               {"step_s", sc.step_s},
               {"gravity_mps2", {sc.gravity_mps2.x(), sc.gravity_mps2.y()}},
               {"payload", body_json(sc.payload)},
               {"regime", to_string(sc.regime)},
               {"network", net},
               {"composite", {{"gamma", sc.composite_gamma}}},
               {"monitors",
                {{"pe_window_s", sc.pe_window_s},
                 {"deficiency_tol", sc.deficiency_tol},
                 {"v_step_tolerance", sc.v_step_tolerance},
                 {"divergence_limit", sc.divergence_limit}}},
               {"channel_hold", sc.channel_hold == ChannelHold::zoh ? "zoh" : "linear"},
               {"decimate", sc.decimate},
               {"robots", robots}};
  return root.dump(2) + "\n";
}

namespace {

void check_trajectory_reach(const RobotConfig& r, const PlanarModel& model, double horizon,
                            std::vector<std::string>& errors, const std::string& where) {
  if (r.trajectory.mode == TrajectoryMode::joint) return;
  const double dt = 0.01;
  const long samples = static_cast<long>(std::ceil(horizon / dt));
  Vec prev;
  for (long k = 0; k <= samples; ++k) {
    const double t = std::min(horizon, static_cast<double>(k) * dt);
    try {
      const ReferenceSignal ref = reference(r.trajectory, model, t);
      const double det = payload_jacobian(model, ref.q).determinant();
      if (std::abs(det) < 1e-3) {
        errors.push_back(where + ": trajectory passes near a kinematic singularity at t=" + std::to_string(t) + " s");
        return;
      }
      if (prev.size() > 0 && (ref.q - prev).cwiseAbs().maxCoeff() > 0.5) {
        errors.push_back(where + ": inverse kinematics branch jump at t=" + std::to_string(t) + " s");
        return;
      }
      prev = ref.q;
    } catch (const std::invalid_argument& e) {
      errors.push_back(where + ": trajectory unreachable at t=" + std::to_string(t) + " s (" + e.what() + ")");
      return;
    }
  }
}

}  // namespace

ValidationReport validate_scenario(const Scenario& sc) {
  ValidationReport rep;
  auto err = [&](const std::string& m) { rep.errors.push_back(m); };
  auto guard = [&](const std::string& where, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      err(where + ": " + e.what());
    }
  };

  if (!(sc.duration_s > 0.0)) err("duration_s must be positive");
  if (!(sc.step_s > 0.0)) err("step_s must be positive");
  guard("duration_s", [&] { (void)sc.n_steps(); });
  if (sc.robots.empty()) err("at least one robot is required");
  if (sc.decimate < 1) err("decimate must be >= 1");
  if (!(sc.pe_window_s > 0.0)) err("monitors.pe_window_s must be positive");
  if (!(sc.deficiency_tol > 0.0)) err("monitors.deficiency_tol must be positive");
  if (!(sc.v_step_tolerance >= 0.0)) err("monitors.v_step_tolerance must be non-negative");
  if (!(sc.composite_gamma > 0.0 && sc.composite_gamma < 1.0)) err("composite.gamma must lie in (0, 1)");

  for (int i = 0; i < sc.n_robots(); ++i) {
    const RobotConfig& r = sc.robots[i];
    const std::string where = "robots[" + std::to_string(i) + "]";
    const int n = static_cast<int>(r.link_lengths_m.size());
    std::optional<PlanarModel> model;
    guard(where, [&] { model = r.model(sc.gravity_mps2, sc.payload); });
    guard(where + ".gains", [&] { (void)r.gains(); });
    guard(where + ".p_adapt", [&] { require_spd(r.p_adapt, "P"); });
    if (r.q_robot) {
      guard(where + ".q_robot", [&] { require_spd(*r.q_robot, "Q"); });
      if (r.b_hat0.size() != kParamsPerBody * n) err(where + ".b_hat0 must have 4 entries per link");
      if (r.composite != CompositeKind::none) {
        err(where + ": composite adaptation together with robot-parameter adaptation is not supported");
      }
    }
    if (r.a_hat0.size() != kParamsPerBody) err(where + ".a_hat0 must have 4 entries");
    if (r.q0_offset.size() != n) err(where + ".q0_offset_rad must have one entry per joint");
    if (r.qd0_offset.size() != n) err(where + ".qd0_offset_rad_per_s must have one entry per joint");
    if (sc.regime == Regime::passive && r.composite != CompositeKind::none) {
      err(where + ": composite adaptation needs an adapting regime");
    }
    if (model) {
      guard(where + ".trajectory", [&] { r.trajectory.validate(*model); });
      if (rep.errors.empty()) check_trajectory_reach(r, *model, sc.duration_s, rep.errors, where + ".trajectory");
    }
  }

  const bool has_schedule = sc.network.schedule.has_value();
  switch (sc.regime) {
    case Regime::passive:
    case Regime::direct:
      if (has_schedule) rep.notes.push_back("network.schedule is ignored by this regime");
      break;
    case Regime::centralized:
      for (int i = 1; i < sc.n_robots(); ++i) {
        if (!sc.robots[i].p_adapt.isApprox(sc.robots[0].p_adapt, 0.0)) {
          err("centralized regime shares one estimate, so every robot must use the same p_adapt");
          break;
        }
      }
      for (int i = 1; i < sc.n_robots(); ++i) {
        if (!sc.robots[i].a_hat0.isApprox(sc.robots[0].a_hat0, 0.0)) {
          err("centralized regime shares one estimate, so every robot must use the same a_hat0");
          break;
        }
      }
      break;
    case Regime::consensus:
      guard("network.k_coupling", [&] { require_spd_or_zero(sc.network.k_coupling, "K"); });
      if (!sc.network.edges.empty()) err("consensus regime is all-to-all; give edges via the switching regime instead");
      if (has_schedule) err("consensus regime uses a static all-to-all graph; use the switching regime for a schedule");
      break;
    case Regime::switching:
      if (sc.network.delay_s != 0.0) err("communication delays cannot be combined with a switching topology");
      guard("network", [&] {
        require_spd(sc.network.k_coupling, "K");
        const SwitchSchedule sched = sc.schedule();
        ConnectivityReport conn = joint_connectivity_check(sched, sc.duration_s);
        if (!conn.jointly_connected) {
          err("switching schedule is not jointly connected over the horizon (some robot stays isolated)");
        }
        rep.connectivity = std::move(conn);
      });
      break;
    case Regime::delayed:
      if (has_schedule) err("communication delays cannot be combined with a switching topology");
      guard("network", [&] {
        const Topology topo = sc.topology();
        if (!topo.is_connected()) err("delayed regime needs a connected communication graph");
        (void)delay_steps(sc.network.delay_s, sc.step_s);
      });
      break;
  }
  rep.ok = rep.errors.empty();
  return rep;
}

}  // namespace coopadapt
