#include <fstream>
#include <iterator>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coopadapt/cli.hpp"

namespace py = pybind11;
using namespace coopadapt;

namespace {

BodyParams body_from(const Vec& v) {
  if (v.size() != kParamsPerBody) throw std::invalid_argument("body parameters need 4 entries (m, hx, hy, izz)");
  return BodyParams::from_vector(v);
}

PlanarModel make_model(std::vector<double> lengths, const Mat& links, const Vec2& gravity, std::optional<Vec> payload,
                       const Vec2& mount_offset, double mount_angle, std::optional<std::vector<double>> joint_offsets) {
  if (links.cols() != kParamsPerBody || links.rows() != static_cast<Eigen::Index>(lengths.size())) {
    throw std::invalid_argument("links must be an (n, 4) array matching link_lengths");
  }
  std::vector<BodyParams> bodies;
  for (Eigen::Index i = 0; i < links.rows(); ++i) bodies.push_back(body_from(links.row(i).transpose()));
  std::optional<BodyParams> pl;
  if (payload) pl = body_from(*payload);
  std::vector<double> offsets = joint_offsets ? *joint_offsets : std::vector<double>(lengths.size(), 0.0);
  return PlanarModel(std::move(lengths), std::move(offsets), std::move(bodies), gravity, pl,
                     PayloadMount{mount_offset, mount_angle});
}

std::vector<int> bodies_or_all(const PlanarModel& m, const std::optional<std::vector<int>>& bodies) {
  if (bodies) return *bodies;
  std::vector<int> all;
  for (int b = 0; b < m.n_bodies(); ++b) all.push_back(b);
  return all;
}

Scenario scenario_from(const std::string& path, const std::vector<std::pair<std::string, std::string>>& overrides) {
  if (overrides.empty()) return load_scenario(path);
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario '" + path + "'");
  const std::string text{std::istreambuf_iterator<char>(in), {}};
  return parse_scenario(apply_overrides(text, overrides));
}

py::dict report_dict(const ValidationReport& rep) {
  py::dict d;
  d["ok"] = rep.ok;
  d["errors"] = rep.errors;
  d["notes"] = rep.notes;
  if (rep.connectivity) {
    d["jointly_connected"] = rep.connectivity->jointly_connected;
    d["max_window_s"] = rep.connectivity->max_window_s;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Planar manipulator dynamics and cooperative payload adaptation";

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

  py::class_<PlanarModel>(m, "PlanarModel")
      .def(py::init(&make_model), py::arg("link_lengths"), py::arg("links"),
           py::arg("gravity") = Vec2(0.0, -9.81), py::arg("payload") = py::none(),
           py::arg("mount_offset") = Vec2::Zero(), py::arg("mount_angle") = 0.0,
           py::arg("joint_offsets") = py::none())
      .def_property_readonly("n_joints", &PlanarModel::n_joints)
      .def_property_readonly("n_bodies", &PlanarModel::n_bodies)
      .def_property_readonly("payload_body", &PlanarModel::payload_body)
      .def("param_vector",
           [](const PlanarModel& self, std::optional<std::vector<int>> bodies) {
             return self.param_vector(bodies_or_all(self, bodies));
           },
           py::arg("bodies") = py::none())
      .def("mass_matrix", [](const PlanarModel& self, const Vec& q) { return mass_matrix(self, q); }, py::arg("q"))
      .def("coriolis_matrix",
           [](const PlanarModel& self, const Vec& q, const Vec& qd) { return coriolis_matrix(self, q, qd); },
           py::arg("q"), py::arg("qd"))
      .def("gravity_vector", [](const PlanarModel& self, const Vec& q) { return gravity_vector(self, q); },
           py::arg("q"))
      .def("inverse_dynamics",
           [](const PlanarModel& self, const Vec& q, const Vec& qd, const Vec& qdd) {
             return inverse_dynamics(self, q, qd, qdd);
           },
           py::arg("q"), py::arg("qd"), py::arg("qdd"))
      .def("forward_dynamics",
           [](const PlanarModel& self, const Vec& q, const Vec& qd, const Vec& tau) {
             return forward_dynamics(self, q, qd, tau);
           },
           py::arg("q"), py::arg("qd"), py::arg("tau"))
      .def("regressor",
           [](const PlanarModel& self, const Vec& q, const Vec& qd, const Vec& qr_d, const Vec& qr_dd,
              std::optional<std::vector<int>> bodies) {
             return regressor(self, q, qd, qr_d, qr_dd, bodies_or_all(self, bodies));
           },
           py::arg("q"), py::arg("qd"), py::arg("qr_d"), py::arg("qr_dd"), py::arg("bodies") = py::none());

  m.def("is_physical", [](const Vec& p) { return is_physical(body_from(p)); }, py::arg("params"));

  m.def("validate",
        [](const std::string& path, const std::vector<std::pair<std::string, std::string>>& overrides) {
          return report_dict(validate_scenario(scenario_from(path, overrides)));
        },
        py::arg("path"), py::arg("overrides") = std::vector<std::pair<std::string, std::string>>{});

  m.def("resolved",
        [](const std::string& path, const std::vector<std::pair<std::string, std::string>>& overrides) {
          return resolved_scenario_text(scenario_from(path, overrides));
        },
        py::arg("path"), py::arg("overrides") = std::vector<std::pair<std::string, std::string>>{});

  m.def("run",
        [](const std::string& path, const std::vector<std::pair<std::string, std::string>>& overrides, int decimate) {
          const Scenario sc = scenario_from(path, overrides);
          RunOptions opts;
          opts.decimate = decimate;
          RunResult r;
          {
            py::gil_scoped_release release;
            r = run_scenario(sc, opts);
          }
          const auto n_rows = static_cast<Eigen::Index>(r.series.rows.size());
          const auto n_cols = static_cast<Eigen::Index>(r.series.columns.size());
          Mat data(n_rows, n_cols);
          for (Eigen::Index i = 0; i < n_rows; ++i) {
            data.row(i) = Eigen::Map<const Eigen::RowVectorXd>(r.series.rows[i].data(), n_cols);
          }
          return py::make_tuple(r.series.columns, data, summary_json_text(r.summary));
        },
        py::arg("path"), py::arg("overrides") = std::vector<std::pair<std::string, std::string>>{},
        py::arg("decimate") = 0);
}
