#include "polylab/covering.hpp"
#include "polylab/manifest.hpp"
#include "polylab/stats.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace polylab;

namespace {

Vec to_vec(const std::vector<double>& xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v[static_cast<Eigen::Index>(i)] = xs[i];
  return v;
}

std::vector<double> from_vec(const Vec& v) { return {v.data(), v.data() + v.size()}; }

Vec point_in(const Polytope& p, const std::vector<double>& xs) {
  if (static_cast<int>(xs.size()) != p.dim())
    throw Error(ErrorKind::ParseError, "point has the wrong dimension");
  return to_vec(xs);
}

}  // namespace

PYBIND11_MODULE(_polylab, m) {
  m.doc() = "Floating bodies, cap coverings and Poisson polytopes.";
  m.attr("__version__") = kToolVersion;

  static py::exception<Error> error(m, "PolylabError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr e) {
    try {
      if (e) std::rethrow_exception(e);
    } catch (const Error& x) {
      py::set_error(error, x.what());
    }
  });

  py::class_<Polytope>(m, "Polytope")
      .def(py::init([](const std::string& spec) { return parse_polytope_spec(spec); }),
           py::arg("spec"), "From 'cube:2', 'simplex:3', a JSON document or a file path.")
      .def_static(
          "from_vertices",
          [](const std::vector<std::vector<double>>& pts) {
            PointList list;
            for (const auto& x : pts) list.push_back(to_vec(x));
            return build_from_vertices(list);
          },
          py::arg("points"))
      .def_property_readonly("dim", &Polytope::dim)
      .def_property_readonly("volume", &Polytope::volume)
      .def_property_readonly("centroid", [](const Polytope& p) { return from_vec(p.centroid()); })
      .def_property_readonly("vertices",
                             [](const Polytope& p) {
                               std::vector<std::vector<double>> out;
                               for (const auto& v : p.vertices()) out.push_back(from_vec(v));
                               return out;
                             })
      .def_property_readonly("f_vector", [](const Polytope& p) { return p.lattice().f_vector(); })
      .def("contains",
           [](const Polytope& p, const std::vector<double>& x) { return contains(p, point_in(p, x)); })
      .def("__repr__", [](const Polytope& p) {
        return "<Polytope dim=" + std::to_string(p.dim()) +
               " vertices=" + std::to_string(p.vertices().size()) + ">";
      });

  m.def("flag_count", &flag_count, py::arg("polytope"));
  m.def(
      "v_at",
      [](const Polytope& p, const std::vector<double>& z) { return v_at(p, point_in(p, z)); },
      py::arg("polytope"), py::arg("z"), "Volume of the minimal cap through z.");
  m.def(
      "macbeath_volume",
      [](const Polytope& p, const std::vector<double>& z, double lambda) {
        return macbeath(p, point_in(p, z), lambda).volume;
      },
      py::arg("polytope"), py::arg("z"), py::arg("lambda_") = 1.0);
  m.def(
      "cap_volume",
      [](const Polytope& p, const std::vector<double>& u, double depth) {
        Vec dir = point_in(p, u);
        if (!(dir.norm() > 0.0)) throw Error(ErrorKind::ParseError, "direction must be nonzero");
        return make_cap(p, dir / dir.norm(), depth).volume;
      },
      py::arg("polytope"), py::arg("u"), py::arg("depth"));
  m.def(
      "covering_report",
      [](const Polytope& p, double s, std::uint64_t seed, long budget) {
        VerifyOptions vo;
        vo.budget = budget;
        const CapCovering cov = cap_covering(p, saturate(p, s, seed));
        std::string json;
        {
          py::gil_scoped_release release;
          json = covering_report_json(verify_covering(p, cov, seed, vo));
        }
        return py::module_::import("json").attr("loads")(json);
      },
      py::arg("polytope"), py::arg("s"), py::arg("seed") = 1, py::arg("budget") = 10000,
      "Saturated system at level s, its cap covering and the covering checks.");

  m.def("ks_normal", &ks_normal, py::arg("values"));
  m.def("rinott_bound", &rinott_bound, py::arg("vertex_count"), py::arg("D"), py::arg("M"),
        py::arg("sigma"));
  m.def(
      "run_experiment",
      [](const std::string& config_json, int jobs) {
        ExperimentConfig config = parse_config(config_json);
        config.jobs = jobs;
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(config);
        }
        py::dict out;
        out["records_csv"] = records_csv(r);
        out["summary"] = py::module_::import("json").attr("loads")(summary_json(r, config));
        out["plot_tsv"] = plot_tsv(r);
        return out;
      },
      py::arg("config_json"), py::arg("jobs") = 1,
      "Runs a config document; returns records_csv, summary and plot_tsv.");
}
