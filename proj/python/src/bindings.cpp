#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "depthlab/acceptance.hpp"
#include "depthlab/depth.hpp"
#include "depthlab/harness.hpp"
#include "depthlab/lp.hpp"
#include "depthlab/measure.hpp"
#include "depthlab/parallel.hpp"
#include "depthlab/polytope.hpp"
#include "depthlab/transforms.hpp"

namespace py = pybind11;
using namespace depthlab;

namespace {

MeasureKind kind_from(const std::string& name) {
  const auto k = parse_measure_kind(name);
  if (!k || *k == MeasureKind::kCustomDensity) throw py::value_error("unknown measure kind '" + name + "'");
  return *k;
}

py::dict estimate_dict(const Estimate& e) {
  py::dict d;
  d["value"] = e.value;
  d["std_error"] = e.std_error;
  d["ci_low"] = e.ci_low;
  d["ci_high"] = e.ci_high;
  d["samples"] = e.samples;
  d["unreliable"] = e.unreliable;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "depthlab native core";
  m.attr("__version__") = artifact_version();

  static py::exception<Error> error(m, "DepthlabError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error(e.what());
    }
  });

  m.def("catalog", [] {
    std::vector<std::string> names;
    for (const MeasureKind k : catalog_kinds()) names.emplace_back(kind_name(k));
    return names;
  });
  m.def("set_threads", &set_default_threads, py::arg("threads"));
  m.def("threads", &default_threads);

  py::class_<Measure>(m, "Measure")
      .def(py::init([](const std::string& kind, int dimension) { return Measure::make(kind_from(kind), dimension); }),
           py::arg("kind"), py::arg("dimension"))
      .def_property_readonly("dimension", &Measure::dimension)
      .def_property_readonly("name", &Measure::name)
      .def_property_readonly("atomic", &Measure::atomic)
      .def("log_density", &Measure::log_density, py::arg("x"))
      .def("density", &Measure::density, py::arg("x"))
      .def(
          "sample",
          [](const Measure& self, std::size_t count, std::uint64_t seed, std::uint64_t stream) {
            return Matrix(self.sample(RngStream{seed, stream}, count).transpose());
          },
          py::arg("count"), py::arg("seed") = 0, py::arg("stream") = 0, "Rows are points.")
      .def("__repr__", [](const Measure& self) {
        return "Measure('" + std::string(kind_name(self.kind())) + "', " + std::to_string(self.dimension()) + ")";
      });

  m.def("depth_1d", &depth_1d, py::arg("measure"), py::arg("x"));
  m.def(
      "depth",
      [](const Measure& measure, const Vector& x, std::size_t net_size, std::size_t mc_budget, std::uint64_t seed) {
        DepthOptions o;
        o.net_size = net_size;
        o.mc_budget = mc_budget;
        const DepthEstimate d = depth_estimate(measure, x, o, RngStream{seed, 0});
        py::dict r;
        r["value"] = d.value;
        r["kind"] = to_string(d.kind);
        r["direction"] = d.best_direction;
        r["std_error"] = d.std_error;
        return r;
      },
      py::arg("measure"), py::arg("x"), py::arg("net_size") = 64, py::arg("mc_budget") = 100000,
      py::arg("seed") = 0);
  m.def(
      "expected_depth",
      [](const Measure& measure, std::size_t samples, std::uint64_t seed) {
        py::gil_scoped_release release;
        const Estimate e = expected_depth(measure, RngStream{seed, 0}, samples);
        py::gil_scoped_acquire acquire;
        return estimate_dict(e);
      },
      py::arg("measure"), py::arg("samples"), py::arg("seed") = 0);

  m.def(
      "log_laplace",
      [](const Measure& measure, const Vector& u) { return LaplaceOracle(measure).log_mgf(u); },
      py::arg("measure"), py::arg("u"));
  m.def(
      "cramer",
      [](const Measure& measure, const Vector& v) {
        const CramerValue c = cramer(LaplaceOracle(measure), v);
        py::dict r;
        r["value"] = c.value;
        r["maximizer"] = c.maximizer;
        r["converged"] = c.converged;
        r["infinite"] = c.infinite;
        r["iterations"] = c.iterations;
        return r;
      },
      py::arg("measure"), py::arg("v"));

  m.def(
      "hull_contains",
      [](const Matrix& vertices_rows, const Vector& x) {
        return contains(make_polytope(vertices_rows.transpose()), x);
      },
      py::arg("vertices"), py::arg("x"), "vertices: one point per row.");
  m.def(
      "expected_measure",
      [](const Measure& mu, std::size_t count, std::size_t reps, std::size_t test_points, std::uint64_t seed) {
        ExpectedMeasureOptions o;
        o.reps = reps;
        o.test_points = test_points;
        py::gil_scoped_release release;
        const ExpectedMeasure e = expected_measure(mu, mu, count, RngStream{seed, 0}, o);
        py::gil_scoped_acquire acquire;
        return estimate_dict(e.estimate);
      },
      py::arg("measure"), py::arg("count"), py::arg("reps") = 8, py::arg("test_points") = 500, py::arg("seed") = 0);

  m.def(
      "parse_config",
      [](const std::string& text) {
        const ConfigParseResult r = parse_config(text);
        if (!r.ok()) {
          std::string msg;
          for (const ConfigError& e : r.errors) msg += (msg.empty() ? "" : "\n") + format_error(e);
          throw py::value_error(msg);
        }
        return canonical_text(*r.config);
      },
      py::arg("text"), "Validates a config; returns its canonical text or raises ValueError listing every error.");
  m.def(
      "config_hash",
      [](const std::string& text) {
        const ConfigParseResult r = parse_config(text);
        if (!r.ok()) throw py::value_error(format_error(r.errors.front()));
        return config_hash(*r.config);
      },
      py::arg("text"));
  m.def(
      "run",
      [](const std::string& text, std::optional<std::string> out) {
        const ConfigParseResult r = parse_config(text);
        if (!r.ok()) {
          std::string msg;
          for (const ConfigError& e : r.errors) msg += (msg.empty() ? "" : "\n") + format_error(e);
          throw py::value_error(msg);
        }
        RunRecord record;
        {
          py::gil_scoped_release release;
          record = run(*r.config);
          if (out) emit(record, *out, r.config->formats);
        }
        return to_json(record);
      },
      py::arg("config_text"), py::arg("out") = py::none(),
      "Runs a config; returns the JSON summary. Writes files when `out` is given.");
  m.def("criteria", [] {
    std::vector<std::pair<int, std::string>> v;
    for (const CriterionInfo& c : acceptance_criteria()) v.emplace_back(c.id, c.slug);
    return v;
  });
}
