#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "finslerq/acceptance.hpp"
#include "finslerq/errors.hpp"
#include "finslerq/experiments.hpp"
#include "finslerq/finsler.hpp"
#include "finslerq/quasimetric.hpp"

namespace py = pybind11;
using namespace finslerq;
using nlohmann::json;

// JSON crosses the boundary as text; the Python side wraps it with json.loads.
PYBIND11_MODULE(_core, m) {
  m.doc() = "Asymmetric distances, semi-Lipschitz functions and composition operators";
  m.attr("__version__") = experiments::kToolVersion;

  static py::exception<Error> error(m, "FinslerqError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = error;
      py::object instance = err(e.what());
      instance.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error.ptr(), instance.ptr());
    }
  });

  m.def("experiment_ids", &experiments::experiment_ids);

  m.def(
      "run_json",
      [](const std::string& config) {
        const auto result = experiments::run(json::parse(config));
        py::dict tables;
        for (const auto& t : result.tables) tables[py::str(t.name)] = experiments::to_csv(t);
        return py::make_tuple(result.record.dump(), tables, result.pass);
      },
      py::arg("config"), "Run one experiment; returns (record JSON, {table: CSV}, pass).");

  m.def(
      "verify",
      [](double oracle_perturbation) {
        acceptance::Options options;
        options.oracle_perturbation = oracle_perturbation;
        std::vector<py::tuple> out;
        for (const auto& r : acceptance::run_all(options)) out.push_back(py::make_tuple(r.id, r.name, r.pass, r.detail));
        return out;
      },
      py::arg("oracle_perturbation") = 0.0);

  m.def(
      "index_of_symmetry",
      [](const std::vector<std::vector<double>>& d) {
        return quasimetric::index_of_symmetry(quasimetric::FiniteSpace::from_matrix(d)).index;
      },
      py::arg("distances"));

  m.def(
      "slip_constant",
      [](const std::vector<double>& f, const std::vector<std::vector<double>>& d, bool hemi) {
        const auto mode = hemi ? quasimetric::SeparationMode::QuasiHemiMetric : quasimetric::SeparationMode::QuasiMetric;
        return quasimetric::slip_constant(f, quasimetric::FiniteSpace::from_matrix(d, mode));
      },
      py::arg("values"), py::arg("distances"), py::arg("hemi") = false);

  m.def(
      "line_distance", [](double x, double y) { return finsler::randers_1d_distance(finsler::DriftSpec::example31(), x, y); },
      py::arg("x"), py::arg("y"), "Closed-form distance on the index-zero line.");
}
