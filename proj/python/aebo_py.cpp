#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>

#include "aebo/adaptive_control.hpp"
#include "aebo/benchmarks.hpp"
#include "aebo/optimizer.hpp"

namespace py = pybind11;
using namespace aebo;

namespace {

Box to_box(const std::vector<double>& lower, const std::vector<double>& upper) { return make_box(lower, upper); }

OptimizerConfig to_config(const Box& bounds, int budget, int n_init, std::uint64_t seed, const std::string& mode,
                          const std::string& sense, double xi0, double kappa, double delta,
                          const std::string& eigen_mode) {
  OptimizerConfig cfg;
  cfg.initial_bounds = bounds;
  cfg.budget = budget;
  cfg.n_init = n_init;
  cfg.seed = seed;
  cfg.mode = mode_from_string(mode);
  cfg.sense = sense_from_string(sense);
  cfg.control.xi0 = xi0;
  cfg.control.kappa = kappa;
  cfg.control.delta = delta;
  cfg.eigen_mode = eigen_mode_from_string(eigen_mode);
  return cfg;
}

// A callable may return a number, None (undefined output), or (value, feasible).
Evaluation to_evaluation(const py::object& out) {
  if (out.is_none()) return {std::numeric_limits<double>::quiet_NaN(), false};
  if (py::isinstance<py::tuple>(out)) {
    const auto t = out.cast<py::tuple>();
    if (t.size() != 2) throw py::value_error("objective must return a number or (value, feasible)");
    if (t[0].is_none()) return {std::numeric_limits<double>::quiet_NaN(), false};
    return {t[0].cast<double>(), t[1].cast<bool>()};
  }
  return {out.cast<double>(), true};
}

}  // namespace

PYBIND11_MODULE(_aebo, m) {
  m.doc() = "Adaptive expansion Bayesian optimization";

  py::register_exception<std::invalid_argument>(m, "InvalidArgument", PyExc_ValueError);

  py::class_<IterationRow>(m, "Row")
      .def_readonly("iteration", &IterationRow::iteration)
      .def_readonly("x", &IterationRow::x)
      .def_readonly("y", &IterationRow::y)
      .def_readonly("feasible", &IterationRow::feasible)
      .def_readonly("best", &IterationRow::best)
      .def_readonly("tau", &IterationRow::tau)
      .def_property_readonly("lower", [](const IterationRow& r) { return r.bounds.lower; })
      .def_property_readonly("upper", [](const IterationRow& r) { return r.bounds.upper; })
      .def_readonly("fallback", &IterationRow::fallback);

  py::class_<RunRecord>(m, "Result")
      .def_readonly("dim", &RunRecord::dim)
      .def_readonly("rows", &RunRecord::rows)
      .def_readonly("best_x", &RunRecord::best_x)
      .def_readonly("best_y", &RunRecord::best_y)
      .def_readonly("completed", &RunRecord::completed)
      .def_readonly("failed_iteration", &RunRecord::failed_iteration)
      .def_readonly("error", &RunRecord::error)
      .def("__len__", [](const RunRecord& r) { return r.rows.size(); });

  m.def(
      "minimize",
      [](const py::function& f, const std::vector<double>& lower, const std::vector<double>& upper, int budget,
         int n_init, std::uint64_t seed, const std::string& mode, const std::string& sense, double xi0,
         double kappa, double delta, const std::string& eigen_mode) {
        const Box bounds = to_box(lower, upper);
        BlackBox bb;
        bb.dim = bounds.dim();
        bb.evaluate = [&f](const Vector& x) { return to_evaluation(f(x)); };
        return run(bb, to_config(bounds, budget, n_init, seed, mode, sense, xi0, kappa, delta, eigen_mode));
      },
      py::arg("f"), py::arg("lower"), py::arg("upper"), py::arg("budget") = 0, py::arg("n_init") = 0,
      py::arg("seed") = 0, py::arg("mode") = "aebo", py::arg("sense") = "minimize", py::arg("xi0") = 0.1,
      py::arg("kappa") = 0.1, py::arg("delta") = 0.01, py::arg("eigen_mode") = "lambda_min",
      "Optimizes f starting from the box [lower, upper]. f(x) returns a number, None, or (value, feasible).\n"
      "budget and n_init of 0 select 50*d and 5*d. Errors raised by f end the run and are reported in\n"
      "Result.error.");

  m.def(
      "run_problem",
      [](const std::string& name, std::uint64_t seed, int budget, int n_init, int dim, double noise_std,
         const std::string& mode) {
        const auto problem = bench::make_problem(name, dim);
        OptimizerConfig cfg;
        cfg.initial_bounds = bench::initial_window(problem).box;
        cfg.budget = budget;
        cfg.n_init = n_init;
        cfg.seed = seed;
        cfg.mode = mode_from_string(mode);
        if (noise_std > 0.0) cfg.fit.fixed_noise.reset();
        py::gil_scoped_release release;
        return run(bench::as_blackbox(bench::noisy(problem, noise_std, seed ^ 0x9E3779B97F4A7C15ULL)), cfg);
      },
      py::arg("name"), py::arg("seed") = 0, py::arg("budget") = 0, py::arg("n_init") = 0, py::arg("dim") = 2,
      py::arg("noise_std") = 0.0, py::arg("mode") = "aebo",
      "Runs a registry benchmark from its standard initial window.");

  m.def("problem_names", &bench::problem_names);
  m.def(
      "evaluate_problem", [](const std::string& name, const Vector& x) { return bench::evaluate_problem(name, x); },
      py::arg("name"), py::arg("x"));

  m.def(
      "solve_tau",
      [](double f_prime, double k0, double ei0) {
        const TauSolution s = solve_tau(f_prime, k0, ei0, ControlParams{});
        return py::make_tuple(s.tau, s.clamped);
      },
      py::arg("f_prime"), py::arg("k0"), py::arg("ei0"),
      "Variance ratio at which the boundary improvement equals ei0. Returns (tau, clamped).");
}
