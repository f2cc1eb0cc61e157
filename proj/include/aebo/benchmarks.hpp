#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "aebo/optimizer.hpp"

namespace aebo::bench {

/// A synthetic minimization problem with a known global minimum.
struct TestProblem {
  std::string name;
  int dim = 0;
  Box original_bounds;
  std::function<double(const Vector&)> evaluate;  // noise-free objective
  double minimum = 0.0;
  std::vector<Vector> minimizers;
  std::function<bool(const Vector&)> constraint;  // empty when unconstrained
  std::function<double(const Vector&)> observe;   // what the optimizer sees
  double noise_std = 0.0;

  [[nodiscard]] bool constrained() const { return static_cast<bool>(constraint); }
  [[nodiscard]] bool feasible(const Vector& x) const { return !constraint || constraint(x); }
};

/// Registry names: branin, six_hump_camel, beale, hartmann3, hartmann6, rastrigin,
/// rosenbrock, constrained_rastrigin.
std::vector<std::string> problem_names();

/// Builds a problem and checks that its objective reproduces the known minimum at every
/// listed minimizer. `dim` only matters for rastrigin and rosenbrock.
TestProblem make_problem(std::string_view name, int dim = 2);

/// Evaluates a registry problem's noise-free objective.
double evaluate_problem(std::string_view name, const Vector& x);

double branin(const Vector& x);
double six_hump_camel(const Vector& x);
double beale(const Vector& x);
double hartmann3(const Vector& x);
double hartmann6(const Vector& x);
double rastrigin(const Vector& x);
double rosenbrock(const Vector& x);

/// Rastrigin restricted to the ellipse 0.01 x1^2 + (x2 + 2)^2 <= 1.
Evaluation constrained_rastrigin(const Vector& x);

/// Copy of `problem` whose observations carry N(0, sigma^2) noise from a private stream.
TestProblem noisy(const TestProblem& problem, double sigma, std::uint64_t seed);

/// Per axis [lo + 0.1 w, lo + 0.3 w]; mirrored to [hi - 0.3 w, hi - 0.1 w] when that
/// window would contain a known minimizer.
struct InitialWindow {
  Box box;
  bool mirrored = false;
};
InitialWindow initial_window(const TestProblem& problem);

BlackBox as_blackbox(const TestProblem& problem);

struct MetricSample {
  double optimality_gap = 0.0;       // best noise-free feasible value minus the known minimum
  double distance_to_center = 0.0;   // |x* - c|
};

MetricSample metrics(const RunRecord& record, const TestProblem& problem, const Vector& center);

}  // namespace aebo::bench
