#include <doctest.h>

#include <cmath>
#include <string>

#include "aebo/benchmarks.hpp"

using namespace aebo;
using namespace aebo::bench;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

}  // namespace

TEST_CASE("rastrigin and rosenbrock at their minimizers") {
  for (int d : {1, 2, 5}) CHECK(rastrigin(Vector::Zero(d)) == 0.0);
  for (int d : {2, 4}) CHECK(rosenbrock(Vector::Ones(d)) == 0.0);
  CHECK(rastrigin(v2(1.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("branin minimum on a dense grid") {
  const TestProblem p = make_problem("branin");
  double best = INFINITY;
  const int n = 1500;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const Vector x = v2(-5.0 + 15.0 * i / n, 15.0 * j / n);
      best = std::min(best, branin(x));
    }
  }
  CHECK(std::abs(best - p.minimum) < 1e-4);
  CHECK(p.minimum == doctest::Approx(0.397887).epsilon(1e-6));
  for (const auto& m : p.minimizers) CHECK(std::abs(branin(m) - p.minimum) < 1e-9);
}

TEST_CASE("every registry problem reproduces its minimum") {
  for (const auto& name : problem_names()) {
    const TestProblem p = make_problem(name);
    CAPTURE(name);
    CHECK(p.dim == p.original_bounds.dim());
    REQUIRE_FALSE(p.minimizers.empty());
    for (const auto& m : p.minimizers) {
      CHECK(p.feasible(m));
      CHECK(std::abs(p.evaluate(m) - p.minimum) < 1e-6);
    }
  }
}

TEST_CASE("constrained rastrigin feasibility") {
  const Evaluation a = constrained_rastrigin(v2(0.0, -2.0));
  CHECK(a.feasible);
  CHECK(a.y == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_FALSE(constrained_rastrigin(v2(0.0, 0.0)).feasible);
  CHECK(constrained_rastrigin(v2(10.0, -2.0)).feasible);  // on the boundary
  const TestProblem p = make_problem("constrained_rastrigin");
  CHECK(p.constrained());
  CHECK_FALSE(p.feasible(v2(0.0, 0.0)));
}

TEST_CASE("zero noise leaves observations untouched") {
  const TestProblem p = make_problem("six_hump_camel");
  const TestProblem q = noisy(p, 0.0, 3);
  for (const Vector& x : {v2(0.1, 0.2), v2(-1.0, 0.5)}) CHECK(q.observe(x) == p.evaluate(x));
  CHECK_THROWS_AS(noisy(p, -0.1, 3), std::invalid_argument);
}

TEST_CASE("observation noise has the requested moments") {
  const TestProblem p = make_problem("branin");
  const TestProblem q = noisy(p, 0.1, 42);
  const Vector x = v2(1.0, 2.0);
  const double f = p.evaluate(x);
  const int n = 10000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = q.observe(x) - f;
    s += e;
    s2 += e * e;
  }
  const double mean = s / n;
  const double sd = std::sqrt((s2 - n * mean * mean) / (n - 1));
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(sd - 0.1) < 0.005);
}

TEST_CASE("noise streams are reproducible per seed") {
  const TestProblem p = make_problem("branin");
  const TestProblem a = noisy(p, 0.1, 7);
  const TestProblem b = noisy(p, 0.1, 7);
  const TestProblem c = noisy(p, 0.1, 8);
  const Vector x = v2(0.0, 5.0);
  const double ya = a.observe(x);
  CHECK(ya == b.observe(x));
  CHECK(ya != c.observe(x));
}

TEST_CASE("metrics at the minimizer and around the center") {
  const TestProblem p = make_problem("rastrigin");
  RunRecord r;
  r.dim = 2;
  IterationRow row;
  row.iteration = 1;
  row.x = Vector::Zero(2);
  row.y = 0.0;
  row.feasible = true;
  row.best = 0.0;
  r.rows.push_back(row);
  r.best_x = row.x;
  r.best_y = 0.0;
  MetricSample m = metrics(r, p, Vector::Zero(2));
  CHECK(m.optimality_gap == 0.0);
  CHECK(m.distance_to_center == 0.0);
  m = metrics(r, p, v2(3.0, 4.0));
  CHECK(m.distance_to_center == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("metrics use the noise-free objective") {
  const TestProblem p = noisy(make_problem("rastrigin"), 1.0, 1);
  RunRecord r;
  r.dim = 2;
  IterationRow row;
  row.iteration = 1;
  row.x = v2(1.0, 0.0);
  row.y = -3.0;  // a lucky noisy draw
  row.feasible = true;
  row.best = -3.0;
  r.rows.push_back(row);
  r.best_x = row.x;
  CHECK(metrics(r, p, Vector::Zero(2)).optimality_gap == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unknown problem names list the registry") {
  try {
    (void)make_problem("ackley");
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("ackley") != std::string::npos);
    for (const auto& name : problem_names()) CHECK(msg.find(name) != std::string::npos);
  }
}

TEST_CASE("dimension mismatch is rejected") {
  CHECK_THROWS_AS(branin(Vector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(hartmann6(Vector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(make_problem("rosenbrock", 1), std::invalid_argument);
}

TEST_CASE("initial windows exclude every known minimizer") {
  for (const auto& name : problem_names()) {
    const TestProblem p = make_problem(name);
    const InitialWindow w = initial_window(p);
    CAPTURE(name);
    CHECK(p.original_bounds.contains(w.box));
    for (const auto& m : p.minimizers) CHECK_FALSE(w.box.contains(m));
  }
  const InitialWindow w = initial_window(make_problem("branin"));
  CHECK_FALSE(w.mirrored);
  CHECK(w.box.lower.isApprox(v2(-3.5, 1.5)));
  CHECK(w.box.upper.isApprox(v2(-0.5, 4.5)));
}

TEST_CASE("black-box wrapper reports feasibility") {
  const BlackBox bb = as_blackbox(make_problem("constrained_rastrigin"));
  CHECK(bb.dim == 2);
  CHECK(bb.evaluate(v2(0.0, -2.0)).feasible);
  CHECK_FALSE(bb.evaluate(v2(0.0, 0.0)).feasible);
}
