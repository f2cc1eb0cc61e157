#include <doctest.h>

#include <cmath>
#include <limits>

#include "aebo/benchmarks.hpp"
#include "aebo/optimizer.hpp"
#include "support/properties.hpp"

using namespace aebo;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }
Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

BlackBox counting(std::function<double(const Vector&)> f, int dim, int* calls) {
  BlackBox bb;
  bb.dim = dim;
  bb.evaluate = [f = std::move(f), calls](const Vector& x) {
    ++*calls;
    return Evaluation{f(x), true};
  };
  return bb;
}

OptimizerConfig small_config(const Box& bounds, int n_init, int budget, std::uint64_t seed = 0) {
  OptimizerConfig cfg;
  cfg.initial_bounds = bounds;
  cfg.n_init = n_init;
  cfg.budget = budget;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("LHS with one point is inside the box") {
  std::mt19937_64 rng(0);
  const Box b(v2(-1, 2), v2(1, 3));
  const auto pts = lhs_sample(b, 1, rng);
  REQUIRE(pts.size() == 1);
  CHECK(b.contains(pts[0]));
}

TEST_CASE("LHS puts one point in each quarter of the unit square") {
  std::mt19937_64 rng(1);
  const auto pts = lhs_sample(Box(v2(0, 0), v2(1, 1)), 4, rng);
  for (int j = 0; j < 2; ++j) {
    int seen[4] = {0, 0, 0, 0};
    for (const auto& p : pts) ++seen[std::min(3, static_cast<int>(p[j] * 4.0))];
    for (int k = 0; k < 4; ++k) CHECK(seen[k] == 1);
  }
}

TEST_CASE("LHS marginal mean") {
  std::mt19937_64 rng(2);
  const auto pts = lhs_sample(Box(v2(0, 0), v2(1, 1)), 1000, rng);
  for (int j = 0; j < 2; ++j) {
    double s = 0.0;
    for (const auto& p : pts) s += p[j];
    CHECK(std::abs(s / 1000.0 - 0.5) < 0.02);
  }
}

TEST_CASE("LHS rejects degenerate input") {
  std::mt19937_64 rng(3);
  CHECK_THROWS_AS(lhs_sample(Box(v2(0, 0), v2(0, 1)), 4, rng), std::invalid_argument);
  CHECK_THROWS_AS(lhs_sample(Box(v2(0, 0), v2(1, 1)), 0, rng), std::invalid_argument);
}

TEST_CASE("budget equal to n_init runs only the design") {
  int calls = 0;
  const auto bb = counting([](const Vector& x) { return x.squaredNorm(); }, 2, &calls);
  const RunRecord r = run(bb, small_config(Box(v2(-1, -1), v2(1, 1)), 6, 6));
  CHECK(r.completed);
  CHECK(calls == 6);
  REQUIRE(r.rows.size() == 6);
  double best = INFINITY;
  for (const auto& row : r.rows) {
    best = std::min(best, row.y);
    CHECK(std::isnan(row.tau));
  }
  CHECK(r.best_y == best);
}

TEST_CASE("1-d quadratic with the optimum outside the initial bounds") {
  int calls = 0;
  const auto bb = counting([](const Vector& x) { return -(x[0] - 5.0) * (x[0] - 5.0); }, 1, &calls);
  OptimizerConfig cfg = small_config(Box(v1(0.0), v1(1.0)), 5, 30, 7);
  cfg.sense = Sense::maximize;
  const RunRecord r = run(bb, cfg);
  REQUIRE(r.completed);
  double initial_best = -INFINITY;
  double upper = -INFINITY;
  for (const auto& row : r.rows) {
    if (row.iteration <= 5) initial_best = std::max(initial_best, row.y);
    upper = std::max(upper, row.x[0]);
  }
  CHECK(r.best_y > initial_best);
  CHECK(upper > 1.0);
  CHECK(r.best_y > -0.5);
}

TEST_CASE("run invariants: exact budget, growing data box, monotone incumbent") {
  const auto problem = bench::make_problem("branin");
  int calls = 0;
  const auto bb = counting(problem.evaluate, 2, &calls);
  const RunRecord r = run(bb, small_config(bench::initial_window(problem).box, 8, 30, 3));
  REQUIRE(r.completed);
  CHECK(calls == 30);
  CHECK(r.rows.size() == 30);
  Box data(r.rows[0].x, r.rows[0].x);
  double prev_best = INFINITY;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    CHECK(row.iteration == static_cast<int>(i) + 1);
    const Box grown(data.lower.cwiseMin(row.x), data.upper.cwiseMax(row.x));
    CHECK(grown.contains(data));
    data = grown;
    CHECK(row.best <= prev_best);
    prev_best = row.best;
    if (row.iteration > 8) {
      CHECK(row.tau > 0.0);
      CHECK(row.tau < 1.0);
      CHECK(row.bounds.contains(row.x));
    }
  }
  CHECK(r.best_y == prev_best);
}

TEST_CASE("repeated runs are bit-identical") {
  const auto problem = bench::make_problem("six_hump_camel");
  const auto cfg = small_config(bench::initial_window(problem).box, 6, 15, 11);
  CHECK(testing::identical(run(bench::as_blackbox(problem), cfg), run(bench::as_blackbox(problem), cfg)));
  auto other = cfg;
  other.seed = 12;
  CHECK_FALSE(testing::identical(run(bench::as_blackbox(problem), cfg), run(bench::as_blackbox(problem), other)));
}

TEST_CASE("non-finite output aborts an unconstrained run") {
  int calls = 0;
  BlackBox bb;
  bb.dim = 1;
  bb.evaluate = [&calls](const Vector& x) {
    ++calls;
    return Evaluation{calls == 7 ? std::numeric_limits<double>::quiet_NaN() : x[0] * x[0], true};
  };
  const RunRecord r = run(bb, small_config(Box(v1(-1.0), v1(1.0)), 4, 12));
  CHECK_FALSE(r.completed);
  CHECK(r.failed_iteration == 7);
  CHECK(r.rows.size() == 6);
  CHECK(r.error.rfind("iteration 7:", 0) == 0);
  CHECK(r.best_x.has_value());
}

TEST_CASE("non-finite output is an infeasible point in constrained mode") {
  int calls = 0;
  BlackBox bb;
  bb.dim = 1;
  bb.evaluate = [&calls](const Vector& x) {
    ++calls;
    if (x[0] > 0.5) return Evaluation{std::numeric_limits<double>::quiet_NaN(), false};
    return Evaluation{(x[0] - 0.2) * (x[0] - 0.2), true};
  };
  OptimizerConfig cfg = small_config(Box(v1(-1.0), v1(1.0)), 6, 14);
  cfg.mode = Mode::aebo_constrained;
  const RunRecord r = run(bb, cfg);
  CHECK(r.completed);
  CHECK(calls == 14);
  for (const auto& row : r.rows) {
    if (std::isnan(row.y)) CHECK_FALSE(row.feasible);
  }
  REQUIRE(r.best_x.has_value());
  CHECK((*r.best_x)[0] <= 0.5);
}

TEST_CASE("fixed-bounds mode never leaves the initial bounds") {
  const auto problem = bench::make_problem("branin");
  const Box init = bench::initial_window(problem).box;
  OptimizerConfig cfg = small_config(init, 6, 20, 4);
  cfg.mode = Mode::fixed_bounds_ei;
  const RunRecord r = run(bench::as_blackbox(problem), cfg);
  REQUIRE(r.completed);
  for (const auto& row : r.rows) {
    CHECK(init.contains(row.x));
    CHECK(std::isnan(row.tau));
  }
}

TEST_CASE("config validation") {
  BlackBox bb;
  bb.dim = 2;
  bb.evaluate = [](const Vector& x) { return Evaluation{x.sum(), true}; };
  CHECK_THROWS_AS(run(bb, small_config(Box(v2(0, 0), v2(1, 0)), 4, 8)), std::invalid_argument);
  CHECK_THROWS_AS(run(bb, small_config(Box(v2(0, 0), v2(1, 1)), 1, 8)), std::invalid_argument);
  CHECK_THROWS_AS(run(bb, small_config(Box(v2(0, 0), v2(1, 1)), 6, 4)), std::invalid_argument);
  CHECK_THROWS_AS(run(bb, small_config(Box(v1(0), v1(1)), 4, 8)), std::invalid_argument);
  const auto resolved = small_config(Box(v2(0, 0), v2(1, 1)), 0, 0).resolved();
  CHECK(resolved.n_init == 10);
  CHECK(resolved.budget == 100);
}

TEST_CASE("mode and sense names") {
  for (auto m : {Mode::aebo, Mode::aebo_constrained, Mode::fixed_bounds_ei}) CHECK(mode_from_string(to_string(m)) == m);
  CHECK(sense_from_string("max") == Sense::maximize);
  CHECK_THROWS_AS(mode_from_string("ei"), std::invalid_argument);
}

TEST_CASE("property: LHS stratification") {
  const auto r = testing::lhs_stratified();
  INFO(r.detail);
  CHECK(r.pass);
}

TEST_CASE("property: determinism") {
  const auto r = testing::run_deterministic();
  INFO(r.detail);
  CHECK(r.pass);
}
