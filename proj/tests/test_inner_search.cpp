#include <doctest.h>

#include <cmath>
#include <random>

#include "aebo/expansion.hpp"
#include "aebo/inner_search.hpp"
#include "support/oracles.hpp"
#include "support/properties.hpp"

using namespace aebo;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }
Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

KernelParams unit_params() {
  KernelParams p;
  p.lengthscale = 1.0;
  p.noise_variance = 1e-6;
  return p;
}

AcquisitionContext context(const GpModel& m, double tau) {
  AcquisitionContext ctx;
  ctx.incumbent = m.normalized_outputs().maxCoeff();
  ctx.tau = tau;
  return ctx;
}

// Two-observation 1-d surrogate shared by several cases.
GpModel two_point_model() {
  return GpModel::condition(std::vector<Vector>{v1(0.0), v1(1.0)}, std::vector<double>{0.0, 1.0}, unit_params());
}

}  // namespace

TEST_CASE("single observation with loose tau stays in bounds and under the variance limit") {
  const GpModel m =
      GpModel::condition(std::vector<Vector>{v2(0.0, 0.0)}, std::vector<double>{0.0}, unit_params(), false);
  AcquisitionContext ctx;
  ctx.incumbent = 0.0;
  ctx.tau = 0.95;
  const AcquisitionSurface s(m, ctx);
  const Box bounds(v2(-1.0, -1.0), v2(1.0, 1.0));
  std::mt19937_64 rng(1);
  const Proposal p = propose(s, bounds, v2(0.0, 0.0), SearchConfig{}, rng);
  CHECK_FALSE(p.fallback);
  CHECK(bounds.contains(p.x));
  CHECK(p.value.variance <= 0.95 * m.k0() + 1e-9);
  // EI grows with distance from the lone observation; the box binds before tau does
  // (corner variance 1 - e^-2 < 0.95), so the optimum is a corner.
  CHECK(p.x.cwiseAbs().isApprox(v2(1.0, 1.0), 1e-6));
}

TEST_CASE("tiny tau keeps the proposal next to the data") {
  const auto inst = testing::random_instance(21, 2, 6);
  const GpModel m = GpModel::condition(inst.X, inst.y, inst.params);
  const auto ctx = context(m, 1e-4);
  const AcquisitionSurface s(m, ctx);
  const Box bounds = feasible_domain_bounds(inst.X, m, ctx.tau, EigenMode::lambda_min).box;
  std::mt19937_64 rng(2);
  const Proposal p = propose(s, bounds, inst.X[0], SearchConfig{}, rng);
  double nearest = 1e300;
  for (const auto& x : inst.X) nearest = std::min(nearest, (x - p.x).norm());
  CHECK(nearest < 0.05 * inst.params.lengthscale);
  if (!p.fallback) CHECK(p.value.variance <= ctx.tau * m.k0() + 1e-9);
}

TEST_CASE("refining a refined point leaves it in place") {
  const GpModel m = two_point_model();
  const AcquisitionSurface s(m, context(m, 0.9));
  const Box bounds(v1(-2.0), v1(4.0));
  const SearchConfig cfg;
  const Vector once = refine(s, v1(2.0), bounds, cfg);
  const Vector twice = refine(s, once, bounds, cfg);
  CHECK(std::abs(twice[0] - once[0]) < 1e-6);
}

TEST_CASE("refinement never lowers the penalized objective") {
  const auto inst = testing::random_instance(5, 2, 7);
  const GpModel m = GpModel::condition(inst.X, inst.y, inst.params);
  const AcquisitionSurface s(m, context(m, 0.4));
  const Box bounds(v2(-3, -3), v2(3, 3));
  const SearchConfig cfg;
  const double w = penalty_weight(cfg, cfg.penalty_rounds - 1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 30; ++i) {
    const Vector start = v2(u(rng), u(rng));
    const Vector out = refine(s, start, bounds, cfg);
    CHECK(bounds.contains(out));
    CHECK(s.penalized(out, w) >= s.penalized(start, w));
  }
}

TEST_CASE("refinement finds the 1-d maximizer of a dense scan") {
  const GpModel m = two_point_model();
  const AcquisitionSurface s(m, context(m, 0.9));
  const Box bounds(v1(-1.0), v1(3.0));
  double best_x = 0.0;
  double best = -1.0;
  for (int i = 0; i <= 400000; ++i) {
    const double x = -1.0 + 4.0 * i / 400000.0;
    const SurfacePoint p = s.evaluate(v1(x));
    if (p.variance > s.variance_limit()) continue;
    if (p.acquisition > best) {
      best = p.acquisition;
      best_x = x;
    }
  }
  const Vector out = refine(s, v1(best_x - 0.3), bounds, SearchConfig{});
  CHECK(std::abs(out[0] - best_x) < 1e-3);
}

TEST_CASE("refinement rejects a start outside the bounds") {
  const GpModel m = two_point_model();
  const AcquisitionSurface s(m, context(m, 0.5));
  CHECK_THROWS_AS(refine(s, v1(5.0), Box(v1(-1.0), v1(1.0)), SearchConfig{}), std::invalid_argument);
}

TEST_CASE("no admissible candidate falls back to the lowest variance") {
  const GpModel m = two_point_model();
  AcquisitionContext ctx = context(m, 1e-6);
  const AcquisitionSurface s(m, ctx);
  // Every point here has variance well above tau k0.
  const Box bounds(v1(2.5), v1(5.0));
  std::mt19937_64 rng(4);
  const Proposal p = propose(s, bounds, v1(1.0), SearchConfig{}, rng);
  CHECK(p.fallback);
  CHECK(bounds.contains(p.x));
  CHECK(p.x[0] < 2.6);  // nearest end to the data
  CHECK(p.value.variance > ctx.tau * m.k0());
}

TEST_CASE("feasibility model steers proposals into the feasible region") {
  std::vector<Vector> x;
  std::vector<double> y;
  std::vector<bool> ok;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const Vector p = v2(i - 2.0, j - 2.0);
      x.push_back(p);
      y.push_back(-p.squaredNorm() + 2.0 * p[0]);
      ok.push_back(p[0] <= 0.0);
    }
  }
  const GpModel m = GpModel::fit(x, y);
  const FeasibilityModel fm = FeasibilityModel::fit(x, ok);
  AcquisitionContext ctx;
  double inc = -1e300;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (ok[i]) inc = std::max(inc, m.normalization().to_normalized(y[i]));
  }
  ctx.incumbent = inc;
  ctx.tau = 0.5;
  const AcquisitionSurface s(m, ctx, &fm);
  REQUIRE(s.constrained_feasibility());
  std::mt19937_64 rng(5);
  const Proposal p = propose(s, Box(v2(-2.5, -2.5), v2(2.5, 2.5)), v2(0.0, 0.0), SearchConfig{}, rng);
  CHECK_FALSE(p.fallback);
  CHECK(p.value.p_feasible >= 0.5);
  CHECK(fm.probability(p.x) >= 0.5);
}

TEST_CASE("penalty schedule") {
  const SearchConfig cfg;
  CHECK(penalty_weight(cfg, 0) == 1e2);
  CHECK(penalty_weight(cfg, 1) == 1e3);
  CHECK(penalty_weight(cfg, 2) == doctest::Approx(1e4));
}

TEST_CASE("search config validation") {
  SearchConfig cfg;
  CHECK(cfg.candidates_for(3) == 300);
  cfg.n_candidates = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.local_fraction = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.refine_steps = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("same rng state gives the same proposal") {
  const auto inst = testing::random_instance(9, 2, 8);
  const GpModel m = GpModel::condition(inst.X, inst.y, inst.params);
  const AcquisitionSurface s(m, context(m, 0.5));
  const Box bounds = feasible_domain_bounds(inst.X, m, 0.5, EigenMode::lambda_min).box;
  std::mt19937_64 a(77);
  std::mt19937_64 b(77);
  CHECK(propose(s, bounds, inst.X[0], SearchConfig{}, a).x == propose(s, bounds, inst.X[0], SearchConfig{}, b).x);
}

TEST_CASE("property: grid-oracle regret within 5%") {
  const auto r = testing::inner_search_grid_regret();
  INFO(r.detail);
  CHECK(r.pass);
}

TEST_CASE("property: run proposals respect the variance limit") {
  const auto r = testing::run_proposals_respect_variance();
  INFO(r.detail);
  CHECK(r.pass);
}
