#include "aebo/inner_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace aebo {

namespace {

constexpr double kMinStd = 1e-12;
constexpr int kRepairIterations = 60;

struct Candidate {
  Vector x;
  SurfacePoint value;
  bool ok = false;
};

// Feasible candidates first, ordered by acquisition; then the rest by total violation.
bool better_for_refinement(const AcquisitionSurface& s, const Candidate& a, const Candidate& b) {
  if (a.ok != b.ok) return a.ok;
  if (a.ok) return a.value.acquisition > b.value.acquisition;
  const double va = s.variance_violation(a.value) + s.feasibility_violation(a.value);
  const double vb = s.variance_violation(b.value) + s.feasibility_violation(b.value);
  return va < vb;
}

}  // namespace

void SearchConfig::validate() const {
  if (n_candidates != 0 && n_candidates < 2) throw std::invalid_argument("SearchConfig: n_candidates must be >= 2");
  if (!(local_fraction >= 0.0 && local_fraction <= 1.0)) {
    throw std::invalid_argument("SearchConfig: local_fraction must be in [0,1]");
  }
  if (!(local_radius_scale > 0.0)) throw std::invalid_argument("SearchConfig: local_radius_scale must be positive");
  if (refine_steps < 0 || refine_top < 0 || penalty_rounds < 1) {
    throw std::invalid_argument("SearchConfig: negative refinement budget");
  }
  if (!(seed_separation >= 0.0)) throw std::invalid_argument("SearchConfig: negative seed separation");
  if (!(constraint_tolerance >= 0.0)) throw std::invalid_argument("SearchConfig: negative constraint tolerance");
}

AcquisitionSurface::AcquisitionSurface(const GpModel& model, AcquisitionContext ctx,
                                       const FeasibilityModel* feasibility, bool variance_constrained)
    : model_(&model), ctx_(ctx), feasibility_(feasibility), variance_constrained_(variance_constrained) {
  if (variance_constrained_) ctx_.validate();
}

SurfacePoint AcquisitionSurface::evaluate(const Vector& x) const {
  const Prediction p = model_->predict(x);
  SurfacePoint out;
  out.variance = p.variance;
  out.p_feasible = feasibility_ ? feasibility_->probability(x) : 1.0;
  out.acquisition = expected_improvement(p.mean, std::sqrt(p.variance), ctx_) * out.p_feasible;
  return out;
}

Vector AcquisitionSurface::acquisition_gradient(const Vector& x) const {
  const auto [p, g] = model_->predict_with_gradient(x);
  const double sd = std::sqrt(p.variance);
  const EiPartials d = expected_improvement_partials(p.mean, sd, ctx_.threshold());
  Vector grad = d.d_mean * g.mean;
  if (sd > kMinStd) grad += d.d_std * g.variance / (2.0 * sd);
  if (feasibility_ && !feasibility_->trivial()) {
    const double ei = expected_improvement(p.mean, sd, ctx_);
    const double pf = feasibility_->probability(x);
    grad = pf * grad + ei * feasibility_->probability_gradient(x);
  }
  return grad;
}

double AcquisitionSurface::variance_limit() const {
  return variance_constrained_ ? ctx_.tau * model_->k0() : std::numeric_limits<double>::infinity();
}

double AcquisitionSurface::variance_violation(const SurfacePoint& p) const {
  return std::max(0.0, p.variance - variance_limit());
}

double AcquisitionSurface::feasibility_violation(const SurfacePoint& p) const {
  return std::max(0.0, 0.5 - p.p_feasible);
}

bool AcquisitionSurface::satisfies(const SurfacePoint& p, double tolerance) const {
  return p.variance <= variance_limit() + tolerance && p.p_feasible >= 0.5;
}

double AcquisitionSurface::penalized(const Vector& x, double weight) const {
  const SurfacePoint p = evaluate(x);
  const double vv = variance_violation(p);
  const double fv = feasibility_violation(p);
  return p.acquisition - weight * (vv * vv + fv * fv);
}

Vector AcquisitionSurface::penalized_gradient(const Vector& x, double weight) const {
  Vector grad = acquisition_gradient(x);
  const SurfacePoint p = evaluate(x);
  const double vv = variance_violation(p);
  if (vv > 0.0) grad -= 2.0 * weight * vv * model_->predict_gradient(x).variance;
  const double fv = feasibility_violation(p);
  if (fv > 0.0 && feasibility_) grad += 2.0 * weight * fv * feasibility_->probability_gradient(x);
  return grad;
}

double penalty_weight(const SearchConfig& cfg, int round) {
  return cfg.penalty_base * std::pow(cfg.penalty_growth, round);
}

Vector refine(const AcquisitionSurface& surface, const Vector& start, const Box& bounds, const SearchConfig& cfg) {
  if (!bounds.contains(start)) throw std::invalid_argument("refine: start outside bounds");
  const double scale = surface.model().params().lengthscale;
  const double min_step = 1e-9 * scale;

  Vector x = start;
  for (int round = 0; round < cfg.penalty_rounds; ++round) {
    const double w = penalty_weight(cfg, round);
    double fx = surface.penalized(x, w);
    double step = 0.1 * scale;
    for (int it = 0; it < cfg.refine_steps; ++it) {
      const Vector g = surface.penalized_gradient(x, w);
      const double gn = g.norm();
      if (!std::isfinite(gn) || !std::isfinite(fx)) return start;
      if (gn == 0.0) break;
      const Vector dir = g / gn;
      bool moved = false;
      while (step >= min_step) {
        const Vector trial = bounds.clip(x + step * dir);
        const double ft = surface.penalized(trial, w);
        if (ft > fx) {
          x = trial;
          fx = ft;
          moved = true;
          step *= 2.0;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
  }

  const double w_final = penalty_weight(cfg, cfg.penalty_rounds - 1);
  if (!(surface.penalized(x, w_final) >= surface.penalized(start, w_final))) return start;
  return x;
}

Proposal propose(const AcquisitionSurface& surface, const Box& bounds, const Vector& incumbent,
                 const SearchConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  const int d = bounds.dim();
  if (!bounds.non_degenerate()) throw std::invalid_argument("propose: degenerate bounds");
  if (incumbent.size() != d) throw std::invalid_argument("propose: incumbent dimension mismatch");
  const double tol = cfg.constraint_tolerance;

  const int n_total = cfg.candidates_for(d);
  const int n_local = static_cast<int>(std::lround(cfg.local_fraction * n_total));
  const int n_global = n_total - n_local;

  // All random draws happen up front so refinement order cannot perturb the stream.
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double radius = cfg.local_radius_scale * surface.model().params().lengthscale;
  const Vector anchor = bounds.clip(incumbent);

  auto make = [&](Vector x) {
    Candidate c;
    c.value = surface.evaluate(x);
    c.ok = surface.satisfies(c.value, tol);
    c.x = std::move(x);
    return c;
  };

  std::vector<Candidate> global_pool;
  std::vector<Candidate> local_pool;
  global_pool.reserve(static_cast<std::size_t>(n_global));
  local_pool.reserve(static_cast<std::size_t>(n_local));
  // Global pool: Latin hypercube, so each axis is covered evenly even with few draws.
  std::vector<Vector> global_x(static_cast<std::size_t>(n_global), Vector(d));
  std::vector<int> strata(static_cast<std::size_t>(n_global));
  for (int j = 0; j < d; ++j) {
    std::iota(strata.begin(), strata.end(), 0);
    std::shuffle(strata.begin(), strata.end(), rng);
    for (int i = 0; i < n_global; ++i) {
      const double u = (strata[static_cast<std::size_t>(i)] + unif(rng)) / n_global;
      global_x[static_cast<std::size_t>(i)][j] =
          std::min(bounds.lower[j] + u * (bounds.upper[j] - bounds.lower[j]), bounds.upper[j]);
    }
  }
  for (auto& x : global_x) global_pool.push_back(make(std::move(x)));
  for (int i = 0; i < n_local; ++i) {
    Vector x(d);
    for (int j = 0; j < d; ++j) x[j] = anchor[j] + radius * gauss(rng);
    local_pool.push_back(make(bounds.clip(x)));
  }

  // Moves an infeasible point back toward a feasible anchor along the joining segment.
  auto repair = [&](const Vector& from, const Vector& to) -> std::optional<Candidate> {
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < kRepairIterations; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (surface.satisfies(surface.evaluate(from + mid * (to - from)), tol)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    Candidate c = make(from + lo * (to - from));
    if (!c.ok) return std::nullopt;
    return c;
  };

  auto nearest_feasible_anchor = [&](const Vector& x) -> std::optional<Vector> {
    const auto& inputs = surface.model().inputs();
    std::optional<Vector> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& p : inputs) {
      if (!bounds.contains(p)) continue;
      const double dist = (p - x).squaredNorm();
      if (dist < best_d && surface.satisfies(surface.evaluate(p), tol)) {
        best_d = dist;
        best = p;
      }
    }
    return best;
  };

  std::vector<Candidate> finalists;
  for (auto* pool : {&global_pool, &local_pool}) {
    std::vector<std::size_t> order(pool->size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return better_for_refinement(surface, (*pool)[a], (*pool)[b]);
    });
    // Best-first, skipping seeds that crowd an already chosen one so that distinct
    // basins get refined. Crowded seeds fill any remaining slots.
    const auto top = std::min<std::size_t>(static_cast<std::size_t>(cfg.refine_top), order.size());
    const double min_gap2 = std::pow(cfg.seed_separation * surface.model().params().lengthscale, 2);
    std::vector<std::size_t> chosen;
    std::vector<std::size_t> crowded;
    for (std::size_t i : order) {
      if (chosen.size() == top) break;
      const bool near = std::any_of(chosen.begin(), chosen.end(), [&](std::size_t c) {
        return ((*pool)[i].x - (*pool)[c].x).squaredNorm() < min_gap2;
      });
      (near ? crowded : chosen).push_back(i);
    }
    for (std::size_t i = 0; chosen.size() < top && i < crowded.size(); ++i) chosen.push_back(crowded[i]);

    for (std::size_t idx : chosen) {
      const Candidate& seed = (*pool)[idx];
      Candidate refined = make(refine(surface, seed.x, bounds, cfg));
      if (!refined.ok) {
        std::optional<Vector> feasible_anchor;
        if (seed.ok) {
          feasible_anchor = seed.x;
        } else {
          feasible_anchor = nearest_feasible_anchor(refined.x);
        }
        if (feasible_anchor) {
          if (auto fixed = repair(*feasible_anchor, refined.x)) refined = std::move(*fixed);
        }
      }
      finalists.push_back(std::move(refined));
    }
  }

  const Candidate* best = nullptr;
  auto consider = [&](const Candidate& c) {
    if (!c.ok || !bounds.contains(c.x)) return;
    if (best == nullptr || c.value.acquisition > best->value.acquisition) best = &c;
  };
  for (const auto& c : global_pool) consider(c);
  for (const auto& c : local_pool) consider(c);
  for (const auto& c : finalists) consider(c);

  if (best != nullptr) return {best->x, best->value, false};

  // Nothing met the constraints: take the lowest-variance candidate seen.
  const Candidate* fallback = nullptr;
  auto lowest = [&](const Candidate& c) {
    if (fallback == nullptr || c.value.variance < fallback->value.variance) fallback = &c;
  };
  for (const auto& c : global_pool) lowest(c);
  for (const auto& c : local_pool) lowest(c);
  for (const auto& c : finalists) lowest(c);
  return {fallback->x, fallback->value, true};
}

}  // namespace aebo
