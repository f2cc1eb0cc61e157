#pragma once

#include <random>

#include "aebo/acquisition.hpp"
#include "aebo/gp.hpp"

namespace aebo {

struct SearchConfig {
  int n_candidates = 0;             // 0 means 100 * d
  double local_fraction = 0.5;      // share of candidates drawn around the incumbent
  double local_radius_scale = 1.0;  // local sampling std, in lengthscales
  int refine_top = 5;               // refined candidates per pool
  double seed_separation = 1.0;     // min distance between refined seeds, in lengthscales
  int refine_steps = 40;            // ascent steps per penalty round
  int penalty_rounds = 3;
  double penalty_base = 1e2;
  double penalty_growth = 10.0;
  double constraint_tolerance = 1e-9;

  void validate() const;
  [[nodiscard]] int candidates_for(int dim) const { return n_candidates > 0 ? n_candidates : 100 * dim; }
};

/// Acquisition value and constraint state at one point.
struct SurfacePoint {
  double acquisition = 0.0;
  double variance = 0.0;
  double p_feasible = 1.0;
};

/// The objective of the inner problem: EI (times Pr(feasible) when a feasibility model
/// is attached), with sigma^2 <= tau k0 and Pr(feasible) >= 0.5 as constraints.
class AcquisitionSurface {
 public:
  AcquisitionSurface(const GpModel& model, AcquisitionContext ctx, const FeasibilityModel* feasibility = nullptr,
                     bool variance_constrained = true);

  [[nodiscard]] SurfacePoint evaluate(const Vector& x) const;
  [[nodiscard]] Vector acquisition_gradient(const Vector& x) const;

  [[nodiscard]] double variance_limit() const;
  [[nodiscard]] double variance_violation(const SurfacePoint& p) const;
  [[nodiscard]] double feasibility_violation(const SurfacePoint& p) const;
  [[nodiscard]] bool satisfies(const SurfacePoint& p, double tolerance) const;

  /// acquisition - weight * (variance_violation^2 + feasibility_violation^2)
  [[nodiscard]] double penalized(const Vector& x, double weight) const;
  [[nodiscard]] Vector penalized_gradient(const Vector& x, double weight) const;

  [[nodiscard]] const GpModel& model() const { return *model_; }
  [[nodiscard]] const AcquisitionContext& context() const { return ctx_; }
  [[nodiscard]] bool constrained_feasibility() const { return feasibility_ != nullptr && !feasibility_->trivial(); }

 private:
  const GpModel* model_;
  AcquisitionContext ctx_;
  const FeasibilityModel* feasibility_;
  bool variance_constrained_;
};

struct Proposal {
  Vector x;
  SurfacePoint value;
  bool fallback = false;  // no candidate met the constraints
};

/// Penalty weight used in refinement round `round` (0-based).
double penalty_weight(const SearchConfig& cfg, int round);

/// Projected ascent on the penalized acquisition inside `bounds`. The result never scores
/// below `start` under the final-round penalty weight.
Vector refine(const AcquisitionSurface& surface, const Vector& start, const Box& bounds, const SearchConfig& cfg);

/// Maximizes the acquisition over `bounds` from global and incumbent-local candidates.
Proposal propose(const AcquisitionSurface& surface, const Box& bounds, const Vector& incumbent,
                 const SearchConfig& cfg, std::mt19937_64& rng);

}  // namespace aebo
