#pragma once

#include <optional>
#include <span>
#include <vector>

#include "aebo/gp.hpp"

namespace aebo {

/// Everything the acquisition needs besides the posterior itself. All values are in
/// normalized output units and follow the maximization convention.
struct AcquisitionContext {
  double incumbent = 0.0;  // f': best normalized output observed so far
  double epsilon = 0.01;   // minimum improvement offset
  double tau = 0.5;        // variance threshold coefficient, sigma^2 <= tau * k0

  void validate() const;
  [[nodiscard]] double threshold() const { return incumbent + epsilon; }
};

/// E[max(0, f - threshold)] for f ~ N(mean, std^2). Switches to a continued-fraction
/// tail for u < -8 where the closed form cancels.
double expected_improvement(double mean, double std, double threshold);
double expected_improvement(double mean, double std, const AcquisitionContext& ctx);

/// log EI; finite whenever std > 0.
double log_expected_improvement(double mean, double std, double threshold);

/// dEI/dmean = Phi(u) and dEI/dstd = phi(u).
struct EiPartials {
  double d_mean = 0.0;
  double d_std = 0.0;
};
EiPartials expected_improvement_partials(double mean, double std, double threshold);

namespace detail {
/// u * Phi(u) + phi(u) evaluated directly.
double ei_standard_direct(double u);
/// Same quantity for u < 0 via continued fractions of the Mills ratio.
double ei_standard_tail(double u);
double log_ei_standard_tail(double u);
}  // namespace detail

struct ConstrainedValue {
  double value = 0.0;
  bool admissible = false;
};

/// EI weighted by the probability of feasibility; admissible iff p >= 0.5.
ConstrainedValue constrained_acquisition(double mean, double std, const AcquisitionContext& ctx,
                                         double p_feasible);

/// Probabilistic classifier for the constraint indicator: a GP regressed on +1/-1 labels
/// with a probit link. Degenerates to a constant 1 until both classes have been seen.
class FeasibilityModel {
 public:
  FeasibilityModel() = default;

  static FeasibilityModel fit(std::span<const Vector> points, const std::vector<bool>& feasible);

  [[nodiscard]] bool trivial() const { return !model_.has_value(); }
  [[nodiscard]] double probability(const Vector& x) const;
  [[nodiscard]] Vector probability_gradient(const Vector& x) const;
  [[nodiscard]] const GpModel* model() const { return model_ ? &*model_ : nullptr; }

 private:
  std::optional<GpModel> model_;
};

double feasibility_probability(const FeasibilityModel& fm, const Vector& x);

}  // namespace aebo
