#include "aebo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aebo/normal.hpp"

namespace aebo {

namespace {

constexpr double kTailSwitch = -8.0;
constexpr int kContinuedFractionDepth = 300;

// Backward evaluation of T_1 where T_k = k / (t + T_{k+1}). The Mills ratio is
// M(t) = 1 / (t + T_1), and 1 - t M(t) = T_1 / (t + T_1).
double mills_tail_term(double t) {
  double T = 0.0;
  for (int k = kContinuedFractionDepth; k >= 1; --k) T = k / (t + T);
  return T;
}

void check_std(double std) {
  if (!(std >= 0.0)) throw std::invalid_argument("expected_improvement: negative std");
}

}  // namespace

void AcquisitionContext::validate() const {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("AcquisitionContext: epsilon must be >= 0");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("AcquisitionContext: tau must be in (0,1)");
  if (!std::isfinite(incumbent)) throw std::invalid_argument("AcquisitionContext: non-finite incumbent");
}

namespace detail {

double ei_standard_direct(double u) { return u * stats::normal_cdf(u) + stats::normal_pdf(u); }

double ei_standard_tail(double u) {
  const double t = -u;
  const double T = mills_tail_term(t);
  return stats::normal_pdf(u) * T / (t + T);
}

double log_ei_standard_tail(double u) {
  const double t = -u;
  const double T = mills_tail_term(t);
  return stats::log_normal_pdf(u) + std::log(T) - std::log(t + T);
}

}  // namespace detail

double expected_improvement(double mean, double std, double threshold) {
  check_std(std);
  const double diff = mean - threshold;
  if (std == 0.0) return std::max(0.0, diff);
  const double u = diff / std;
  const double h = u < kTailSwitch ? detail::ei_standard_tail(u) : detail::ei_standard_direct(u);
  return std::max(0.0, std * h);
}

double expected_improvement(double mean, double std, const AcquisitionContext& ctx) {
  return expected_improvement(mean, std, ctx.threshold());
}

double log_expected_improvement(double mean, double std, double threshold) {
  check_std(std);
  const double diff = mean - threshold;
  if (std == 0.0) return diff > 0.0 ? std::log(diff) : -std::numeric_limits<double>::infinity();
  const double u = diff / std;
  if (u < kTailSwitch) return std::log(std) + detail::log_ei_standard_tail(u);
  return std::log(std) + std::log(detail::ei_standard_direct(u));
}

EiPartials expected_improvement_partials(double mean, double std, double threshold) {
  check_std(std);
  const double diff = mean - threshold;
  if (std == 0.0) return {diff > 0.0 ? 1.0 : 0.0, 0.0};
  const double u = diff / std;
  return {stats::normal_cdf(u), stats::normal_pdf(u)};
}

ConstrainedValue constrained_acquisition(double mean, double std, const AcquisitionContext& ctx,
                                         double p_feasible) {
  if (!(p_feasible >= 0.0 && p_feasible <= 1.0)) {
    throw std::invalid_argument("constrained_acquisition: p_feasible must be in [0,1]");
  }
  return {expected_improvement(mean, std, ctx) * p_feasible, p_feasible >= 0.5};
}

FeasibilityModel FeasibilityModel::fit(std::span<const Vector> points, const std::vector<bool>& feasible) {
  if (points.size() != feasible.size()) {
    throw std::invalid_argument("FeasibilityModel: points and labels differ in length");
  }
  FeasibilityModel fm;
  std::size_t n_feasible = 0;
  for (bool f : feasible) n_feasible += f ? 1 : 0;
  if (n_feasible == 0 || n_feasible == feasible.size()) return fm;

  std::vector<double> labels(feasible.size());
  for (std::size_t i = 0; i < feasible.size(); ++i) labels[i] = feasible[i] ? 1.0 : -1.0;
  FitOptions opts;
  opts.normalize = false;
  opts.fixed_noise = 1e-6;
  fm.model_ = GpModel::fit(points, labels, opts);
  return fm;
}

double FeasibilityModel::probability(const Vector& x) const {
  if (!model_) return 1.0;
  const Prediction p = model_->predict(x);
  return stats::normal_cdf(p.mean / std::sqrt(p.variance + 1.0));
}

Vector FeasibilityModel::probability_gradient(const Vector& x) const {
  if (!model_) return Vector::Zero(x.size());
  const Prediction p = model_->predict(x);
  const PredictionGradient g = model_->predict_gradient(x);
  const double s = std::sqrt(p.variance + 1.0);
  const double z = p.mean / s;
  // d/dx Phi(m / s) with s = sqrt(v + 1)
  return stats::normal_pdf(z) * (g.mean / s - p.mean * g.variance / (2.0 * s * s * s));
}

double feasibility_probability(const FeasibilityModel& fm, const Vector& x) { return fm.probability(x); }

}  // namespace aebo
