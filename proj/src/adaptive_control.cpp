#include "aebo/adaptive_control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aebo/acquisition.hpp"
#include "aebo/normal.hpp"

namespace aebo {

namespace {
constexpr int kBisectionIterations = 50;
}

void ControlParams::validate() const {
  if (!(kappa > 0.0 && kappa < 0.5)) throw std::invalid_argument("ControlParams: kappa must be in (0, 0.5)");
  if (!(delta > 0.0)) throw std::invalid_argument("ControlParams: delta must be positive");
  if (!(xi0 >= 0.0)) throw std::invalid_argument("ControlParams: xi0 must be >= 0");
  if (!(tau_min > 0.0 && tau_min < tau_max && tau_max < 1.0)) {
    throw std::invalid_argument("ControlParams: need 0 < tau_min < tau_max < 1");
  }
  if (!std::isfinite(boundary_mean)) throw std::invalid_argument("ControlParams: non-finite boundary mean");
}

double AnnealSchedule::xi(int t) const {
  if (end <= start) return t >= end ? 0.0 : xi0;
  const double frac = static_cast<double>(end - t) / static_cast<double>(end - start);
  return xi0 * std::clamp(frac, 0.0, 1.0);
}

double anneal_xi(const AnnealSchedule& schedule, int t) { return schedule.xi(t); }

double sigma_zero(double xi, const ControlParams& params) {
  if (!(xi >= 0.0)) throw std::invalid_argument("sigma_zero: xi must be >= 0");
  const double q = stats::normal_quantile(1.0 - params.kappa);
  if (!(q > 0.0)) throw std::invalid_argument("sigma_zero: kappa must be below 0.5");
  return (xi + params.delta) / q;
}

double ei_floor(double sigma0, double delta) {
  if (!(sigma0 > 0.0)) throw std::invalid_argument("ei_floor: sigma0 must be positive");
  const double u = -delta / sigma0;
  return -delta * stats::normal_cdf(u) + sigma0 * stats::normal_pdf(u);
}

double boundary_improvement(double tau, double f_prime, double k0, double boundary_mean) {
  return expected_improvement(boundary_mean, std::sqrt(tau * k0), f_prime);
}

TauSolution solve_tau(double f_prime, double k0, double ei0, const ControlParams& params) {
  if (!std::isfinite(f_prime)) throw std::invalid_argument("solve_tau: non-finite incumbent");
  if (!(ei0 > 0.0)) throw std::invalid_argument("solve_tau: ei0 must be positive");
  params.validate();

  auto g = [&](double tau) { return boundary_improvement(tau, f_prime, k0, params.boundary_mean) - ei0; };

  double lo = params.tau_min;
  double hi = params.tau_max;
  const double g_lo = g(lo);
  const double g_hi = g(hi);
  // g is increasing in tau, so an out-of-bracket root means the nearer endpoint is closest.
  if (g_lo >= 0.0) return {lo, g_lo != 0.0, g_lo};
  if (g_hi <= 0.0) return {hi, g_hi != 0.0, g_hi};

  for (int i = 0; i < kBisectionIterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return {mid, false, 0.0};
    (gm < 0.0 ? lo : hi) = mid;
  }
  const double tau = 0.5 * (lo + hi);
  return {tau, false, g(tau)};
}

}  // namespace aebo
