#pragma once

namespace aebo {

/// Knobs of the adaptive exploration/exploitation rule. Normalized output units.
struct ControlParams {
  double xi0 = 0.1;            // initial room for improvement
  double kappa = 0.1;          // probability slack, must lie in (0, 0.5)
  double delta = 0.01;         // gap between incumbent and nearby mean
  double boundary_mean = 0.0;  // mu_m, the prior mean
  double tau_min = 1e-4;
  double tau_max = 0.999;

  void validate() const;
};

/// Linear decay of xi from xi0 at `start` to 0 at `end`.
struct AnnealSchedule {
  int start = 0;
  int end = 1;
  double xi0 = 0.1;

  [[nodiscard]] double xi(int t) const;
};

double anneal_xi(const AnnealSchedule& schedule, int t);

/// (xi + delta) / Phi^-1(1 - kappa).
double sigma_zero(double xi, const ControlParams& params);

/// -delta Phi(-delta / sigma0) + sigma0 phi(-delta / sigma0).
double ei_floor(double sigma0, double delta);

/// Expected improvement over f' of a point with mean mu_m and variance tau * k0.
double boundary_improvement(double tau, double f_prime, double k0, double boundary_mean);

struct TauSolution {
  double tau = 0.0;
  bool clamped = false;
  double residual = 0.0;  // boundary_improvement(tau) - ei0
};

/// Bisection for boundary_improvement(tau) == ei0 on [tau_min, tau_max]. When the root
/// lies outside the bracket the nearer endpoint is returned.
TauSolution solve_tau(double f_prime, double k0, double ei0, const ControlParams& params);

}  // namespace aebo
