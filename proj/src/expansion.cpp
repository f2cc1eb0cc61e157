#include "aebo/expansion.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace aebo {

std::string_view to_string(EigenMode mode) {
  return mode == EigenMode::lambda_max ? "lambda_max" : "lambda_min";
}

EigenMode eigen_mode_from_string(std::string_view name) {
  if (name == "lambda_max") return EigenMode::lambda_max;
  if (name == "lambda_min") return EigenMode::lambda_min;
  throw std::invalid_argument("unknown eigen mode: " + std::string(name));
}

Box min_bounding_box(std::span<const Vector> points) {
  if (points.empty()) throw std::invalid_argument("min_bounding_box: empty point set");
  Vector lo = points.front();
  Vector hi = points.front();
  for (const auto& p : points.subspan(1)) {
    if (p.size() != lo.size()) throw std::invalid_argument("min_bounding_box: dimension mismatch");
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {lo, hi};
}

double expansion_constant(double k0, std::size_t n, double lambda, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("expansion_constant: tau must be in (0,1)");
  if (!(lambda > 0.0)) throw std::invalid_argument("expansion_constant: eigenvalue must be positive");
  const double ratio = (1.0 - tau) * k0 / (static_cast<double>(n) * lambda);
  if (ratio >= 1.0) return 0.0;
  return -std::log(ratio);
}

double precision_eigenvalue(const GpModel& model, EigenMode mode) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(model.covariance(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("precision_eigenvalue: eigen-decomposition failed");
  }
  // Eigenvalues come sorted ascending; those of A are their reciprocals.
  const Vector& ev = solver.eigenvalues();
  const double smallest = ev[0];
  const double largest = ev[ev.size() - 1];
  if (!(smallest > 0.0)) throw std::runtime_error("precision_eigenvalue: covariance not positive definite");
  return mode == EigenMode::lambda_max ? 1.0 / smallest : 1.0 / largest;
}

Vector expansion_rate(const GpModel& model, double tau, EigenMode mode) {
  if (model.size() < 2) throw std::invalid_argument("expansion_rate: need more than one observation");
  const double lambda = precision_eigenvalue(model, mode);
  const double C = expansion_constant(model.k0(), model.size(), lambda, tau);
  // Isotropic kernel: every axis shares the lengthscale.
  return Vector::Constant(model.dim(), std::sqrt(C) * model.params().lengthscale);
}

ExpansionBounds feasible_domain_bounds(std::span<const Vector> points, const GpModel& model, double tau,
                                       EigenMode mode) {
  if (points.size() != model.size()) {
    throw std::invalid_argument("feasible_domain_bounds: model was not fitted on these points");
  }
  const Box data_box = min_bounding_box(points);
  ExpansionBounds out;
  out.mode = mode;
  out.rate = expansion_rate(model, tau, mode);
  out.box = Box(data_box.lower - out.rate, data_box.upper + out.rate);
  return out;
}

}  // namespace aebo
