#pragma once

#include <span>
#include <string_view>

#include "aebo/gp.hpp"

namespace aebo {

/// Which extreme eigenvalue of A = (K + noise I)^-1 enters the expansion constant.
/// lambda_max gives a box guaranteed to contain {sigma^2 <= tau k0}; lambda_min gives a
/// tighter heuristic box.
enum class EigenMode { lambda_max, lambda_min };

std::string_view to_string(EigenMode mode);
EigenMode eigen_mode_from_string(std::string_view name);

struct ExpansionBounds {
  Box box;
  Vector rate;  // r_i per axis, input units
  EigenMode mode = EigenMode::lambda_min;
};

/// Coordinate-wise extrema of the points.
Box min_bounding_box(std::span<const Vector> points);

/// C = -log((1 - tau) k0 / (n lambda)), clamped below at 0.
double expansion_constant(double k0, std::size_t n, double lambda, double tau);

/// Largest or smallest eigenvalue of (K + noise I)^-1.
double precision_eigenvalue(const GpModel& model, EigenMode mode);

/// r_i = sqrt(C) * l_i. Requires model.size() > 1.
Vector expansion_rate(const GpModel& model, double tau, EigenMode mode);

/// Data bounding box widened by r_i on each side of axis i.
ExpansionBounds feasible_domain_bounds(std::span<const Vector> points, const GpModel& model, double tau,
                                       EigenMode mode);

}  // namespace aebo
