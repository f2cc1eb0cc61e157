#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace aebo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Axis-aligned box [lower, upper] in input units.
struct Box {
  Vector lower;
  Vector upper;

  Box() = default;
  Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) {
      throw std::invalid_argument("Box: lower/upper dimension mismatch");
    }
  }

  [[nodiscard]] int dim() const { return static_cast<int>(lower.size()); }
  [[nodiscard]] Vector center() const { return 0.5 * (lower + upper); }
  [[nodiscard]] Vector width() const { return upper - lower; }

  [[nodiscard]] bool contains(const Vector& x, double tol = 0.0) const {
    if (x.size() != lower.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
    }
    return true;
  }

  [[nodiscard]] bool contains(const Box& other) const {
    return contains(other.lower) && contains(other.upper);
  }

  /// True when every axis has strictly positive width.
  [[nodiscard]] bool non_degenerate() const {
    if (lower.size() == 0) return false;
    return ((upper - lower).array() > 0.0).all();
  }

  [[nodiscard]] Vector clip(const Vector& x) const {
    return x.cwiseMax(lower).cwiseMin(upper);
  }
};

inline Box make_box(std::span<const double> lower, std::span<const double> upper) {
  return Box(Eigen::Map<const Vector>(lower.data(), static_cast<Eigen::Index>(lower.size())),
             Eigen::Map<const Vector>(upper.data(), static_cast<Eigen::Index>(upper.size())));
}

}  // namespace aebo
