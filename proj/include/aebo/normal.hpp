#pragma once

// Standard normal density, distribution and quantile.

namespace aebo::stats {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double normal_pdf(double u);
double log_normal_pdf(double u);
double normal_cdf(double u);
/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

}  // namespace aebo::stats
