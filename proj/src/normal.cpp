#include "aebo/normal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace aebo::stats {

double normal_pdf(double u) { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }

double log_normal_pdf(double u) { return -0.5 * u * u - kLogSqrt2Pi; }

double normal_cdf(double u) { return 0.5 * std::erfc(-u / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

}  // namespace aebo::stats
