#include "aebo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace aebo {

namespace {

constexpr double kLengthscaleSpan = 1e2;  // search in [m / span, m * span]
constexpr double kMaxNoise = 1.0;          // normalized units
constexpr double kMaxJitter = 1e-2;        // relative to k0
constexpr double kPatternTolerance = 1e-3; // log-space step at which refinement stops

Matrix kernel_matrix(std::span<const Vector> inputs, const KernelParams& params) {
  const auto n = static_cast<Eigen::Index>(inputs.size());
  Matrix K(n, n);
  const double inv_two_l2 = 1.0 / (2.0 * params.lengthscale * params.lengthscale);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = params.signal_variance + params.noise_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r2 = (inputs[i] - inputs[j]).squaredNorm();
      K(i, j) = K(j, i) = params.signal_variance * std::exp(-r2 * inv_two_l2);
    }
  }
  return K;
}

Vector as_vector(std::span<const double> values) {
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void check_inputs(std::span<const Vector> inputs, std::span<const double> outputs) {
  if (inputs.size() != outputs.size()) {
    throw std::invalid_argument("GpModel: inputs and outputs differ in length");
  }
  if (inputs.empty()) throw std::invalid_argument("GpModel: no observations");
  const auto d = inputs.front().size();
  if (d < 1) throw std::invalid_argument("GpModel: zero-dimensional inputs");
  for (const auto& x : inputs) {
    if (x.size() != d) throw std::invalid_argument("GpModel: inconsistent input dimension");
    if (!x.allFinite()) throw std::invalid_argument("GpModel: non-finite input");
  }
  for (double y : outputs) {
    if (!std::isfinite(y)) throw std::invalid_argument("GpModel: non-finite output");
  }
}

}  // namespace

void KernelParams::validate() const {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw std::invalid_argument("KernelParams: lengthscale must be positive");
  }
  if (!(signal_variance > 0.0)) throw std::invalid_argument("KernelParams: k0 must be positive");
  if (!(noise_variance >= 0.0)) throw std::invalid_argument("KernelParams: noise must be >= 0");
}

void ObservationSet::add(Vector x, double y, bool feasible) {
  if (!points_.empty() && x.size() != points_.front().size()) {
    throw std::invalid_argument("ObservationSet: dimension mismatch");
  }
  if (x.size() < 1) throw std::invalid_argument("ObservationSet: zero-dimensional point");
  points_.push_back(std::move(x));
  outputs_.push_back(y);
  feasible_.push_back(feasible ? 1 : 0);
}

Normalization compute_normalization(std::span<const double> outputs) {
  Normalization norm;
  if (outputs.empty()) return norm;
  double sum = 0.0;
  for (double y : outputs) sum += y;
  norm.mean = sum / static_cast<double>(outputs.size());
  double ss = 0.0;
  for (double y : outputs) ss += (y - norm.mean) * (y - norm.mean);
  const double sd = std::sqrt(ss / static_cast<double>(outputs.size()));
  norm.scale = sd < 1e-12 ? 1.0 : sd;
  return norm;
}

double median_pairwise_distance(std::span<const Vector> points) {
  std::vector<double> d;
  d.reserve(points.size() * (points.size() - 1) / 2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) d.push_back((points[i] - points[j]).norm());
  }
  if (d.empty()) return 1.0;
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid > 0.0 ? *mid : 1.0;
}

double GpModel::log_marginal_likelihood(std::span<const Vector> inputs,
                                        std::span<const double> normalized_outputs,
                                        const KernelParams& params) {
  const Matrix K = kernel_matrix(inputs, params);
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Vector y = as_vector(normalized_outputs);
  const Vector alpha = llt.solve(y);
  const Matrix& L = llt.matrixLLT();
  double log_det_half = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) log_det_half += std::log(L(i, i));
  const double n = static_cast<double>(y.size());
  const double lml = -0.5 * y.dot(alpha) - log_det_half - 0.5 * n * std::log(2.0 * std::numbers::pi);
  return std::isfinite(lml) ? lml : -std::numeric_limits<double>::infinity();
}

GpModel GpModel::fit(std::span<const Vector> inputs, std::span<const double> outputs,
                     const FitOptions& options) {
  check_inputs(inputs, outputs);
  if (inputs.size() < 2) throw std::invalid_argument("GpModel::fit: need at least 2 observations");
  if (options.n_starts < 1) throw std::invalid_argument("GpModel::fit: n_starts must be >= 1");

  const Normalization norm = options.normalize ? compute_normalization(outputs) : Normalization{};
  std::vector<double> z(outputs.size());
  std::transform(outputs.begin(), outputs.end(), z.begin(),
                 [&](double y) { return norm.to_normalized(y); });

  const bool estimate_noise = !options.fixed_noise.has_value();
  const double fixed_noise = options.fixed_noise.value_or(0.0);
  if (!estimate_noise && !(fixed_noise >= 0.0)) {
    throw std::invalid_argument("GpModel::fit: fixed noise must be >= 0");
  }

  // Search in log space: theta = (log l, log noise).
  const double m = median_pairwise_distance(inputs);
  const double lo_l = std::log(m / kLengthscaleSpan);
  const double hi_l = std::log(m * kLengthscaleSpan);
  const double lo_n = std::log(std::max(options.noise_floor, 1e-300));
  const double hi_n = std::log(kMaxNoise);

  auto params_of = [&](double log_l, double log_noise) {
    KernelParams p;
    p.lengthscale = std::exp(log_l);
    p.signal_variance = 1.0;
    p.noise_variance = estimate_noise ? std::exp(log_noise) : fixed_noise;
    return p;
  };
  auto objective = [&](double log_l, double log_noise) {
    return log_marginal_likelihood(inputs, z, params_of(log_l, log_noise));
  };

  // Multi-start: log-spaced lengthscales across the search interval.
  const double start_noise = std::log(1e-2);
  double best_l = 0.5 * (lo_l + hi_l);
  double best_n = start_noise;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < options.n_starts; ++s) {
    const double frac = options.n_starts == 1 ? 0.5 : static_cast<double>(s) / (options.n_starts - 1);
    const double log_l = lo_l + frac * (hi_l - lo_l);
    const double val = objective(log_l, start_noise);
    if (val > best_val) {
      best_val = val;
      best_l = log_l;
    }
  }

  // Coordinate pattern search from the best start.
  double step = (hi_l - lo_l) / (2.0 * std::max(options.n_starts - 1, 1));
  while (step > kPatternTolerance) {
    bool improved = false;
    for (int coord = 0; coord < (estimate_noise ? 2 : 1); ++coord) {
      for (double dir : {1.0, -1.0}) {
        double cand_l = best_l;
        double cand_n = best_n;
        if (coord == 0) {
          cand_l = std::clamp(best_l + dir * step, lo_l, hi_l);
        } else {
          cand_n = std::clamp(best_n + dir * step, lo_n, hi_n);
        }
        if (cand_l == best_l && cand_n == best_n) continue;
        const double val = objective(cand_l, cand_n);
        if (val > best_val) {
          best_val = val;
          best_l = cand_l;
          best_n = cand_n;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }

  if (!std::isfinite(best_val)) {
    // Every candidate failed to factorize; fall back to the median distance and let
    // jitter escalation decide.
    best_l = std::log(m);
  }

  GpModel model;
  model.normalization_ = norm;
  model.build({inputs.begin(), inputs.end()}, as_vector(z), params_of(best_l, best_n));
  return model;
}

GpModel GpModel::condition(std::span<const Vector> inputs, std::span<const double> outputs,
                           const KernelParams& params, bool normalize) {
  check_inputs(inputs, outputs);
  params.validate();
  GpModel model;
  model.normalization_ = normalize ? compute_normalization(outputs) : Normalization{};
  Vector z(static_cast<Eigen::Index>(outputs.size()));
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    z[static_cast<Eigen::Index>(i)] = model.normalization_.to_normalized(outputs[i]);
  }
  model.build({inputs.begin(), inputs.end()}, std::move(z), params);
  return model;
}

void GpModel::build(std::vector<Vector> inputs, Vector targets, KernelParams params) {
  params.validate();
  inputs_ = std::move(inputs);
  targets_ = std::move(targets);
  dim_ = static_cast<int>(inputs_.front().size());

  // Jitter escalation: grow the diagonal term x10 until the factorization succeeds.
  const double max_noise = kMaxJitter * params.signal_variance;
  for (;;) {
    covariance_ = kernel_matrix(inputs_, params);
    llt_.compute(covariance_);
    if (llt_.info() == Eigen::Success) break;
    const double next = params.noise_variance > 0.0 ? params.noise_variance * 10.0
                                                    : 1e-12 * params.signal_variance;
    if (next > max_noise * (1.0 + 1e-12)) {
      throw FitError("GpModel: covariance not positive definite after jitter escalation to " +
                     std::to_string(params.noise_variance));
    }
    params.noise_variance = next;
  }
  params_ = params;
  alpha_ = llt_.solve(targets_);

  const Matrix& L = llt_.matrixLLT();
  double log_det_half = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) log_det_half += std::log(L(i, i));
  log_likelihood_ = -0.5 * targets_.dot(alpha_) - log_det_half -
                    0.5 * static_cast<double>(targets_.size()) * std::log(2.0 * std::numbers::pi);
}

double GpModel::kernel(const Vector& a, const Vector& b) const {
  const double r2 = (a - b).squaredNorm();
  return params_.signal_variance * std::exp(-r2 / (2.0 * params_.lengthscale * params_.lengthscale));
}

Vector GpModel::kernel_vector(const Vector& x) const {
  Vector k(static_cast<Eigen::Index>(inputs_.size()));
  for (std::size_t i = 0; i < inputs_.size(); ++i) k[static_cast<Eigen::Index>(i)] = kernel(x, inputs_[i]);
  return k;
}

void GpModel::check_dim(const Vector& x) const {
  if (x.size() != dim_) {
    throw std::invalid_argument("GpModel: query dimension " + std::to_string(x.size()) +
                                " does not match model dimension " + std::to_string(dim_));
  }
}

Prediction GpModel::predict(const Vector& x) const {
  check_dim(x);
  const Vector k = kernel_vector(x);
  const Vector v = llt_.matrixL().solve(k);
  Prediction p;
  p.mean = k.dot(alpha_);
  p.variance = std::clamp(params_.signal_variance - v.squaredNorm(), 0.0, params_.signal_variance);
  return p;
}

PredictionGradient GpModel::predict_gradient(const Vector& x) const { return predict_with_gradient(x).second; }

std::pair<Prediction, PredictionGradient> GpModel::predict_with_gradient(const Vector& x) const {
  check_dim(x);
  const Vector k = kernel_vector(x);
  const Vector v = llt_.matrixL().solve(k);
  const Vector w = llt_.matrixU().solve(v);  // (K + noise I)^-1 k
  Prediction p;
  p.mean = k.dot(alpha_);
  p.variance = std::clamp(params_.signal_variance - v.squaredNorm(), 0.0, params_.signal_variance);

  const double inv_l2 = 1.0 / (params_.lengthscale * params_.lengthscale);
  PredictionGradient g{Vector::Zero(dim_), Vector::Zero(dim_)};
  // dk_i/dx = -k_i (x - x_i) / l^2
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double c = -k[ii] * inv_l2;
    g.mean.noalias() += (alpha_[ii] * c) * (x - inputs_[i]);
    g.variance.noalias() -= (2.0 * w[ii] * c) * (x - inputs_[i]);
  }
  return {p, g};
}

}  // namespace aebo
