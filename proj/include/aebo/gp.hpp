#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>

#include "aebo/types.hpp"

namespace aebo {

/// Hyperparameters of the isotropic RBF kernel
///   k(a, b) = signal_variance * exp(-|a - b|^2 / (2 lengthscale^2)).
struct KernelParams {
  double lengthscale = 1.0;
  double signal_variance = 1.0;  // k0 = k(x, x)
  double noise_variance = 0.0;

  void validate() const;
};

/// Evaluated points with their raw outputs and constraint labels.
class ObservationSet {
 public:
  ObservationSet() = default;

  void add(Vector x, double y, bool feasible = true);

  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] bool empty() const { return points_.empty(); }
  [[nodiscard]] int dim() const { return points_.empty() ? 0 : static_cast<int>(points_.front().size()); }

  [[nodiscard]] const std::vector<Vector>& points() const { return points_; }
  [[nodiscard]] const std::vector<double>& outputs() const { return outputs_; }
  [[nodiscard]] bool feasible(std::size_t i) const { return feasible_[i] != 0; }
  [[nodiscard]] std::vector<bool> feasible_flags() const { return {feasible_.begin(), feasible_.end()}; }

 private:
  std::vector<Vector> points_;
  std::vector<double> outputs_;
  std::vector<char> feasible_;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output z-scoring applied before the GP sees the data.
struct Normalization {
  double mean = 0.0;
  double scale = 1.0;

  [[nodiscard]] double to_normalized(double y) const { return (y - mean) / scale; }
  [[nodiscard]] double to_raw(double z) const { return z * scale + mean; }
};

struct FitOptions {
  // When absent the noise variance is estimated jointly with the lengthscale.
  std::optional<double> fixed_noise = 1e-6;
  bool normalize = true;
  int n_starts = 8;
  double noise_floor = 1e-8;
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

struct PredictionGradient {
  Vector mean;
  Vector variance;
};

/// Zero-mean GP regressor with an isotropic RBF kernel. Immutable once built.
class GpModel {
 public:
  /// Fits hyperparameters by maximizing the log marginal likelihood.
  /// Requires at least two observations with finite outputs.
  static GpModel fit(std::span<const Vector> inputs, std::span<const double> outputs,
                     const FitOptions& options = {});

  /// Conditions on the data with fixed hyperparameters (no search).
  static GpModel condition(std::span<const Vector> inputs, std::span<const double> outputs,
                           const KernelParams& params, bool normalize = true);

  /// Log marginal likelihood of already-normalized outputs under `params`.
  /// Returns -inf when the covariance cannot be factorized.
  static double log_marginal_likelihood(std::span<const Vector> inputs,
                                        std::span<const double> normalized_outputs,
                                        const KernelParams& params);

  [[nodiscard]] Prediction predict(const Vector& x) const;
  [[nodiscard]] PredictionGradient predict_gradient(const Vector& x) const;
  /// Posterior and its gradient from a single pair of triangular solves.
  [[nodiscard]] std::pair<Prediction, PredictionGradient> predict_with_gradient(const Vector& x) const;
  [[nodiscard]] double kernel(const Vector& a, const Vector& b) const;

  [[nodiscard]] const KernelParams& params() const { return params_; }
  [[nodiscard]] double k0() const { return params_.signal_variance; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return inputs_.size(); }
  [[nodiscard]] const std::vector<Vector>& inputs() const { return inputs_; }
  [[nodiscard]] const Vector& normalized_outputs() const { return targets_; }
  [[nodiscard]] const Normalization& normalization() const { return normalization_; }
  [[nodiscard]] const Vector& alpha() const { return alpha_; }
  /// K + noise * I, including any jitter added during factorization.
  [[nodiscard]] const Matrix& covariance() const { return covariance_; }
  [[nodiscard]] Matrix cholesky_factor() const { return llt_.matrixL(); }
  [[nodiscard]] double log_marginal_likelihood() const { return log_likelihood_; }

 private:
  GpModel() = default;
  void build(std::vector<Vector> inputs, Vector targets, KernelParams params);
  [[nodiscard]] Vector kernel_vector(const Vector& x) const;
  void check_dim(const Vector& x) const;

  KernelParams params_;
  int dim_ = 0;
  std::vector<Vector> inputs_;
  Vector targets_;
  Normalization normalization_;
  Matrix covariance_;
  Eigen::LLT<Matrix> llt_;
  Vector alpha_;
  double log_likelihood_ = 0.0;
};

/// Mean and scale for z-scoring; the scale falls back to 1 when std < 1e-12.
Normalization compute_normalization(std::span<const double> outputs);

/// Median of pairwise Euclidean distances (1 when all points coincide).
double median_pairwise_distance(std::span<const Vector> points);

}  // namespace aebo
