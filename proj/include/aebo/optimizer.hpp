#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "aebo/adaptive_control.hpp"
#include "aebo/expansion.hpp"
#include "aebo/gp.hpp"
#include "aebo/inner_search.hpp"

namespace aebo {

enum class Mode { aebo, aebo_constrained, fixed_bounds_ei };
enum class Sense { maximize, minimize };

std::string_view to_string(Mode mode);
std::string_view to_string(Sense sense);
Mode mode_from_string(std::string_view name);
Sense sense_from_string(std::string_view name);

/// Result of one black-box evaluation. A NaN `y` marks an undefined output.
struct Evaluation {
  double y = 0.0;
  bool feasible = true;
};

struct BlackBox {
  int dim = 0;
  std::function<Evaluation(const Vector&)> evaluate;
};

struct OptimizerConfig {
  Box initial_bounds;
  int n_init = 0;  // 0 means 5 * d
  int budget = 0;  // 0 means 50 * d
  ControlParams control;
  double epsilon = 0.01;
  SearchConfig search;
  Mode mode = Mode::aebo;
  Sense sense = Sense::minimize;
  EigenMode eigen_mode = EigenMode::lambda_min;
  FitOptions fit;
  std::uint64_t seed = 0;

  /// Copy with the dimension-dependent defaults filled in.
  [[nodiscard]] OptimizerConfig resolved() const;
  void validate() const;
};

/// One evaluation of the black box. `best` is the best feasible raw output so far
/// (NaN until one exists); `tau` is NaN for the initial design and in fixed-bounds mode.
struct IterationRow {
  int iteration = 0;  // 1-based
  Vector x;
  double y = 0.0;
  bool feasible = true;
  double best = 0.0;
  double tau = 0.0;
  Box bounds;
  bool fallback = false;
};

struct RunRecord {
  int dim = 0;
  std::vector<IterationRow> rows;
  std::optional<Vector> best_x;
  double best_y = 0.0;
  bool completed = false;
  int failed_iteration = 0;  // 1-based, 0 when the run completed
  std::string error;
};

/// Latin hypercube design: one point per stratum along every axis.
std::vector<Vector> lhs_sample(const Box& bounds, int n, std::mt19937_64& rng);

/// Recomputes best_x / best_y from the rows (best feasible finite output).
void update_best(RunRecord& record, Sense sense);

/// Runs the adaptive-expansion loop (or the fixed-bounds baseline) to the full budget.
RunRecord run(const BlackBox& blackbox, const OptimizerConfig& config);

}  // namespace aebo
