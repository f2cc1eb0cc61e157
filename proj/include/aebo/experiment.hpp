#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aebo/benchmarks.hpp"
#include "aebo/optimizer.hpp"

namespace aebo {

/// A batch of seeded runs on one problem (registry name or external command).
///
/// Config file schema (JSON object, every key optional except one of problem/external_cmd):
///   problem        string   registry name
///   external_cmd   string   shell command speaking the line protocol
///   mode           string   aebo | aebo_constrained | fixed_bounds_ei
///   sense          string   minimize | maximize (external only; benchmarks minimize)
///   seeds          [int]
///   dim            int      rastrigin / rosenbrock dimension
///   budget, n_init int      0 selects 50d / 5d
///   noise_std      number   Gaussian observation noise for benchmarks
///   lower, upper   [number] initial bounds (required for external_cmd)
///   out            string   output directory
///   timeout        number   seconds per external evaluation
///   eigen_mode     string   lambda_min | lambda_max
///   xi0, kappa, delta, epsilon  number
///   workers        int      0 selects the hardware concurrency
struct ExperimentSpec {
  std::string problem;
  std::string external_cmd;
  Mode mode = Mode::aebo;
  Sense sense = Sense::minimize;
  std::vector<std::uint64_t> seeds = {0};
  int dim = 2;
  int budget = 0;
  int n_init = 0;
  double noise_std = 0.0;
  std::optional<Box> initial_bounds;
  std::filesystem::path out = "results";
  double timeout_s = 3600.0;
  EigenMode eigen_mode = EigenMode::lambda_min;
  ControlParams control;
  double epsilon = 0.01;
  int workers = 0;

  void validate() const;
  [[nodiscard]] std::string label() const { return problem.empty() ? std::string("external") : problem; }
};

ExperimentSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ExperimentSpec& spec);

struct SummaryRow {
  std::string problem;
  std::string mode;
  int n_runs = 0;
  int n_failed = 0;
  double best_mean = 0.0;
  double best_std = 0.0;  // sample standard deviation (n - 1)
  double gap_mean = 0.0;
  double distance_mean = 0.0;
  double wall_time_s = 0.0;
};

std::string summary_header();
std::string summary_line(const SummaryRow& row);

/// Mean and sample std of best values, mean gap and distance over completed runs.
SummaryRow summarize(const std::string& problem, Mode mode, const std::vector<RunRecord>& runs,
                     const std::vector<bench::MetricSample>& metrics, double wall_time_s);

struct ExperimentResult {
  std::vector<RunRecord> runs;
  std::vector<std::filesystem::path> history_files;
  std::filesystem::path summary_file;
  SummaryRow summary;
};

/// Optimizer settings for one seed of the experiment.
OptimizerConfig make_config(const ExperimentSpec& spec, const Box& initial_bounds, std::uint64_t seed);

/// Runs every seed (in parallel across workers), writes <out>/<label>_seed<k>.csv per seed
/// and <out>/summary.csv.
ExperimentResult run_experiment(const ExperimentSpec& spec);

}  // namespace aebo
