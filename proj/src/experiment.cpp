#include "aebo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "aebo/external_blackbox.hpp"
#include "aebo/history.hpp"

namespace aebo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Box box_from_json(const nlohmann::json& lower, const nlohmann::json& upper) {
  const auto lo = lower.get<std::vector<double>>();
  const auto hi = upper.get<std::vector<double>>();
  return make_box(lo, hi);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

void ExperimentSpec::validate() const {
  if (problem.empty() == external_cmd.empty()) {
    throw std::invalid_argument("experiment: specify exactly one of problem or external command");
  }
  if (seeds.empty()) throw std::invalid_argument("experiment: at least one seed is required");
  if (!external_cmd.empty() && !initial_bounds) {
    throw std::invalid_argument("experiment: an external black box needs initial bounds");
  }
  if (initial_bounds && !initial_bounds->non_degenerate()) {
    throw std::invalid_argument("experiment: degenerate initial bounds");
  }
  if (!(noise_std >= 0.0)) throw std::invalid_argument("experiment: noise_std must be >= 0");
  if (!(timeout_s > 0.0)) throw std::invalid_argument("experiment: timeout must be positive");
  if (budget < 0 || n_init < 0) throw std::invalid_argument("experiment: negative budget");
  control.validate();
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
  static const std::vector<std::string> known = {
      "problem", "external_cmd", "mode", "sense", "seeds",   "dim",        "budget", "n_init", "noise_std",
      "lower",   "upper",        "out",  "timeout", "eigen_mode", "xi0",   "kappa",  "delta",  "epsilon", "workers"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("experiment config: unknown key '" + key + "'");
    }
  }
  ExperimentSpec s;
  s.problem = j.value("problem", s.problem);
  s.external_cmd = j.value("external_cmd", s.external_cmd);
  if (j.contains("mode")) s.mode = mode_from_string(j["mode"].get<std::string>());
  if (j.contains("sense")) s.sense = sense_from_string(j["sense"].get<std::string>());
  if (j.contains("seeds")) s.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  s.dim = j.value("dim", s.dim);
  s.budget = j.value("budget", s.budget);
  s.n_init = j.value("n_init", s.n_init);
  s.noise_std = j.value("noise_std", s.noise_std);
  if (j.contains("lower") != j.contains("upper")) {
    throw std::invalid_argument("experiment config: lower and upper must be given together");
  }
  if (j.contains("lower")) s.initial_bounds = box_from_json(j["lower"], j["upper"]);
  if (j.contains("out")) s.out = j["out"].get<std::string>();
  s.timeout_s = j.value("timeout", s.timeout_s);
  if (j.contains("eigen_mode")) s.eigen_mode = eigen_mode_from_string(j["eigen_mode"].get<std::string>());
  s.control.xi0 = j.value("xi0", s.control.xi0);
  s.control.kappa = j.value("kappa", s.control.kappa);
  s.control.delta = j.value("delta", s.control.delta);
  s.epsilon = j.value("epsilon", s.epsilon);
  s.workers = j.value("workers", s.workers);
  return s;
}

nlohmann::json spec_to_json(const ExperimentSpec& s) {
  nlohmann::json j;
  if (!s.problem.empty()) j["problem"] = s.problem;
  if (!s.external_cmd.empty()) j["external_cmd"] = s.external_cmd;
  j["mode"] = std::string(to_string(s.mode));
  j["sense"] = std::string(to_string(s.sense));
  j["seeds"] = s.seeds;
  j["dim"] = s.dim;
  j["budget"] = s.budget;
  j["n_init"] = s.n_init;
  j["noise_std"] = s.noise_std;
  if (s.initial_bounds) {
    const auto& b = *s.initial_bounds;
    j["lower"] = std::vector<double>(b.lower.data(), b.lower.data() + b.lower.size());
    j["upper"] = std::vector<double>(b.upper.data(), b.upper.data() + b.upper.size());
  }
  j["out"] = s.out.string();
  j["timeout"] = s.timeout_s;
  j["eigen_mode"] = std::string(to_string(s.eigen_mode));
  j["xi0"] = s.control.xi0;
  j["kappa"] = s.control.kappa;
  j["delta"] = s.control.delta;
  j["epsilon"] = s.epsilon;
  j["workers"] = s.workers;
  return j;
}

std::string summary_header() {
  return "problem,mode,n_runs,n_failed,best_mean,best_std,gap_mean,distance_mean,wall_time_s";
}

std::string summary_line(const SummaryRow& r) {
  return r.problem + "," + r.mode + "," + std::to_string(r.n_runs) + "," + std::to_string(r.n_failed) + "," +
         format_real(r.best_mean) + "," + format_real(r.best_std) + "," + format_real(r.gap_mean) + "," +
         format_real(r.distance_mean) + "," + format_real(r.wall_time_s);
}

SummaryRow summarize(const std::string& problem, Mode mode, const std::vector<RunRecord>& runs,
                     const std::vector<bench::MetricSample>& metrics, double wall_time_s) {
  SummaryRow row;
  row.problem = problem;
  row.mode = std::string(to_string(mode));
  row.n_runs = static_cast<int>(runs.size());
  row.wall_time_s = wall_time_s;
  std::vector<double> bests;
  std::vector<double> gaps;
  std::vector<double> dists;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!runs[i].completed) {
      ++row.n_failed;
      continue;
    }
    if (runs[i].best_x) bests.push_back(runs[i].best_y);
    if (i < metrics.size()) {
      if (!std::isnan(metrics[i].optimality_gap)) gaps.push_back(metrics[i].optimality_gap);
      if (!std::isnan(metrics[i].distance_to_center)) dists.push_back(metrics[i].distance_to_center);
    }
  }
  row.best_mean = mean_of(bests);
  if (bests.size() >= 2) {
    double ss = 0.0;
    for (double b : bests) ss += (b - row.best_mean) * (b - row.best_mean);
    row.best_std = std::sqrt(ss / static_cast<double>(bests.size() - 1));
  } else {
    row.best_std = bests.empty() ? kNaN : 0.0;
  }
  row.gap_mean = mean_of(gaps);
  row.distance_mean = mean_of(dists);
  return row;
}

OptimizerConfig make_config(const ExperimentSpec& spec, const Box& initial_bounds, std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.initial_bounds = initial_bounds;
  cfg.n_init = spec.n_init;
  cfg.budget = spec.budget;
  cfg.control = spec.control;
  cfg.epsilon = spec.epsilon;
  cfg.mode = spec.mode;
  cfg.sense = spec.external_cmd.empty() ? Sense::minimize : spec.sense;
  cfg.eigen_mode = spec.eigen_mode;
  cfg.seed = seed;
  if (spec.noise_std > 0.0) cfg.fit.fixed_noise.reset();
  return cfg;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto started = std::chrono::steady_clock::now();

  std::optional<bench::TestProblem> problem;
  Box bounds;
  if (!spec.problem.empty()) {
    problem = bench::make_problem(spec.problem, spec.dim);
    bounds = spec.initial_bounds ? *spec.initial_bounds : bench::initial_window(*problem).box;
    if (bounds.dim() != problem->dim) throw std::invalid_argument("experiment: bounds/problem dimension mismatch");
  } else {
    bounds = *spec.initial_bounds;
  }

  std::filesystem::create_directories(spec.out);
  const std::size_t n = spec.seeds.size();
  ExperimentResult result;
  result.runs.resize(n);
  result.history_files.resize(n);
  std::vector<bench::MetricSample> metrics(n);

  auto run_one = [&](std::size_t i) {
    const std::uint64_t seed = spec.seeds[i];
    RunRecord record;
    record.dim = bounds.dim();
    try {
      BlackBox bb;
      if (problem) {
        // Noise stream derived from the seed but distinct from the optimizer's stream.
        bb = bench::as_blackbox(bench::noisy(*problem, spec.noise_std, seed ^ 0x9E3779B97F4A7C15ULL));
      } else {
        bb = external_blackbox(spec.external_cmd, bounds.dim(),
                               std::chrono::milliseconds(static_cast<long long>(spec.timeout_s * 1000.0)));
      }
      record = run(bb, make_config(spec, bounds, seed));
    } catch (const std::exception& e) {
      record.completed = false;
      record.error = e.what();
    }
    if (problem) {
      metrics[i] = bench::metrics(record, *problem, bounds.center());
    } else {
      metrics[i].optimality_gap = kNaN;
      metrics[i].distance_to_center = record.best_x ? (*record.best_x - bounds.center()).norm() : kNaN;
    }
    const auto path = spec.out / (spec.label() + "_seed" + std::to_string(seed) + ".csv");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    write_history(f, record);
    result.history_files[i] = path;
    result.runs[i] = std::move(record);
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_workers = std::min<std::size_t>(n, spec.workers > 0 ? static_cast<std::size_t>(spec.workers) : hw);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n_workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < n; i = next++) run_one(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  result.summary = summarize(spec.label(), spec.mode, result.runs, metrics, wall);
  result.summary_file = spec.out / "summary.csv";
  std::ofstream f(result.summary_file);
  if (!f) throw std::runtime_error("cannot write " + result.summary_file.string());
  f << summary_header() << '\n' << summary_line(result.summary) << '\n';
  return result;
}

}  // namespace aebo
