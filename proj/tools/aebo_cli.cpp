// Command-line experiment runner.
//
//   aebo run --problem branin --mode aebo --seeds 1,2,3 --budget 100 --n-init 10 --out results
//   aebo run --config experiment.json --seeds 4
//   aebo run --external-cmd "python3 tune.py" --sense maximize --lower -5,-5 --upper -4,-4
//   aebo list

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aebo/benchmarks.hpp"
#include "aebo/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-expansion Bayesian optimization experiments"};
  app.require_subcommand(1);

  auto* list_cmd = app.add_subcommand("list", "List registered benchmark problems");

  auto* run_cmd = app.add_subcommand("run", "Run seeded replications and write histories plus a summary");
  std::string config_path;
  std::string problem;
  std::string mode;
  std::string sense;
  std::string external_cmd;
  std::string eigen_mode;
  std::string out;
  std::vector<std::uint64_t> seeds;
  std::vector<double> lower;
  std::vector<double> upper;
  int budget = -1;
  int n_init = -1;
  int dim = -1;
  int workers = -1;
  double noise_std = -1.0;
  double timeout = -1.0;

  run_cmd->add_option("--config", config_path, "JSON experiment file; flags override its values")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--problem", problem, "Benchmark problem name (see `list`)");
  run_cmd->add_option("--mode", mode, "aebo | aebo_constrained | fixed_bounds_ei");
  run_cmd->add_option("--sense", sense, "minimize | maximize (external black boxes)");
  run_cmd->add_option("--budget", budget, "Total evaluations (0 = 50d)");
  run_cmd->add_option("--n-init", n_init, "Initial LHS evaluations (0 = 5d)");
  run_cmd->add_option("--seeds", seeds, "Comma-separated seeds")->delimiter(',');
  run_cmd->add_option("--noise-std", noise_std, "Gaussian observation noise std");
  run_cmd->add_option("--dim", dim, "Dimension for rastrigin/rosenbrock");
  run_cmd->add_option("--out", out, "Output directory");
  run_cmd->add_option("--external-cmd", external_cmd, "Shell command speaking the JSON line protocol");
  run_cmd->add_option("--lower", lower, "Initial lower bounds, comma-separated")->delimiter(',');
  run_cmd->add_option("--upper", upper, "Initial upper bounds, comma-separated")->delimiter(',');
  run_cmd->add_option("--timeout", timeout, "Seconds per external evaluation");
  run_cmd->add_option("--eigen-mode", eigen_mode, "lambda_min | lambda_max");
  run_cmd->add_option("--workers", workers, "Parallel runs (0 = hardware concurrency)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      for (const auto& name : aebo::bench::problem_names()) {
        const auto p = aebo::bench::make_problem(name, 2);
        std::cout << name << "  d=" << p.dim << "  minimum=" << p.minimum << '\n';
      }
      return 0;
    }

    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      j = nlohmann::json::parse(f);
    }
    if (!problem.empty()) {
      j["problem"] = problem;
      j.erase("external_cmd");
    }
    if (!external_cmd.empty()) {
      j["external_cmd"] = external_cmd;
      j.erase("problem");
    }
    if (!mode.empty()) j["mode"] = mode;
    if (!sense.empty()) j["sense"] = sense;
    if (budget >= 0) j["budget"] = budget;
    if (n_init >= 0) j["n_init"] = n_init;
    if (!seeds.empty()) j["seeds"] = seeds;
    if (noise_std >= 0.0) j["noise_std"] = noise_std;
    if (dim > 0) j["dim"] = dim;
    if (!out.empty()) j["out"] = out;
    if (!lower.empty()) j["lower"] = lower;
    if (!upper.empty()) j["upper"] = upper;
    if (timeout > 0.0) j["timeout"] = timeout;
    if (!eigen_mode.empty()) j["eigen_mode"] = eigen_mode;
    if (workers >= 0) j["workers"] = workers;

    const aebo::ExperimentSpec spec = aebo::spec_from_json(j);
    const aebo::ExperimentResult result = aebo::run_experiment(spec);

    for (std::size_t i = 0; i < result.runs.size(); ++i) {
      const auto& r = result.runs[i];
      std::cout << result.history_files[i].string() << "  ";
      if (r.completed) {
        std::cout << "best=" << r.best_y << '\n';
      } else {
        std::cout << "FAILED: " << r.error << '\n';
      }
    }
    std::cout << aebo::summary_header() << '\n' << aebo::summary_line(result.summary) << '\n';
    return result.summary.n_failed == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
