#include "aebo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "aebo/acquisition.hpp"

namespace aebo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool better(double a, double b, Sense sense) { return sense == Sense::minimize ? a < b : a > b; }

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::aebo: return "aebo";
    case Mode::aebo_constrained: return "aebo_constrained";
    case Mode::fixed_bounds_ei: return "fixed_bounds_ei";
  }
  return "unknown";
}

std::string_view to_string(Sense sense) { return sense == Sense::minimize ? "minimize" : "maximize"; }

Mode mode_from_string(std::string_view name) {
  if (name == "aebo") return Mode::aebo;
  if (name == "aebo_constrained") return Mode::aebo_constrained;
  if (name == "fixed_bounds_ei") return Mode::fixed_bounds_ei;
  throw std::invalid_argument("unknown mode: " + std::string(name));
}

Sense sense_from_string(std::string_view name) {
  if (name == "minimize" || name == "min") return Sense::minimize;
  if (name == "maximize" || name == "max") return Sense::maximize;
  throw std::invalid_argument("unknown sense: " + std::string(name));
}

OptimizerConfig OptimizerConfig::resolved() const {
  OptimizerConfig out = *this;
  const int d = initial_bounds.dim();
  if (out.n_init == 0) out.n_init = 5 * d;
  if (out.budget == 0) out.budget = 50 * d;
  return out;
}

void OptimizerConfig::validate() const {
  if (!initial_bounds.non_degenerate()) throw std::invalid_argument("OptimizerConfig: degenerate initial bounds");
  if (n_init < 2) throw std::invalid_argument("OptimizerConfig: n_init must be >= 2");
  if (budget < n_init) throw std::invalid_argument("OptimizerConfig: budget must be >= n_init");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("OptimizerConfig: epsilon must be >= 0");
  control.validate();
  search.validate();
}

std::vector<Vector> lhs_sample(const Box& bounds, int n, std::mt19937_64& rng) {
  if (n < 1) throw std::invalid_argument("lhs_sample: n must be >= 1");
  if (!bounds.non_degenerate()) throw std::invalid_argument("lhs_sample: degenerate bounds");
  const int d = bounds.dim();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vector> points(static_cast<std::size_t>(n), Vector(d));
  std::vector<int> strata(static_cast<std::size_t>(n));
  for (int j = 0; j < d; ++j) {
    std::iota(strata.begin(), strata.end(), 0);
    std::shuffle(strata.begin(), strata.end(), rng);
    const double width = bounds.upper[j] - bounds.lower[j];
    for (int i = 0; i < n; ++i) {
      const double u = (strata[static_cast<std::size_t>(i)] + unif(rng)) / n;
      points[static_cast<std::size_t>(i)][j] = std::min(bounds.lower[j] + u * width, bounds.upper[j]);
    }
  }
  return points;
}

void update_best(RunRecord& record, Sense sense) {
  record.best_x.reset();
  record.best_y = kNaN;
  for (const auto& row : record.rows) {
    if (!row.feasible || !std::isfinite(row.y)) continue;
    if (!record.best_x || better(row.y, record.best_y, sense)) {
      record.best_x = row.x;
      record.best_y = row.y;
    }
  }
}

namespace {

class Runner {
 public:
  Runner(const BlackBox& bb, OptimizerConfig cfg)
      : bb_(bb), cfg_(std::move(cfg)), rng_(cfg_.seed), sign_(cfg_.sense == Sense::minimize ? -1.0 : 1.0) {
    record_.dim = cfg_.initial_bounds.dim();
  }

  RunRecord execute() {
    const auto initial = lhs_sample(cfg_.initial_bounds, cfg_.n_init, rng_);
    for (int i = 0; i < cfg_.n_init; ++i) {
      if (!evaluate(initial[static_cast<std::size_t>(i)], i + 1, kNaN, cfg_.initial_bounds, false)) return finish();
    }

    const AnnealSchedule schedule{cfg_.n_init + 1, cfg_.budget, cfg_.control.xi0};
    for (int t = cfg_.n_init + 1; t <= cfg_.budget; ++t) {
      try {
        if (!step(t, schedule)) return finish();
      } catch (const std::exception& e) {
        fail(t, e.what());
        return finish();
      }
    }
    record_.completed = true;
    return finish();
  }

 private:
  // Returns false when the run must stop.
  bool step(int t, const AnnealSchedule& schedule) {
    // Observations with a defined output feed the objective model.
    std::vector<Vector> pts;
    std::vector<double> ys;
    std::optional<std::size_t> incumbent;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!std::isfinite(raw_[i])) continue;
      pts.push_back(points_[i]);
      ys.push_back(sign_ * raw_[i]);
      if (feasible_[i] && (!incumbent || ys.back() > ys[*incumbent])) incumbent = ys.size() - 1;
    }
    if (pts.size() < 2) {
      fail(t, "fewer than two observations with defined outputs");
      return false;
    }
    if (!incumbent) {
      // No feasible point yet: rank by objective alone.
      incumbent = static_cast<std::size_t>(std::max_element(ys.begin(), ys.end()) - ys.begin());
    }

    const GpModel model = GpModel::fit(pts, ys, cfg_.fit);
    AcquisitionContext ctx;
    ctx.incumbent = model.normalization().to_normalized(ys[*incumbent]);
    ctx.epsilon = cfg_.epsilon;

    Box bounds = cfg_.initial_bounds;
    double tau = kNaN;
    const bool expanding = cfg_.mode != Mode::fixed_bounds_ei;
    if (expanding) {
      const double xi = schedule.xi(t);
      const double s0 = sigma_zero(xi, cfg_.control);
      const double ei0 = ei_floor(s0, cfg_.control.delta);
      tau = solve_tau(ctx.incumbent, model.k0(), ei0, cfg_.control).tau;
      ctx.tau = tau;
      bounds = feasible_domain_bounds(pts, model, tau, cfg_.eigen_mode).box;
    }

    FeasibilityModel feasibility;
    if (cfg_.mode == Mode::aebo_constrained) {
      std::vector<bool> labels(feasible_.begin(), feasible_.end());
      feasibility = FeasibilityModel::fit(points_, labels);
    }
    const AcquisitionSurface surface(model, ctx, cfg_.mode == Mode::aebo_constrained ? &feasibility : nullptr,
                                     expanding);
    const Proposal proposal = propose(surface, bounds, pts[*incumbent], cfg_.search, rng_);
    return evaluate(proposal.x, t, tau, bounds, proposal.fallback);
  }

  bool evaluate(const Vector& x, int t, double tau, const Box& bounds, bool fallback) {
    Evaluation ev;
    try {
      ev = bb_.evaluate(x);
    } catch (const std::exception& e) {
      fail(t, e.what());
      return false;
    }
    if (!std::isfinite(ev.y)) {
      if (cfg_.mode != Mode::aebo_constrained) {
        fail(t, "black box returned a non-finite output");
        return false;
      }
      ev.y = kNaN;
      ev.feasible = false;
    }

    points_.push_back(x);
    raw_.push_back(ev.y);
    feasible_.push_back(ev.feasible);
    if (ev.feasible && (std::isnan(best_) || better(ev.y, best_, cfg_.sense))) best_ = ev.y;

    IterationRow row;
    row.iteration = t;
    row.x = x;
    row.y = ev.y;
    row.feasible = ev.feasible;
    row.best = best_;
    row.tau = tau;
    row.bounds = bounds;
    row.fallback = fallback;
    record_.rows.push_back(std::move(row));
    return true;
  }

  void fail(int t, const std::string& what) {
    record_.completed = false;
    record_.failed_iteration = t;
    record_.error = "iteration " + std::to_string(t) + ": " + what;
  }

  RunRecord finish() {
    update_best(record_, cfg_.sense);
    return std::move(record_);
  }

  const BlackBox& bb_;
  OptimizerConfig cfg_;
  std::mt19937_64 rng_;
  double sign_;
  std::vector<Vector> points_;
  std::vector<double> raw_;
  std::vector<char> feasible_;
  double best_ = kNaN;
  RunRecord record_;
};

}  // namespace

RunRecord run(const BlackBox& blackbox, const OptimizerConfig& config) {
  OptimizerConfig cfg = config.resolved();
  cfg.validate();
  if (blackbox.dim != cfg.initial_bounds.dim()) {
    throw std::invalid_argument("run: black box dimension does not match the initial bounds");
  }
  if (!blackbox.evaluate) throw std::invalid_argument("run: black box has no evaluator");
  return Runner(blackbox, std::move(cfg)).execute();
}

}  // namespace aebo
