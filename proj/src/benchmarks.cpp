#include "aebo/benchmarks.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace aebo::bench {

namespace {

constexpr double kPi = std::numbers::pi;

void require_dim(const Vector& x, int d, const char* name) {
  if (x.size() != d) {
    throw std::invalid_argument(std::string(name) + ": expected dimension " + std::to_string(d) + ", got " +
                                std::to_string(x.size()));
  }
}

constexpr double kHartmannAlpha[4] = {1.0, 1.2, 3.0, 3.2};

constexpr double kHartmann3A[4][3] = {{3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}, {3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}};
constexpr double kHartmann3P[4][3] = {
    {0.3689, 0.1170, 0.2673}, {0.4699, 0.4387, 0.7470}, {0.1091, 0.8732, 0.5547}, {0.0381, 0.5743, 0.8828}};

constexpr double kHartmann6A[4][6] = {{10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
                                      {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
                                      {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
                                      {17.0, 8.0, 0.05, 10.0, 0.1, 14.0}};
constexpr double kHartmann6P[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                      {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                      {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                      {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};

template <int D>
double hartmann(const Vector& x, const double (&A)[4][D], const double (&P)[4][D]) {
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < D; ++j) inner += A[i][j] * (x[j] - P[i][j]) * (x[j] - P[i][j]);
    sum += kHartmannAlpha[i] * std::exp(-inner);
  }
  return -sum;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Box uniform_box(int d, double lo, double hi) { return {Vector::Constant(d, lo), Vector::Constant(d, hi)}; }

void self_check(const TestProblem& p) {
  for (const auto& m : p.minimizers) {
    if (!p.original_bounds.contains(m)) {
      throw std::logic_error(p.name + ": known minimizer outside original bounds");
    }
    const double v = p.evaluate(m);
    if (std::abs(v - p.minimum) > 1e-6) {
      throw std::logic_error(p.name + ": objective at known minimizer is " + std::to_string(v) +
                             ", expected " + std::to_string(p.minimum));
    }
  }
}

}  // namespace

double branin(const Vector& x) {
  require_dim(x, 2, "branin");
  const double b = 5.1 / (4.0 * kPi * kPi);
  const double c = 5.0 / kPi;
  const double t = 1.0 / (8.0 * kPi);
  const double q = x[1] - b * x[0] * x[0] + c * x[0] - 6.0;
  return q * q + 10.0 * (1.0 - t) * std::cos(x[0]) + 10.0;
}

double six_hump_camel(const Vector& x) {
  require_dim(x, 2, "six_hump_camel");
  const double a = x[0] * x[0];
  const double b = x[1] * x[1];
  return (4.0 - 2.1 * a + a * a / 3.0) * a + x[0] * x[1] + (-4.0 + 4.0 * b) * b;
}

double beale(const Vector& x) {
  require_dim(x, 2, "beale");
  const double u = x[0];
  const double v = x[1];
  const double t1 = 1.5 - u + u * v;
  const double t2 = 2.25 - u + u * v * v;
  const double t3 = 2.625 - u + u * v * v * v;
  return t1 * t1 + t2 * t2 + t3 * t3;
}

double hartmann3(const Vector& x) {
  require_dim(x, 3, "hartmann3");
  return hartmann<3>(x, kHartmann3A, kHartmann3P);
}

double hartmann6(const Vector& x) {
  require_dim(x, 6, "hartmann6");
  return hartmann<6>(x, kHartmann6A, kHartmann6P);
}

double rastrigin(const Vector& x) {
  if (x.size() < 1) throw std::invalid_argument("rastrigin: empty input");
  double s = 10.0 * static_cast<double>(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) s += x[i] * x[i] - 10.0 * std::cos(2.0 * kPi * x[i]);
  return s;
}

double rosenbrock(const Vector& x) {
  if (x.size() < 2) throw std::invalid_argument("rosenbrock: dimension must be >= 2");
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    s += 100.0 * a * a + b * b;
  }
  return s;
}

Evaluation constrained_rastrigin(const Vector& x) {
  require_dim(x, 2, "constrained_rastrigin");
  const double e = 0.01 * x[0] * x[0] + (x[1] + 2.0) * (x[1] + 2.0);
  return {rastrigin(x), e <= 1.0};
}

std::vector<std::string> problem_names() {
  return {"branin",    "six_hump_camel", "beale",      "hartmann3",
          "hartmann6", "rastrigin",      "rosenbrock", "constrained_rastrigin"};
}

TestProblem make_problem(std::string_view name, int dim) {
  TestProblem p;
  p.name = std::string(name);
  if (name == "branin") {
    p.dim = 2;
    p.original_bounds = {vec({-5.0, 0.0}), vec({10.0, 15.0})};
    p.evaluate = branin;
    p.minimum = 0.39788735772973816;
    p.minimizers = {vec({-kPi, 12.275}), vec({kPi, 2.275}), vec({3.0 * kPi, 2.475})};
  } else if (name == "six_hump_camel") {
    p.dim = 2;
    p.original_bounds = {vec({-3.0, -2.0}), vec({3.0, 2.0})};
    p.evaluate = six_hump_camel;
    p.minimum = -1.0316284534898774;
    p.minimizers = {vec({0.08984201368301331, -0.7126564032704135}),
                    vec({-0.08984201368301331, 0.7126564032704135})};
  } else if (name == "beale") {
    p.dim = 2;
    p.original_bounds = uniform_box(2, -4.5, 4.5);
    p.evaluate = beale;
    p.minimum = 0.0;
    p.minimizers = {vec({3.0, 0.5})};
  } else if (name == "hartmann3") {
    p.dim = 3;
    p.original_bounds = uniform_box(3, 0.0, 1.0);
    p.evaluate = hartmann3;
    p.minimum = -3.8627797869493365;
    p.minimizers = {vec({0.1146143386, 0.5556488469, 0.8525469504})};
  } else if (name == "hartmann6") {
    p.dim = 6;
    p.original_bounds = uniform_box(6, 0.0, 1.0);
    p.evaluate = hartmann6;
    p.minimum = -3.3223680114155147;
    p.minimizers = {vec({0.20168951265373836, 0.1500108583168957, 0.47687397573329313, 0.27533243050653,
                         0.3116516182272036, 0.6573005290205365})};
  } else if (name == "rastrigin" || name == "constrained_rastrigin") {
    p.dim = name == "rastrigin" ? dim : 2;
    if (p.dim < 1) throw std::invalid_argument("rastrigin: dimension must be >= 1");
    p.original_bounds = uniform_box(p.dim, -5.12, 5.12);
    p.evaluate = rastrigin;
    if (name == "rastrigin") {
      p.minimum = 0.0;
      p.minimizers = {Vector::Zero(p.dim)};
    } else {
      // The unconstrained minimum lies outside the ellipse; the feasible optimum sits on
      // its boundary at (0, -1).
      p.minimum = 1.0;
      p.minimizers = {vec({0.0, -1.0})};
      p.constraint = [](const Vector& x) { return constrained_rastrigin(x).feasible; };
    }
  } else if (name == "rosenbrock") {
    p.dim = dim;
    if (p.dim < 2) throw std::invalid_argument("rosenbrock: dimension must be >= 2");
    p.original_bounds = uniform_box(p.dim, -5.0, 10.0);
    p.evaluate = rosenbrock;
    p.minimum = 0.0;
    p.minimizers = {Vector::Ones(p.dim)};
  } else {
    std::string known;
    for (const auto& n : problem_names()) known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown problem '" + std::string(name) + "' (known: " + known + ")");
  }
  p.observe = p.evaluate;
  self_check(p);
  return p;
}

double evaluate_problem(std::string_view name, const Vector& x) {
  const int d = static_cast<int>(x.size());
  const TestProblem p = make_problem(name, (name == "rastrigin" || name == "rosenbrock") ? d : 2);
  return p.evaluate(x);
}

TestProblem noisy(const TestProblem& problem, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("noisy: sigma must be >= 0");
  TestProblem out = problem;
  out.noise_std = sigma;
  if (sigma == 0.0) {
    out.observe = problem.evaluate;
    return out;
  }
  struct Stream {
    std::mutex mu;
    std::mt19937_64 rng;
    std::normal_distribution<double> gauss{0.0, 1.0};
  };
  auto stream = std::make_shared<Stream>();
  stream->rng.seed(seed);
  out.observe = [f = problem.evaluate, stream, sigma](const Vector& x) {
    std::scoped_lock lock(stream->mu);
    return f(x) + sigma * stream->gauss(stream->rng);
  };
  return out;
}

InitialWindow initial_window(const TestProblem& problem) {
  const Box& ob = problem.original_bounds;
  const Vector w = ob.width();
  InitialWindow out;
  out.box = Box(ob.lower + 0.1 * w, ob.lower + 0.3 * w);
  for (const auto& m : problem.minimizers) {
    if (out.box.contains(m)) {
      out.box = Box(ob.upper - 0.3 * w, ob.upper - 0.1 * w);
      out.mirrored = true;
      break;
    }
  }
  return out;
}

BlackBox as_blackbox(const TestProblem& problem) {
  BlackBox bb;
  bb.dim = problem.dim;
  bb.evaluate = [problem](const Vector& x) {
    return Evaluation{problem.observe(x), problem.feasible(x)};
  };
  return bb;
}

MetricSample metrics(const RunRecord& record, const TestProblem& problem, const Vector& center) {
  MetricSample m;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& row : record.rows) {
    if (!row.feasible || !problem.feasible(row.x)) continue;
    best = std::min(best, problem.evaluate(row.x));
  }
  m.optimality_gap = std::isfinite(best) ? best - problem.minimum : std::numeric_limits<double>::quiet_NaN();
  m.distance_to_center = record.best_x ? (*record.best_x - center).norm() : std::numeric_limits<double>::quiet_NaN();
  return m;
}

}  // namespace aebo::bench
