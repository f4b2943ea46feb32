#include "framesolve/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace framesolve {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(key, "expected an integer, got '" + value + "'");
  }
  return out;
}

std::vector<double> parse_list(const std::string& key, std::string value) {
  std::replace(value.begin(), value.end(), ',', ' ');
  std::istringstream fields(value);
  std::vector<double> out;
  std::string item;
  while (fields >> item) out.push_back(parse_double(key, item));
  return out;
}

std::pair<double, double> domain_1d(const AggregatedFrame& frame) {
  double lo = frame.patches().front().a;
  double hi = lo + frame.patches().front().length;
  for (const Patch& p : frame.patches()) {
    lo = std::min(lo, p.a);
    hi = std::max(hi, p.a + p.length);
  }
  return {lo, hi};
}

std::uint64_t cost_of(const ApplyCounters& c) { return c.entry_evals + c.touches; }

/// Ordered `key = value` lines of report.txt.
class Report {
 public:
  void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, format_double(value)); }
  void add_count(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }

  void write(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    for (const auto& [k, v] : lines_) os << k << " = " << v << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

}  // namespace

std::string to_string(Problem problem) {
  switch (problem) {
    case Problem::poisson1d: return "poisson1d";
    case Problem::convdiff1d: return "convdiff1d";
    case Problem::quadratic1d: return "quadratic1d";
    case Problem::lshape2d_linear: return "lshape2d_linear";
  }
  return "unknown";
}

Problem problem_from_string(const std::string& name) {
  for (Problem p : {Problem::poisson1d, Problem::convdiff1d, Problem::quadratic1d,
                    Problem::lshape2d_linear}) {
    if (to_string(p) == name) return p;
  }
  throw std::invalid_argument("unknown problem '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (frame_file.empty() && levels < 2) throw ConfigError("levels", "must be at least 2");
  if (!(sobolev >= 0.0)) throw ConfigError("sobolev", "must be nonnegative");
  if (!(theta > 0.0 && theta < 1.0 / 3.0)) throw ConfigError("theta", "must lie in (0, 1/3)");
  if (k_inner < 0) throw ConfigError("k", "must be nonnegative");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon", "must be positive");
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (!(sweep[i] > 0.0)) throw ConfigError("sweep", "tolerances must be positive");
    if (i > 0 && !(sweep[i] < sweep[i - 1])) {
      throw ConfigError("sweep", "tolerances must be strictly decreasing");
    }
  }
  if (!(op.diffusion > 0.0)) throw ConfigError("diffusion", "must be positive");
  if (!(op.reaction >= 0.0)) throw ConfigError("reaction", "must be nonnegative");
  if (functions < 1) throw ConfigError("functions", "must be at least 1");
}

ExperimentConfig parse_config(std::istream& is, const std::filesystem::path& base) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "missing key");
    if (value.empty()) throw ConfigError(key, "missing value");
    if (!seen.insert(key).second) throw ConfigError(key, "given more than once");

    if (key == "problem") {
      try {
        c.problem = problem_from_string(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
      }
    } else if (key == "frame") {
      c.frame_file = base.empty() ? std::filesystem::path(value) : base / value;
    } else if (key == "levels") {
      c.levels = parse_int(key, value);
    } else if (key == "sobolev") {
      c.sobolev = parse_double(key, value);
    } else if (key == "theta") {
      c.theta = parse_double(key, value);
    } else if (key == "k") {
      c.k_inner = parse_int(key, value);
    } else if (key == "epsilon") {
      c.epsilon = parse_double(key, value);
    } else if (key == "sweep") {
      c.sweep = parse_list(key, value);
    } else if (key == "output") {
      c.output = base.empty() ? std::filesystem::path(value) : base / value;
    } else if (key == "diffusion") {
      c.op.diffusion = parse_double(key, value);
    } else if (key == "convection") {
      c.op.convection = parse_double(key, value);
    } else if (key == "reaction") {
      c.op.reaction = parse_double(key, value);
    } else if (key == "strength") {
      c.strength = parse_double(key, value);
    } else if (key == "amplitude") {
      c.amplitude = parse_double(key, value);
    } else if (key == "functions") {
      c.functions = parse_int(key, value);
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot open '" + path.string() + "'");
  return parse_config(is, path.parent_path());
}

ProblemSetup make_problem(const ExperimentConfig& config) {
  const bool planar = config.problem == Problem::lshape2d_linear;
  auto frame = [&]() {
    if (config.frame_file.empty()) {
      return planar ? lshape_frame(config.levels, config.sobolev)
                    : interval_frame(config.levels, config.sobolev);
    }
    std::ifstream is(config.frame_file);
    if (!is) throw ConfigError("frame", "cannot open '" + config.frame_file.string() + "'");
    try {
      return read_frame(is);
    } catch (const std::exception& e) {
      throw ConfigError("frame", e.what());
    }
  }();
  if (frame.dimension() != (planar ? 2 : 1)) {
    throw ConfigError("frame", to_string(config.problem) + " needs a " + (planar ? "2D" : "1D") +
                                   " frame");
  }

  ProblemSetup setup{std::move(frame), config.op, NonlinearSpec{0.0}, {}, {}, {}};
  const double d = config.op.diffusion;
  const double c = config.op.convection;
  const double r = config.op.reaction;
  switch (config.problem) {
    case Problem::poisson1d:
    case Problem::convdiff1d: {
      setup.exact = [](double x) { return x * (1.0 - x); };
      setup.exact_derivative = [](double x) { return 1.0 - 2.0 * x; };
      setup.rhs = analyze(setup.frame, [=](double x) {
        return 2.0 * d + c * (1.0 - 2.0 * x) + r * x * (1.0 - x);
      });
      break;
    }
    case Problem::quadratic1d: {
      const double delta = config.amplitude;
      const double q = config.strength;
      setup.nonlinear = NonlinearSpec{q};
      setup.exact = [delta](double x) { return delta * std::sin(kPi * x); };
      setup.exact_derivative = [delta](double x) { return delta * kPi * std::cos(kPi * x); };
      setup.rhs = analyze(setup.frame, [=](double x) {
        const double s = std::sin(kPi * x);
        return delta * (d * kPi * kPi * s + c * kPi * std::cos(kPi * x) + r * s) +
               q * delta * delta * s * s;
      });
      break;
    }
    case Problem::lshape2d_linear: {
      setup.rhs = analyze(setup.frame, [](const Point2&) { return 1.0; });
      break;
    }
  }
  return setup;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "epsilon,support,cost_units,h1_error\n";
  for (const SweepRow& r : rows) {
    os << format_double(r.epsilon) << ',' << r.support << ',' << r.cost_units << ','
       << format_double(r.h1_error) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != "epsilon,support,cost_units,h1_error") {
    throw std::runtime_error("sweep csv: unexpected header");
  }
  std::vector<SweepRow> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::istringstream fields(line);
    std::string e, s, c, h;
    if (!std::getline(fields, e, ',') || !std::getline(fields, s, ',') ||
        !std::getline(fields, c, ',') || !std::getline(fields, h)) {
      throw std::runtime_error("sweep csv: malformed line " + std::to_string(line_no));
    }
    try {
      rows.push_back({std::stod(e), static_cast<std::size_t>(std::stoull(s)),
                      static_cast<std::uint64_t>(std::stoull(c)), std::stod(h)});
    } catch (const std::exception&) {
      throw std::runtime_error("sweep csv: malformed line " + std::to_string(line_no));
    }
  }
  return rows;
}

ScalingFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit needs matching x and y");
  if (x.size() < 2) throw std::invalid_argument("fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit needs distinct x values");
  ScalingFit fit;
  fit.slope = sxy / sxx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

ScalingFit fit_scaling(const std::vector<double>& epsilon, const std::vector<double>& value) {
  if (epsilon.size() < 4) throw std::invalid_argument("scaling fit needs at least 4 sweep points");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < epsilon.size(); ++i) {
    if (!(epsilon[i] > 0.0) || !(value[i] > 0.0)) {
      throw std::invalid_argument("scaling fit needs positive tolerances and values");
    }
    x.push_back(std::log(1.0 / epsilon[i]));
    y.push_back(std::log(value[i]));
  }
  return fit_line(x, y);
}

ScalingFit fit_scaling(const std::vector<SweepRow>& rows) {
  std::vector<double> eps, support;
  for (const SweepRow& r : rows) {
    eps.push_back(r.epsilon);
    support.push_back(static_cast<double>(r.support));
  }
  return fit_scaling(eps, support);
}

ScalingFit fit_scaling(std::istream& sweep_csv) { return fit_scaling(read_sweep_csv(sweep_csv)); }

double estimate_sparsity(const SparseVector& u) {
  const auto sorted = sorted_by_magnitude(u);
  std::vector<double> tail(sorted.size() + 1, 0.0);
  for (std::size_t i = sorted.size(); i-- > 0;) {
    tail[i] = tail[i + 1] + sorted[i].second * sorted[i].second;
  }
  std::vector<double> x, y;
  for (std::size_t n = 2; 4 * n <= sorted.size(); n *= 2) {
    if (!(tail[n] > 0.0)) break;
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(0.5 * std::log(tail[n]));
  }
  if (x.size() < 2) throw std::invalid_argument("sparsity fit needs a support of at least 16");
  return -fit_line(x, y).slope;
}

double h1_error(const ProblemSetup& setup, const DenseSnapshot& snapshot, const SparseVector& v,
                const SparseVector& reference) {
  if (setup.frame.dimension() == 1 && setup.exact_derivative) {
    const auto [lo, hi] = domain_1d(setup.frame);
    return h1_seminorm_distance(synthesize_function(setup.frame, v), setup.exact_derivative, lo,
                                hi);
  }
  const Eigen::VectorXd e = snapshot.to_dense(v - reference);
  return std::sqrt(std::max(0.0, e.dot(snapshot.matrix * e)));
}

double TestFunction::value(double x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    s += coefficients[k] * std::sin(static_cast<double>(k + 1) * kPi * x);
  }
  return s;
}

double TestFunction::derivative(double x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    const double w = static_cast<double>(k + 1) * kPi;
    s += coefficients[k] * w * std::cos(w * x);
  }
  return s;
}

double TestFunction::h1_norm() const {
  double s = 0.0;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    const double w = static_cast<double>(k + 1) * kPi;
    s += 0.5 * coefficients[k] * coefficients[k] * (1.0 + w * w);
  }
  return std::sqrt(s);
}

std::vector<TestFunction> random_test_functions(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<TestFunction> out;
  for (int i = 0; i < count; ++i) {
    TestFunction f;
    for (int k = 1; k <= 5; ++k) f.coefficients.push_back(normal(rng) / (k * k));
    out.push_back(std::move(f));
  }
  return out;
}

std::uint64_t seed_from_environment() {
  const char* raw = std::getenv("FRAMESOLVE_SEED");
  if (raw == nullptr || *raw == '\0') return 42;
  const std::string value = trim(raw);
  std::uint64_t seed = 0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, seed);
  if (ec != std::errc{} || ptr != end || value.empty()) {
    throw ConfigError("FRAMESOLVE_SEED", "expected an unsigned integer, got '" + value + "'");
  }
  return seed;
}

std::vector<DecompositionRow> decomposition_study(const AggregatedFrame& frame,
                                                  const std::vector<TestFunction>& functions) {
  if (frame.dimension() != 1) throw std::invalid_argument("decomposition study needs a 1D frame");
  const auto [lo, hi] = domain_1d(frame);
  const std::vector<std::size_t> all = frame.patch_positions(-1);
  const Eigen::MatrixXd gram = gram_matrix(frame, all);
  std::vector<DecompositionRow> rows;
  int id = 0;
  for (const TestFunction& f : functions) {
    const ScalarField1 u = [&f](double x) { return f.value(x); };
    const std::vector<SparseVector> parts = decompose(frame, u);
    SparseVector total;
    double coefficient_sq = 0.0;
    for (const SparseVector& p : parts) {
      total = total + p;
      coefficient_sq += p.squared_norm();
    }
    const Eigen::VectorXd best = gram_solve(gram, moments(frame, all, u));
    const SparseVector best_coefficients = to_weighted_coefficients(frame, all, best);

    DecompositionRow row;
    row.function = id++;
    row.l2_error = l2_distance(synthesize_function(frame, total), u, lo, hi);
    row.best_l2_error = l2_distance(synthesize_function(frame, best_coefficients), u, lo, hi);
    row.coefficient_norm = std::sqrt(coefficient_sq);
    row.h1_norm = f.h1_norm();
    rows.push_back(row);
  }
  return rows;
}

void write_decomposition_csv(std::ostream& os, const std::vector<DecompositionRow>& rows) {
  os << "function,l2_error,best_l2_error,coefficient_norm,h1_norm\n";
  for (const DecompositionRow& r : rows) {
    os << r.function << ',' << format_double(r.l2_error) << ',' << format_double(r.best_l2_error)
       << ',' << format_double(r.coefficient_norm) << ',' << format_double(r.h1_norm) << '\n';
  }
}

namespace {

struct Context {
  const ExperimentConfig& config;
  ProblemSetup setup;
  OperatorMatrix op;
  DenseSnapshot snapshot;
  SpectralEstimates spectral;
  Report report;

  explicit Context(const ExperimentConfig& c)
      : config(c), setup(make_problem(c)), op(setup.frame, setup.spec), snapshot(assemble(op)),
        spectral(estimate_spectrum(op, snapshot.singular_values)) {
    report.add("problem", to_string(c.problem));
    report.add_count("frame_size", setup.frame.size());
    report.add("lambda_max", spectral.lambda_max);
    report.add("lambda_min", spectral.lambda_min);
    report.add("alpha_star", spectral.alpha_star);
    report.add("rho", spectral.rho);
  }

  [[nodiscard]] bool nonlinear() const { return config.problem == Problem::quadratic1d; }

  [[nodiscard]] SolveConfig solve_config(double epsilon) const {
    SolveConfig sc = SolveConfig::with_defaults(spectral, epsilon, config.theta);
    if (config.k_inner > 0) sc.k_inner = config.k_inner;
    try {
      sc.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(config.k_inner > 0 ? "k" : "theta", e.what());
    }
    return sc;
  }

  /// Certification constants; linear problems use a vanishing nonlinearity.
  [[nodiscard]] FixptConfig certify(double epsilon) const {
    return check_contraction(op, spectral, setup.nonlinear, setup.rhs, epsilon);
  }

  void add_certification(const FixptConfig& fc, bool passed) {
    report.add("theta", config.theta);
    report.add_count("K", static_cast<std::uint64_t>(solve_config(config.epsilon).k_inner));
    report.add("gamma", fc.gamma);
    report.add("L", fc.lipschitz);
    report.add("r_star", fc.radius);
    report.add("epsilon0", fc.epsilon0);
    report.add("data_norm", fc.data_norm);
    report.add("smallness_bound", fc.smallness_bound);
    report.add("smallness", passed ? "pass" : "fail");
  }

  [[nodiscard]] SparseVector reference() const { return least_squares_solve(snapshot, setup.rhs); }

  SweepRow sweep_point(double epsilon, const SparseVector& ref) {
    SweepRow row;
    row.epsilon = epsilon;
    if (nonlinear()) {
      const FixptResult r = fixpt(op, setup.nonlinear, setup.rhs, spectral, certify(epsilon),
                                  config.theta);
      row.support = r.solution.size();
      row.cost_units = cost_of(r.counters);
      row.h1_error = h1_error(setup, snapshot, r.solution, ref);
    } else {
      const SolveResult r = solve(op, setup.rhs, solve_config(epsilon));
      row.support = r.solution.size();
      row.cost_units = cost_of(r.counters);
      row.h1_error = h1_error(setup, snapshot, r.solution, ref);
    }
    return row;
  }

  void run_sweep(std::ostream& log) {
    const SparseVector ref = reference();
    std::vector<SweepRow> rows;
    for (double eps : config.sweep) {
      rows.push_back(sweep_point(eps, ref));
      log << "sweep epsilon = " << format_double(eps) << " support = " << rows.back().support
          << '\n';
    }
    auto csv = open_output(config.output / "sweep.csv");
    write_sweep_csv(csv, rows);
    if (rows.size() >= 4 && std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) {
          return r.support > 0 && r.cost_units > 0;
        })) {
      std::vector<double> eps, cost;
      for (const SweepRow& r : rows) {
        eps.push_back(r.epsilon);
        cost.push_back(static_cast<double>(r.cost_units));
      }
      const ScalingFit support_fit = fit_scaling(rows);
      const ScalingFit cost_fit = fit_scaling(eps, cost);
      report.add("sweep_support_slope", support_fit.slope);
      report.add("sweep_support_r_squared", support_fit.r_squared);
      report.add("sweep_cost_slope", cost_fit.slope);
      report.add("sweep_cost_r_squared", cost_fit.r_squared);
    } else {
      report.add("sweep_support_slope", "n/a");
    }
  }

  void run_target(std::ostream& log) {
    auto csv = open_output(config.output / "history.csv");
    if (nonlinear()) {
      const FixptResult r = fixpt(op, setup.nonlinear, setup.rhs, spectral,
                                  certify(config.epsilon), config.theta);
      write_fixpt_csv(csv, r.history);
      const Eigen::VectorXd v = snapshot.to_dense(r.solution);
      const Eigen::VectorXd residual =
          snapshot.matrix * v + snapshot.to_dense(apply_nonlinear(setup.frame, setup.nonlinear,
                                                                  r.solution, 0.0)) -
          snapshot.to_dense(setup.rhs);
      report.add_count("iterations", static_cast<std::uint64_t>(r.iterations));
      report.add_count("final_support", r.solution.size());
      report.add("final_residual", residual.norm());
      report.add("max_partial_bound", r.max_partial_bound);
      report.add_count("cost_units", cost_of(r.counters));
      log << "fixpt finished after " << r.iterations << " iterations\n";
    } else {
      const Eigen::VectorXd pf = project_ran(snapshot, snapshot.to_dense(setup.rhs));
      SolveHooks hooks;
      hooks.residual = [&](const SparseVector& v) {
        return (pf - snapshot.matrix * snapshot.to_dense(v)).norm();
      };
      const SolveResult r = solve(op, setup.rhs, solve_config(config.epsilon), hooks);
      r.history.write_csv(csv);
      report.add_count("outer_iterations", r.history.steps.size() - 1);
      report.add_count("inner_iterations", static_cast<std::uint64_t>(r.inner_iterations));
      report.add_count("final_support", r.solution.size());
      report.add("final_residual", r.history.steps.back().residual);
      report.add_count("cost_units", cost_of(r.counters));
      log << "solve finished after " << r.history.steps.size() - 1 << " outer iterations\n";
    }
  }

  void run_decompose(std::ostream& log) {
    const std::uint64_t seed = seed_from_environment();
    const auto rows =
        decomposition_study(setup.frame, random_test_functions(config.functions, seed));
    auto csv = open_output(config.output / "decomposition.csv");
    write_decomposition_csv(csv, rows);
    double worst = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const DecompositionRow& r : rows) {
      worst = std::max(worst, r.l2_error / r.best_l2_error);
      lo = std::min(lo, r.coefficient_norm / r.h1_norm);
      hi = std::max(hi, r.coefficient_norm / r.h1_norm);
    }
    report.add_count("seed", seed);
    report.add("max_error_ratio", worst);
    report.add("min_norm_ratio", lo);
    report.add("max_norm_ratio", hi);
    log << "decomposed " << rows.size() << " functions\n";
  }
};

}  // namespace

int run_experiment(const ExperimentConfig& config, Mode mode, std::ostream& log) {
  std::unique_ptr<Context> ctx;
  try {
    config.validate();
    if (mode == Mode::decompose && config.problem == Problem::lshape2d_linear) {
      throw ConfigError("problem", "decompose needs a 1D problem");
    }
    std::filesystem::create_directories(config.output);
    ctx = std::make_unique<Context>(config);
    FixptConfig fc;
    try {
      fc = ctx->certify(config.epsilon);
    } catch (const CertificationError& e) {
      FixptConfig failed;
      failed.gamma = e.gamma();
      failed.smallness_bound = e.bound();
      failed.data_norm = e.data_norm();
      failed.radius = std::numeric_limits<double>::quiet_NaN();
      failed.lipschitz = std::numeric_limits<double>::quiet_NaN();
      failed.epsilon0 = std::numeric_limits<double>::quiet_NaN();
      ctx->add_certification(failed, false);
      ctx->report.write(config.output / "report.txt");
      log << "certification failed: " << e.what() << '\n';
      return 2;
    }
    ctx->add_certification(fc, true);
    switch (mode) {
      case Mode::run:
        ctx->run_target(log);
        ctx->run_sweep(log);
        break;
      case Mode::sweep: ctx->run_sweep(log); break;
      case Mode::spectrum: break;
      case Mode::decompose: ctx->run_decompose(log); break;
    }
    ctx->report.write(config.output / "report.txt");
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace framesolve
