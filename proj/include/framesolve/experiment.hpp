#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "framesolve/coeffs.hpp"
#include "framesolve/fixpt.hpp"
#include "framesolve/frame.hpp"
#include "framesolve/operator.hpp"
#include "framesolve/oracle.hpp"
#include "framesolve/solve.hpp"

namespace framesolve {

enum class Problem { poisson1d, convdiff1d, quadratic1d, lshape2d_linear };

std::string to_string(Problem problem);
/// Throws std::invalid_argument for unknown names.
Problem problem_from_string(const std::string& name);

/// Error raised while reading or validating an experiment configuration; it
/// carries the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : std::runtime_error("config key '" + key + "': " + message), key_(key) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Everything one experiment needs. Read from flat `key = value` text with `#`
/// comments:
///
///   problem    = poisson1d | convdiff1d | quadratic1d | lshape2d_linear
///   frame      = path to a frame file (optional; the built-in fixture otherwise)
///   levels     = truncation level J of the built-in fixture
///   sobolev    = smoothness index of the weights
///   theta      = coarsening fraction, 0 < theta < 1/3
///   k          = inner Richardson steps per outer step (0 selects the default)
///   epsilon    = target tolerance of `run`
///   sweep      = strictly decreasing tolerances, separated by spaces or commas
///   output     = directory receiving history.csv, sweep.csv, report.txt
///   diffusion, convection, reaction = coefficients of the linear operator
///   strength   = coefficient of the quadratic term (quadratic1d)
///   amplitude  = amplitude of the manufactured solution (quadratic1d)
///   functions  = number of random test functions for `decompose`
struct ExperimentConfig {
  Problem problem = Problem::poisson1d;
  std::filesystem::path frame_file;
  int levels = 7;
  double sobolev = 1.0;
  double theta = 0.25;
  int k_inner = 0;
  double epsilon = 1e-3;
  std::vector<double> sweep = {1e-1, 1e-2, 1e-3, 1e-4};
  std::filesystem::path output = ".";
  OperatorSpec op;
  double strength = 0.05;
  double amplitude = 0.01;
  int functions = 20;

  /// Throws ConfigError naming the first key that violates its invariant.
  void validate() const;
};

/// Parses configuration text. Relative paths are resolved against `base`.
/// Throws ConfigError on unknown keys, malformed values or failed validation.
ExperimentConfig parse_config(std::istream& is, const std::filesystem::path& base = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// The discrete problem described by a configuration.
struct ProblemSetup {
  AggregatedFrame frame;
  OperatorSpec spec;
  NonlinearSpec nonlinear{0.0};
  /// Analyzed right-hand side (or data l for quadratic1d).
  SparseVector rhs;
  /// Exact solution and its derivative (1D problems only).
  ScalarField1 exact;
  ScalarField1 exact_derivative;
};

/// Frame, operator data and right-hand side for `config`. Manufactured 1D
/// solutions: x(1 - x) for the linear problems, amplitude sin(pi x) for
/// quadratic1d. The L-shape problem uses the constant load 1.
ProblemSetup make_problem(const ExperimentConfig& config);

/// One line of sweep.csv.
struct SweepRow {
  double epsilon = 0.0;
  std::size_t support = 0;
  std::uint64_t cost_units = 0;  // matrix entries used plus vector elements touched
  double h1_error = 0.0;
};

/// Header `epsilon,support,cost_units,h1_error`.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
/// Throws std::runtime_error on a malformed file.
std::vector<SweepRow> read_sweep_csv(std::istream& is);

struct ScalingFit {
  double slope = 0.0;
  double r_squared = 0.0;
};

/// Least-squares line through (x_i, y_i); r_squared is 1 when y is constant.
/// Throws std::invalid_argument with fewer than two points.
ScalingFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of log(value) against log(1 / epsilon). Throws std::invalid_argument
/// with fewer than four points.
ScalingFit fit_scaling(const std::vector<double>& epsilon, const std::vector<double>& value);
/// fit_scaling on the support column of a sweep.
ScalingFit fit_scaling(const std::vector<SweepRow>& rows);
/// fit_scaling on the support column of a sweep.csv stream.
ScalingFit fit_scaling(std::istream& sweep_csv);

/// Sparsity order s such that the best N-term error of `u` decays like N^-s,
/// fitted on N = 2, 4, 8, ... up to a quarter of the support.
double estimate_sparsity(const SparseVector& u);

/// H1 error of a computed coefficient vector: against the exact solution in
/// 1D, in the energy norm against the oracle solution `reference` in 2D.
double h1_error(const ProblemSetup& setup, const DenseSnapshot& snapshot, const SparseVector& v,
                const SparseVector& reference);

/// Random smooth function vanishing at 0 and 1 with derivative, a sine series
/// with normally distributed coefficients damped like 1 / k^2.
struct TestFunction {
  std::vector<double> coefficients;
  [[nodiscard]] double value(double x) const;
  [[nodiscard]] double derivative(double x) const;
  /// sqrt(||u||_{L2}^2 + |u|_{H1}^2), exact for the sine series.
  [[nodiscard]] double h1_norm() const;
};
std::vector<TestFunction> random_test_functions(int count, std::uint64_t seed);

/// Seed from FRAMESOLVE_SEED, 42 when unset. Throws ConfigError when the
/// variable is not an unsigned integer.
std::uint64_t seed_from_environment();

/// Outcome of decompose-then-sum for one function.
struct DecompositionRow {
  int function = 0;
  double l2_error = 0.0;
  double best_l2_error = 0.0;
  double coefficient_norm = 0.0;
  double h1_norm = 0.0;
};
std::vector<DecompositionRow> decomposition_study(const AggregatedFrame& frame,
                                                  const std::vector<TestFunction>& functions);
void write_decomposition_csv(std::ostream& os, const std::vector<DecompositionRow>& rows);

enum class Mode { run, sweep, spectrum, decompose };

/// Executes one experiment and writes its files into config.output. Returns 0
/// on success, 2 when the fixed point cannot be certified and 1 on usage
/// errors. Progress and errors go to `log`.
int run_experiment(const ExperimentConfig& config, Mode mode, std::ostream& log);

}  // namespace framesolve
