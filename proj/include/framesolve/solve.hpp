#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "framesolve/coeffs.hpp"
#include "framesolve/operator.hpp"

namespace framesolve {

/// Parameters of the adaptive Richardson solver.
struct SolveConfig {
  double theta = 0.25;
  int k_inner = 1;
  SpectralEstimates spectral;
  double epsilon_target = 1e-3;

  /// Throws std::invalid_argument unless 0 < theta < 1/3, K >= 1,
  /// epsilon_target > 0 and 3 rho^K < theta.
  void validate() const;

  /// Smallest K with 3 rho^K <= theta / 10, so that every outer step reduces
  /// the tolerance at least tenfold.
  static int default_k(double rho, double theta);
  static SolveConfig with_defaults(const SpectralEstimates& spectral, double epsilon_target,
                                   double theta = 0.25);
};

/// One row of the solver log.
struct SolveStep {
  int j = 0;
  double epsilon = 0.0;
  std::size_t support = 0;
  double residual = 0.0;  // NaN unless a residual callback is installed
  std::uint64_t entry_evals = 0;
  std::uint64_t touches = 0;
  /// Sum of the perturbations the requested tolerances allow in this outer step.
  double perturbation_budget = 0.0;
};

struct ResidualHistory {
  std::vector<SolveStep> steps;

  /// CSV with header `j,epsilon_j,support,residual,entry_evals,touches`.
  void write_csv(std::ostream& os) const;
};

/// Approximation of the right-hand side with accuracy `epsilon`.
using RhsCallback = std::function<SparseVector(double epsilon, ApplyCounters& counters)>;

/// Hooks for diagnostics; none of them influences the iteration.
struct SolveHooks {
  /// Residual observable logged in the history (for instance a dense-oracle residual).
  std::function<double(const SparseVector& v)> residual;
  /// Called after outer step j with v^(j-1), v^(j,K) and v^(j).
  std::function<void(int j, double epsilon_j, const SparseVector& previous,
                     const SparseVector& inner, const SparseVector& coarsened)>
      observer;
};

struct SolveResult {
  SparseVector solution;
  ResidualHistory history;
  int inner_iterations = 0;
  ApplyCounters counters;
};

/// coarse(epsilon, target).
SparseVector rhs(const SparseVector& target, double epsilon);

/// Adaptive damped Richardson iteration on the normal equations A*A u = A*f.
///
/// `rhs_norm` is ||f|| and seeds the initial tolerance ||f|| ||(A|Ran)^-1||.
/// Throws std::runtime_error "numerical breakdown" on non-finite iterates.
SolveResult solve(const OperatorMatrix& op, const RhsCallback& f, double rhs_norm,
                  const SolveConfig& config, const SolveHooks& hooks = {});
SolveResult solve(const OperatorMatrix& op, const SparseVector& f_vec, const SolveConfig& config,
                  const SolveHooks& hooks = {});

}  // namespace framesolve
