#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "framesolve/coeffs.hpp"
#include "framesolve/operator.hpp"
#include "framesolve/solve.hpp"

namespace framesolve {

/// Trilinear form a1(u, v, w) = strength int u v w on the 1D domain.
struct NonlinearSpec {
  double strength = 1.0;

  /// Certified bound for the form on H1_0(0,1) x H1_0(0,1) x H1_0(0,1) with
  /// the H1 seminorm: |int u v w| <= |u|_1 |v|_1 |w|_1 / (2 pi^2).
  [[nodiscard]] double norm_bound() const;
};

/// (w_mu strength int u^2 psi_mu)_mu with u the synthesized function of `v`,
/// coarsened to accuracy `epsilon`. `entry_evals`, when given, is increased by
/// the number of integrals evaluated.
SparseVector apply_nonlinear(const AggregatedFrame& frame, const NonlinearSpec& nl,
                             const SparseVector& v, double epsilon,
                             std::uint64_t* entry_evals = nullptr);

/// Constants entering the contraction argument.
struct ContractionConstants {
  double inverse_norm = 0.0;    // ||(A|Ran A)^-1||
  double frame_norm = 0.0;      // ||F||
  double nonlinear_norm = 0.0;  // ||A_1||

  /// gamma = 2 ||(A|Ran)^-1|| ||F||^3 ||A_1||.
  [[nodiscard]] double gamma() const;
  /// Largest admissible data norm, 1 / (4 ||(A|Ran)^-1||^2 ||F||^3 ||A_1||).
  [[nodiscard]] double smallness_bound() const;
};

ContractionConstants measure_constants(const AggregatedFrame& frame,
                                       const SpectralEstimates& spectral, const NonlinearSpec& nl);

/// Configuration of the outer fixed-point loop.
struct FixptConfig {
  double epsilon0 = 0.0;
  double lipschitz = 0.0;
  double radius = 0.0;
  double epsilon_target = 0.0;
  double gamma = 0.0;
  double smallness_bound = 0.0;
  double data_norm = 0.0;
  double inverse_norm = 0.0;

  /// Throws std::invalid_argument unless L < epsilon0 < r*, epsilon0 < 1 and epsilon_target > 0.
  void validate() const;
};

/// Raised when the smallness condition fails or no admissible epsilon0 exists.
class CertificationError : public std::runtime_error {
 public:
  CertificationError(const std::string& what, double gamma, double bound, double data_norm)
      : std::runtime_error(what), gamma_(gamma), bound_(bound), data_norm_(data_norm) {}
  [[nodiscard]] double gamma() const { return gamma_; }
  [[nodiscard]] double bound() const { return bound_; }
  [[nodiscard]] double data_norm() const { return data_norm_; }

 private:
  double gamma_;
  double bound_;
  double data_norm_;
};

/// Checks ||l|| < smallness bound and returns r* as the smaller root of
/// h(r) = r / ||(A|Ran)^-1|| - ||A_1|| ||F||^3 r^2 = (||l|| + max h) / 2,
/// L = gamma r* and epsilon0 = sqrt(L min(r*, 1)).
FixptConfig check_contraction(const ContractionConstants& constants, const SparseVector& l_vec,
                              double epsilon_target);
FixptConfig check_contraction(const OperatorMatrix& op, const SpectralEstimates& spectral,
                              const NonlinearSpec& nl, const SparseVector& l_vec,
                              double epsilon_target);

struct FixptStep {
  int i = 0;
  double epsilon = 0.0;
  std::size_t support = 0;
  int inner_solve_iters = 0;
  std::uint64_t nl_entry_evals = 0;
};

struct FixptResult {
  SparseVector solution;
  std::vector<FixptStep> history;
  int iterations = 0;
  /// Largest partial bound E_n over the iterations performed.
  double max_partial_bound = 0.0;
  ApplyCounters counters;
};

/// CSV with header `i,epsilon_i,support,inner_solve_iters,nl_entry_evals`.
void write_fixpt_csv(std::ostream& os, const std::vector<FixptStep>& history);

/// Partial bounds E_0 .. E_n for the schedule epsilon_k = epsilon0^k.
std::vector<double> partial_bounds(const FixptConfig& config, int n);

/// Hard iteration cap 10 ceil(-log10 epsilon) + 20.
int max_fixpt_iterations(double epsilon_target);

struct FixptHooks {
  /// Called with (i, v_i) after each outer iteration.
  std::function<void(int i, const SparseVector& v)> observer;
};

/// Outer fixed-point loop v_{i+1} = SOLVE[epsilon0^(i+1), A, l - A_1(v_i)].
FixptResult fixpt(const OperatorMatrix& op, const NonlinearSpec& nl, const SparseVector& l_vec,
                  const SpectralEstimates& spectral, const FixptConfig& config,
                  double theta = 0.25, const FixptHooks& hooks = {});

}  // namespace framesolve
