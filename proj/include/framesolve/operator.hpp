#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "framesolve/coeffs.hpp"
#include "framesolve/frame.hpp"

namespace framesolve {

/// Coefficients of the bilinear form
///   a(u, v) = diffusion int grad u . grad v + convection int (d u / d x) v + reaction int u v.
/// In 2D the convection acts along the first coordinate.
struct OperatorSpec {
  double diffusion = 1.0;
  double convection = 0.0;
  double reaction = 0.0;

  /// Throws std::invalid_argument unless diffusion > 0 and reaction >= 0.
  void validate() const;
};

/// Spectral data of A*A used for the damped Richardson iteration.
struct SpectralEstimates {
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  double alpha_star = 0.0;
  double rho = 0.0;

  /// alpha* = 2 / (lambda_max + lambda_min) and the matching contraction factor.
  static SpectralEstimates from_bounds(double lambda_max, double lambda_min);
  /// Norm of A* (and of A), sqrt(lambda_max).
  [[nodiscard]] double adjoint_norm() const;
  /// Norm of the inverse of A restricted to its range, 1 / sqrt(lambda_min).
  [[nodiscard]] double inverse_norm() const;
};

/// Work done inside APPLY: matrix entries used and vector elements touched.
struct ApplyCounters {
  std::uint64_t entry_evals = 0;
  std::uint64_t touches = 0;

  ApplyCounters& operator+=(const ApplyCounters& other) {
    entry_evals += other.entry_evals;
    touches += other.touches;
    return *this;
  }
};

/// The weighted stiffness matrix of a(., .) over the truncated frame, stored
/// column-wise with each column ordered by level distance to its index.
///
/// APPLY truncates every column of the input to a level band chosen greedily
/// so that sum_lambda |v_lambda| ||tail of column lambda|| <= epsilon. With
/// epsilon = 0 the product is exact.
class OperatorMatrix {
 public:
  OperatorMatrix(const AggregatedFrame& frame, OperatorSpec spec);

  [[nodiscard]] const AggregatedFrame& frame() const { return *frame_; }
  [[nodiscard]] const OperatorSpec& spec() const { return spec_; }
  [[nodiscard]] std::size_t size() const { return frame_->size(); }
  [[nodiscard]] std::size_t nonzeros() const { return nonzeros_; }

  /// Entry a(psi_col, psi_row) w_row w_col computed from the element integrals.
  [[nodiscard]] double entry(const FrameIndex& row, const FrameIndex& col) const;

  [[nodiscard]] SparseVector apply(const SparseVector& v, double epsilon,
                                   ApplyCounters* counters = nullptr) const;
  [[nodiscard]] SparseVector apply_adjoint(const SparseVector& v, double epsilon,
                                           ApplyCounters* counters = nullptr) const;

  /// Exact product with A*A (used by the power iteration).
  [[nodiscard]] Eigen::VectorXd normal_product(const Eigen::VectorXd& x) const;

  [[nodiscard]] Eigen::MatrixXd dense() const;

  /// Largest |entry| between two levels that differ by `distance`, relative to
  /// the largest diagonal entry; one value per distance 0 .. max.
  [[nodiscard]] std::vector<double> level_decay() const;

 private:
  struct Column {
    std::vector<std::uint32_t> rows;
    std::vector<double> values;
    std::vector<std::uint32_t> band_end;  // rows[0 .. band_end[b]) have level distance <= b
    std::vector<double> tail;             // tail[b] = norm of entries beyond band b; tail.back() == 0
    double norm = 0.0;
  };

  SparseVector apply_columns(const std::vector<Column>& columns, const SparseVector& v,
                             double epsilon, ApplyCounters* counters) const;
  static Column build_column(std::vector<std::pair<std::uint32_t, double>> entries,
                             const std::vector<FrameIndex>& indices, int level);

  const AggregatedFrame* frame_;
  OperatorSpec spec_;
  std::vector<Column> columns_;
  std::vector<Column> rows_;
  std::size_t nonzeros_ = 0;
};

/// a(psi_col, psi_row) of two unweighted elements.
double element_form(const Element& row, const Element& col, const OperatorSpec& spec);

/// lambda_max by power iteration on A*A (at most 200 steps or relative change
/// below 1e-8), raised to sigma_max^2 if the power iteration stops short;
/// lambda_min as the smallest squared singular value of the dense matrix above
/// 1e-10 sigma_max. Throws std::runtime_error "operator has empty
/// range" for the zero matrix.
SpectralEstimates estimate_spectrum(const OperatorMatrix& op);
SpectralEstimates estimate_spectrum(const OperatorMatrix& op, const Eigen::VectorXd& singular_values);

double power_iteration_lambda_max(const OperatorMatrix& op, int max_iterations = 200,
                                  double tolerance = 1e-8);

}  // namespace framesolve
