#pragma once

#include <Eigen/Dense>
#include <vector>

#include "framesolve/coeffs.hpp"
#include "framesolve/frame.hpp"
#include "framesolve/operator.hpp"

namespace framesolve {

/// Dense reference data for the truncated operator: the matrix, its singular
/// value decomposition, the orthogonal projector onto its range and its
/// pseudo-inverse. Test and analysis support only; O(n^3) to build.
struct DenseSnapshot {
  std::vector<FrameIndex> indices;
  Eigen::MatrixXd matrix;
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd range_basis;  // left singular vectors of the nonzero singular values
  Eigen::MatrixXd projector;
  Eigen::MatrixXd pseudo_inverse;
  int rank = 0;

  [[nodiscard]] Eigen::VectorXd to_dense(const SparseVector& v) const;
  [[nodiscard]] SparseVector to_sparse(const Eigen::VectorXd& x) const;
  [[nodiscard]] double sigma_max() const;
  /// Smallest singular value counted in the rank.
  [[nodiscard]] double sigma_min() const;
};

/// Largest index set the dense oracle accepts.
inline constexpr std::size_t kOracleSizeLimit = 20000;

/// Relative singular-value threshold separating the kernel from the range.
inline constexpr double kRankTolerance = 1e-10;

DenseSnapshot assemble(const OperatorMatrix& op);

/// P v, the orthogonal projection onto the range of A.
SparseVector project_ran(const DenseSnapshot& snapshot, const SparseVector& v);
Eigen::VectorXd project_ran(const DenseSnapshot& snapshot, const Eigen::VectorXd& v);

/// Minimal-norm least-squares solution A^+ f.
SparseVector least_squares_solve(const DenseSnapshot& snapshot, const SparseVector& f);

/// Unweighted L2 Gram matrix <psi_mu, psi_lambda> of the elements at `positions`.
Eigen::MatrixXd gram_matrix(const AggregatedFrame& frame, const std::vector<std::size_t>& positions);
/// <psi_mu, psi_lambda> with lambda from `rows`, mu from `cols`.
Eigen::MatrixXd cross_gram(const AggregatedFrame& frame, const std::vector<std::size_t>& rows,
                           const std::vector<std::size_t>& cols);

/// Minimal-norm solution of G d = b with singular values below
/// kRankTolerance * sigma_max discarded.
Eigen::VectorXd gram_solve(const Eigen::MatrixXd& gram, const Eigen::VectorXd& b);

/// Coefficients c = d / w, so that synthesize(frame, c) = sum d_lambda psi_lambda.
SparseVector to_weighted_coefficients(const AggregatedFrame& frame,
                                      const std::vector<std::size_t>& positions,
                                      const Eigen::VectorXd& d);

/// Coefficients of the L2-best approximation of u from the truncated span of
/// `patch` (all patches when patch < 0), in synthesis weighting (1D).
SparseVector dual_coefficients(const AggregatedFrame& frame, int patch, const ScalarField1& u);

/// Spectral norm of the unweighted energy Gram matrix (w_l w_m <psi_m', psi_l'>),
/// i.e. the squared norm of the synthesis map into the H1 seminorm.
double synthesis_norm_squared(const AggregatedFrame& frame);

}  // namespace framesolve
