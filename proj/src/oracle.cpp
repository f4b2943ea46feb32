#include "framesolve/oracle.hpp"

#include <stdexcept>
#include <string>

namespace framesolve {

Eigen::VectorXd DenseSnapshot::to_dense(const SparseVector& v) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(indices.size()));
  for (const auto& [index, value] : v) {
    auto it = std::lower_bound(indices.begin(), indices.end(), index);
    if (it == indices.end() || *it != index) {
      throw std::out_of_range("vector index outside the snapshot index set");
    }
    x(it - indices.begin()) = value;
  }
  return x;
}

SparseVector DenseSnapshot::to_sparse(const Eigen::VectorXd& x) const {
  std::vector<SparseVector::Entry> out;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) != 0.0) out.emplace_back(indices[static_cast<std::size_t>(i)], x(i));
  }
  return SparseVector::from_sorted(std::move(out));
}

double DenseSnapshot::sigma_max() const {
  return singular_values.size() == 0 ? 0.0 : singular_values(0);
}

double DenseSnapshot::sigma_min() const {
  return rank == 0 ? 0.0 : singular_values(rank - 1);
}

DenseSnapshot assemble(const OperatorMatrix& op) {
  if (op.size() > kOracleSizeLimit) {
    throw std::length_error("dense oracle limited to " + std::to_string(kOracleSizeLimit) +
                            " indices, got " + std::to_string(op.size()));
  }
  DenseSnapshot s;
  s.indices = op.frame().indices();
  s.matrix = op.dense();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(s.matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  s.singular_values = svd.singularValues();
  const double cutoff = kRankTolerance * s.sigma_max();
  s.rank = 0;
  while (s.rank < s.singular_values.size() && s.singular_values(s.rank) > cutoff) ++s.rank;
  s.range_basis = svd.matrixU().leftCols(s.rank);
  s.projector = s.range_basis * s.range_basis.transpose();
  const Eigen::VectorXd inv = s.singular_values.head(s.rank).cwiseInverse();
  s.pseudo_inverse = svd.matrixV().leftCols(s.rank) * inv.asDiagonal() * s.range_basis.transpose();
  return s;
}

SparseVector project_ran(const DenseSnapshot& snapshot, const SparseVector& v) {
  return snapshot.to_sparse(project_ran(snapshot, snapshot.to_dense(v)));
}

Eigen::VectorXd project_ran(const DenseSnapshot& snapshot, const Eigen::VectorXd& v) {
  return snapshot.range_basis * (snapshot.range_basis.transpose() * v);
}

SparseVector least_squares_solve(const DenseSnapshot& snapshot, const SparseVector& f) {
  return snapshot.to_sparse(snapshot.pseudo_inverse * snapshot.to_dense(f));
}

Eigen::MatrixXd cross_gram(const AggregatedFrame& frame, const std::vector<std::size_t>& rows,
                           const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Element& r = frame.element(rows[i]);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const Element& c = frame.element(cols[k]);
      double value = integrate_products(c.fx, r.fx).value_value;
      if (!c.fy.empty()) value *= integrate_products(c.fy, r.fy).value_value;
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = value;
    }
  }
  return g;
}

Eigen::MatrixXd gram_matrix(const AggregatedFrame& frame, const std::vector<std::size_t>& positions) {
  return cross_gram(frame, positions, positions);
}

Eigen::VectorXd gram_solve(const Eigen::MatrixXd& gram, const Eigen::VectorXd& b) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0) return Eigen::VectorXd::Zero(gram.cols());
  const double cutoff = kRankTolerance * sv(0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  const Eigen::VectorXd coeffs =
      (svd.matrixU().leftCols(rank).transpose() * b).cwiseQuotient(sv.head(rank));
  return svd.matrixV().leftCols(rank) * coeffs;
}

SparseVector to_weighted_coefficients(const AggregatedFrame& frame,
                                      const std::vector<std::size_t>& positions,
                                      const Eigen::VectorXd& d) {
  std::vector<SparseVector::Entry> out;
  out.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Element& e = frame.element(positions[i]);
    out.emplace_back(e.index, d(static_cast<Eigen::Index>(i)) / e.weight);
  }
  return SparseVector(std::move(out));
}

SparseVector dual_coefficients(const AggregatedFrame& frame, int patch, const ScalarField1& u) {
  const auto positions = frame.patch_positions(patch);
  const Eigen::VectorXd d = gram_solve(gram_matrix(frame, positions), moments(frame, positions, u));
  return to_weighted_coefficients(frame, positions, d);
}

double synthesis_norm_squared(const AggregatedFrame& frame) {
  const OperatorMatrix laplace(frame, OperatorSpec{1.0, 0.0, 0.0});
  return std::sqrt(power_iteration_lambda_max(laplace, 1000, 1e-12));
}

}  // namespace framesolve
