#include <doctest.h>

#include <cmath>
#include <random>

#include "framesolve/operator.hpp"
#include "framesolve/oracle.hpp"

using namespace framesolve;

namespace {

SparseVector random_vector(const AggregatedFrame& frame, std::mt19937_64& rng, double density) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  std::vector<SparseVector::Entry> entries;
  for (const FrameIndex& index : frame.indices()) {
    if (unit(rng) < density) entries.emplace_back(index, normal(rng));
  }
  return SparseVector(std::move(entries));
}

/// Unit-peak hat at node k of level j as an element of the unit interval.
Element unit_hat(int level, std::int64_t k) {
  const ReferenceBasis basis;
  Element e;
  e.index = FrameIndex{0, level, k, Kind::Scaling};
  e.fx = basis.shape(level, k, Kind::Scaling).scaled(std::exp2(-0.5 * level));
  return e;
}

}  // namespace

TEST_CASE("operator spec validation") {
  CHECK_THROWS_AS((OperatorSpec{0.0, 0.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((OperatorSpec{1.0, 0.0, -1.0}.validate()), std::invalid_argument);
  CHECK_NOTHROW((OperatorSpec{1.0, 3.0, 0.0}.validate()));
}

TEST_CASE("stiffness entries of hats") {
  const OperatorSpec laplace{1.0, 0.0, 0.0};
  for (int level : {2, 4}) {
    const double h = std::exp2(-level);
    CHECK(element_form(unit_hat(level, 1), unit_hat(level, 1), laplace) == doctest::Approx(2.0 / h));
    CHECK(element_form(unit_hat(level, 1), unit_hat(level, 2), laplace) == doctest::Approx(-1.0 / h));
    CHECK(element_form(unit_hat(level, 1), unit_hat(level, 3), laplace) == 0.0);
  }
}

TEST_CASE("convection part is antisymmetric") {
  const AggregatedFrame frame = interval_frame(4);
  const OperatorSpec convection{0.0, 1.0, 0.0};
  for (std::size_t i = 0; i < frame.size(); i += 3) {
    for (std::size_t j = 0; j < frame.size(); j += 2) {
      const double a = element_form(frame.element(i), frame.element(j), convection);
      const double b = element_form(frame.element(j), frame.element(i), convection);
      CHECK(std::abs(a + b) <= 1e-12);
    }
  }
}

TEST_CASE("entries are symmetric without convection") {
  const AggregatedFrame frame = interval_frame(5);
  const OperatorMatrix op(frame, {1.0, 0.0, 0.5});
  const Eigen::MatrixXd a = op.dense();
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * a.cwiseAbs().maxCoeff());
  CHECK(op.entry(frame.indices()[3], frame.indices()[8]) == doctest::Approx(a(8, 3)).epsilon(1e-14));
  const OperatorMatrix conv(frame, {1.0, 2.0, 0.0});
  CHECK((conv.dense() - conv.dense().transpose()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("apply") {
  const AggregatedFrame frame = interval_frame(6);
  const OperatorMatrix op(frame, {1.0, 1.5, 0.25});
  const Eigen::MatrixXd a = op.dense();
  const DenseSnapshot snapshot = assemble(op);
  std::mt19937_64 rng(31);
  CHECK(op.apply(SparseVector{}, 1e-3).empty());
  CHECK(op.apply_adjoint(SparseVector{}, 1e-3).empty());
  for (int t = 0; t < 10; ++t) {
    const SparseVector v = random_vector(frame, rng, 0.3);
    const Eigen::VectorXd exact = a * snapshot.to_dense(v);
    CHECK((snapshot.to_dense(op.apply(v, 0.0)) - exact).norm() <= 1e-12 * exact.norm());
    double previous = 0.0;
    for (double eps : {1e-4, 1e-3, 1e-2, 1e-1}) {
      ApplyCounters counters;
      const double err = (snapshot.to_dense(op.apply(v, eps, &counters)) - exact).norm();
      CHECK(err <= eps);
      CHECK(err >= previous);
      CHECK(counters.entry_evals > 0);
      previous = err;
    }
    const SparseVector y = random_vector(frame, rng, 0.3);
    const double lhs = snapshot.to_dense(op.apply(v, 0.0)).dot(snapshot.to_dense(y));
    const double rhs = snapshot.to_dense(v).dot(snapshot.to_dense(op.apply_adjoint(y, 0.0)));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("adjoint equals apply for symmetric operators") {
  const AggregatedFrame frame = interval_frame(5);
  const OperatorMatrix op(frame, {1.0, 0.0, 0.0});
  std::mt19937_64 rng(37);
  const SparseVector v = random_vector(frame, rng, 0.5);
  const SparseVector forward = op.apply(v, 1e-3);
  CHECK((forward - op.apply_adjoint(v, 1e-3)).norm() <= 1e-12 * forward.norm());
}

TEST_CASE("spectral estimates") {
  const SpectralEstimates s = SpectralEstimates::from_bounds(4.0, 1.0);
  CHECK(s.alpha_star == doctest::Approx(0.4));
  CHECK(s.rho == doctest::Approx(0.6));
  const SpectralEstimates flat = SpectralEstimates::from_bounds(3.0, 3.0);
  CHECK(flat.alpha_star == doctest::Approx(1.0 / 3.0));
  CHECK(flat.rho == doctest::Approx(0.0));
  CHECK_THROWS_AS(SpectralEstimates::from_bounds(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("power iteration matches the dense largest eigenvalue") {
  const AggregatedFrame frame = interval_frame(5);
  const OperatorMatrix op(frame, {1.0, 0.0, 0.0});
  const DenseSnapshot snapshot = assemble(op);
  const double dense = snapshot.sigma_max() * snapshot.sigma_max();
  CHECK(power_iteration_lambda_max(op) == doctest::Approx(dense).epsilon(1e-6));
  const SpectralEstimates s = estimate_spectrum(op);
  CHECK(s.lambda_min == doctest::Approx(snapshot.sigma_min() * snapshot.sigma_min()));
  CHECK(s.rho < 1.0);
}

TEST_CASE("ellipticity on the range") {
  const AggregatedFrame frame = interval_frame(5);
  const OperatorMatrix op(frame, {1.0, 0.0, 0.0});
  const DenseSnapshot snapshot = assemble(op);
  const double c = snapshot.sigma_min();
  std::mt19937_64 rng(41);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(frame.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
    const Eigen::VectorXd px = project_ran(snapshot, x);
    CHECK(x.dot(snapshot.matrix * x) >= (1.0 - 1e-9) * c * px.squaredNorm());
  }
}

TEST_CASE("entries decay with level distance") {
  const AggregatedFrame frame = interval_frame(7);
  const OperatorMatrix op(frame, {1.0, 0.0, 0.0});
  // Relative size of the largest entry per level distance, measured once.
  const std::vector<double> frozen = {1.0, 0.31427, 0.111111, 0.0785674, 0.0555556, 0.0392837};
  const std::vector<double> decay = op.level_decay();
  REQUIRE(decay.size() == frozen.size());
  for (std::size_t d = 0; d < decay.size(); ++d) CHECK(decay[d] <= 1.01 * frozen[d]);
  for (std::size_t d = 2; d < decay.size(); ++d) CHECK(decay[d] < decay[d - 1]);
}
