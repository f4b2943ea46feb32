#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "framesolve/coeffs.hpp"
#include "test_support.hpp"

using namespace framesolve;
using framesolve::testing::idx;
using framesolve::testing::random_sparse_vector;

namespace {

/// Shortest prefix of the magnitude-sorted entries whose removed tail has norm <= eps.
SparseVector brute_force_coarse(double eps, const SparseVector& v) {
  const auto sorted = sorted_by_magnitude(v);
  for (std::size_t n = 0; n <= sorted.size(); ++n) {
    double tail = 0.0;
    for (std::size_t i = n; i < sorted.size(); ++i) tail += sorted[i].second * sorted[i].second;
    if (std::sqrt(tail) <= eps) {
      return SparseVector(std::vector<SparseVector::Entry>(sorted.begin(), sorted.begin() + n));
    }
  }
  return v;
}

}  // namespace

TEST_CASE("sparse vector keeps canonical form") {
  const SparseVector v({{idx(2), 1.0}, {idx(1), 2.0}, {idx(2), -1.0}, {idx(3), 0.0}});
  REQUIRE(v.size() == 1);
  CHECK(v[idx(1)] == 2.0);
  CHECK_FALSE(v.contains(idx(2)));
  CHECK(v[idx(7)] == 0.0);
}

TEST_CASE("axpy examples") {
  CHECK(axpy(1.0, SparseVector{{idx(1), 2.0}}, SparseVector{{idx(1), -2.0}}).empty());
  const SparseVector x{{idx(1), 1.0}, {idx(4), -3.5}};
  const SparseVector y{{idx(2), 0.25}};
  CHECK(axpy(0.0, x, y) == y);
  const SparseVector z = axpy(2.0, SparseVector{{idx(1), 1.0}, {idx(2), 3.0}}, SparseVector{{idx(2), -1.0}});
  CHECK(z == SparseVector{{idx(1), 2.0}, {idx(2), 5.0}});
}

TEST_CASE("best_n_term examples") {
  const SparseVector v{{idx(1), 3.0}, {idx(2), 1.0}, {idx(3), 0.5}};
  CHECK(best_n_term(v, 2) == SparseVector{{idx(1), 3.0}, {idx(2), 1.0}});
  CHECK(best_n_term(v, 0).empty());
  CHECK(best_n_term(SparseVector{{idx(1), 1.0}, {idx(2), -1.0}}, 1) == SparseVector{{idx(1), 1.0}});
}

TEST_CASE("best_n_term minimizes the tail over all subsets of the same size") {
  const SparseVector v{{idx(1), 3.0}, {idx(2), -1.0}, {idx(3), 0.5}, {idx(4), 2.0}};
  for (std::size_t n = 0; n <= v.size(); ++n) {
    double best_tail = INFINITY;
    for (unsigned mask = 0; mask < 16; ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) != n) continue;
      double tail = 0.0;
      for (std::size_t i = 0; i < 4; ++i) {
        if (!(mask & (1u << i))) tail += v.entries()[i].second * v.entries()[i].second;
      }
      best_tail = std::min(best_tail, tail);
    }
    CHECK((v - best_n_term(v, n)).squared_norm() == doctest::Approx(best_tail));
  }
}

TEST_CASE("best_n_term is idempotent") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const SparseVector v = random_sparse_vector(rng, 60);
    for (std::size_t n : {0u, 1u, 5u, 30u}) {
      CHECK(best_n_term(best_n_term(v, n), n) == best_n_term(v, n));
    }
  }
}

TEST_CASE("coarse examples") {
  const SparseVector v{{idx(1), 3.0}, {idx(2), 1.0}, {idx(3), 0.5}};
  CHECK(coarse(0.5, v) == SparseVector{{idx(1), 3.0}, {idx(2), 1.0}});
  CHECK(coarse(v.norm(), v).empty());
  CHECK(coarse(0.0, v) == v);
}

TEST_CASE("coarse matches the brute-force prefix oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> log_eps(-5.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    const SparseVector v = random_sparse_vector(rng, 80);
    const double eps = std::pow(10.0, log_eps(rng));
    const SparseVector w = coarse(eps, v);
    CHECK((v - w).norm() <= eps);
    CHECK(w == brute_force_coarse(eps, v));
  }
}

TEST_CASE("weak quasinorm examples") {
  const SparseVector v{{idx(1), 1.0}, {idx(2), 0.5}, {idx(3), 0.25}};
  CHECK(weak_quasinorm(v, SparsenessParams(0.5)) == doctest::Approx(1.0));
  CHECK(weak_quasinorm(SparseVector{}, SparsenessParams(1.0)) == 0.0);
  for (double s : {0.25, 0.5, 1.0, 2.0}) {
    CHECK(weak_quasinorm(SparseVector{{idx(4), -2.5}}, SparsenessParams(s)) == doctest::Approx(2.5));
  }
  CHECK(SparsenessParams(0.5).tau == doctest::Approx(1.0));
}

TEST_CASE("weak quasinorm laws on random vectors") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 200; ++t) {
    const SparseVector v = random_sparse_vector(rng, 200);
    const double support = static_cast<double>(v.size());
    for (double s : {0.25, 0.5, 1.0, 2.0}) {
      const SparsenessParams p(s);
      const double q = weak_quasinorm(v, p);
      for (std::size_t n : {1u, 3u, 10u, 50u}) {
        CHECK(weak_quasinorm(best_n_term(v, n), p) <= q);
      }
      const double e = best_n_term_error_norm(v, s);
      CHECK(e <= 4.0 * q);
      CHECK(q <= 4.0 * e);
      for (double s_tilde : {s + 0.25, s + 1.0}) {
        CHECK(weak_quasinorm(v, SparsenessParams(s_tilde)) <=
              std::pow(support, s_tilde - s) * q * (1.0 + 1e-14));
      }
    }
  }
}

TEST_CASE("frame index packing round trips") {
  for (int level : {1, 3, 6}) {
    const std::int64_t last = (std::int64_t{1} << level) - 1;
    for (std::int64_t kx : {std::int64_t{0}, std::int64_t{1}, last}) {
      for (std::int64_t ky : {std::int64_t{0}, last / 2, last}) {
        const auto [x, y] = unpack_translate(level, pack_translate(level, kx, ky));
        CHECK(x == kx);
        CHECK(y == ky);
      }
    }
  }
  CHECK(kind_from_string(to_string(Kind::WaveletScaling)) == Kind::WaveletScaling);
  CHECK_THROWS_AS(kind_from_string("hat"), std::invalid_argument);
}

TEST_CASE("sparse vector text format round trips exactly") {
  std::mt19937_64 rng(17);
  const SparseVector v = random_sparse_vector(rng, 40);
  std::stringstream ss;
  write_sparse_vector(ss, v);
  CHECK(read_sparse_vector(ss) == v);
  CHECK(std::stod(format_double(0.1)) == 0.1);
  CHECK(format_double(0.5) == "0.5");
}
