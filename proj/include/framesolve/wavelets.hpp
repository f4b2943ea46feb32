#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "framesolve/coeffs.hpp"
#include "framesolve/piecewise.hpp"

namespace framesolve {

enum class Boundary { Dirichlet };

/// Piecewise-linear hierarchical wavelet system on [0, 1] with homogeneous
/// Dirichlet conditions.
///
/// Scaling functions at level j are the L2-normalized hats
/// 2^(j/2) max(0, 1 - |2^j x - k|), k = 1 .. 2^j - 1. Wavelets at level j sit
/// at the odd nodes of level j + 1, k = 0 .. 2^j - 1, and carry one vanishing
/// moment:
///   interior:  2^(j/2) [H(j+1, 2k+1) - H(j, k)/4 - H(j, k+1)/4]
///   k = 0:     2^(j/2) [H(j+1, 1) - H(j, 1)/2]
///   k = 2^j-1: 2^(j/2) [H(j+1, 2^(j+1)-1) - H(j, 2^j-1)/2]
/// where H(l, m) is the unit-peak hat at node m 2^-l. A truncated system up to
/// level J consists of the scaling functions at the coarsest level together
/// with all wavelets of levels coarsest .. J-1.
class ReferenceBasis {
 public:
  explicit ReferenceBasis(int coarsest_level = 1);

  [[nodiscard]] int order() const { return 2; }
  [[nodiscard]] int coarsest_level() const { return coarsest_level_; }
  [[nodiscard]] Boundary boundary() const { return Boundary::Dirichlet; }

  /// Number of translates of `kind` at `level`.
  [[nodiscard]] std::int64_t count(int level, Kind kind) const;
  /// Smallest valid translate of `kind` (1 for scaling, 0 for wavelets).
  [[nodiscard]] static std::int64_t first_translate(Kind kind);

  /// Throws std::out_of_range "index out of range for level" for invalid input.
  void validate(int level, std::int64_t translate, Kind kind) const;

  /// The function itself as a piecewise-linear object on [0, 1].
  [[nodiscard]] PiecewiseLinear shape(int level, std::int64_t translate, Kind kind) const;

  [[nodiscard]] double eval(int level, std::int64_t translate, Kind kind, double x) const;
  [[nodiscard]] std::pair<double, double> support(int level, std::int64_t translate, Kind kind) const;

  /// int_0^1 f(x) psi^(d)(x) dx by four-point Gauss-Legendre on each
  /// breakpoint cell of the support.
  [[nodiscard]] double inner_product(const std::function<double(double)>& f, int level,
                                     std::int64_t translate, Kind kind, int derivative_order) const;

 private:
  int coarsest_level_;
};

/// Diagonal preconditioner weight 2^(-s level).
double preconditioner_weight(double sobolev_order, int level);

}  // namespace framesolve
