#pragma once

#include <array>
#include <functional>
#include <limits>
#include <vector>

namespace framesolve {

/// Four-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre4 {
  static constexpr std::array<double, 4> nodes = {-0.8611363115940526, -0.3399810435848563,
                                                  0.3399810435848563, 0.8611363115940526};
  static constexpr std::array<double, 4> weights = {0.3478548451374538, 0.6521451548625461,
                                                    0.6521451548625461, 0.3478548451374538};
};

/// Integral of `f` over [a, b] with one Gauss-Legendre cell.
double gauss_legendre4(const std::function<double(double)>& f, double a, double b);

/// Continuous piecewise-linear function given by strictly increasing
/// breakpoints and the values there; zero outside [x.front(), x.back()].
struct PiecewiseLinear {
  std::vector<double> x;
  std::vector<double> y;

  [[nodiscard]] bool empty() const { return x.empty(); }
  [[nodiscard]] double lo() const { return x.front(); }
  [[nodiscard]] double hi() const { return x.back(); }

  [[nodiscard]] double value(double t) const;
  /// One-sided derivative from the right; zero outside the support.
  [[nodiscard]] double derivative(double t) const;

  /// Function t -> scale * f((t - offset) / stretch) for stretch != 0.
  [[nodiscard]] PiecewiseLinear transformed(double offset, double stretch, double scale) const;
  [[nodiscard]] PiecewiseLinear scaled(double alpha) const;
};

/// Sum of piecewise-linear functions on the union of their breakpoints.
PiecewiseLinear sum(const std::vector<std::pair<double, const PiecewiseLinear*>>& terms);

/// Sorted union of the breakpoints of `f` and `g` restricted to their common support.
std::vector<double> common_breakpoints(const PiecewiseLinear& f, const PiecewiseLinear& g);

/// The three product integrals of two piecewise-linear functions.
struct ProductIntegrals {
  double grad_grad = 0.0;   // int f' g'
  double grad_value = 0.0;  // int f' g
  double value_value = 0.0; // int f g
};

ProductIntegrals integrate_products(const PiecewiseLinear& f, const PiecewiseLinear& g);

/// int h(t) * f^(d)(t) dt over the support of f. Each breakpoint interval of
/// f is split into the fewest equal Gauss-Legendre cells no wider than
/// `max_cell`.
double integrate_against(const std::function<double(double)>& h, const PiecewiseLinear& f,
                         int derivative_order,
                         double max_cell = std::numeric_limits<double>::infinity());

/// int u(t)^2 g(t) dt, exact for piecewise-linear u and g.
double integrate_square_against(const PiecewiseLinear& u, const PiecewiseLinear& g);

}  // namespace framesolve
