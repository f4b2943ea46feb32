#include "framesolve/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace framesolve {

double gauss_legendre4(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t q = 0; q < 4; ++q) {
    sum += GaussLegendre4::weights[q] * f(mid + half * GaussLegendre4::nodes[q]);
  }
  return half * sum;
}

namespace {

// Index of the cell [x[i], x[i+1]) containing t, or npos.
std::size_t locate(const std::vector<double>& x, double t) {
  if (x.size() < 2 || t < x.front() || t > x.back()) return static_cast<std::size_t>(-1);
  auto it = std::upper_bound(x.begin(), x.end(), t);
  std::size_t i = static_cast<std::size_t>(it - x.begin());
  if (i == 0) return static_cast<std::size_t>(-1);
  if (i >= x.size()) i = x.size() - 1;
  return i - 1;
}

}  // namespace

double PiecewiseLinear::value(double t) const {
  const std::size_t i = locate(x, t);
  if (i == static_cast<std::size_t>(-1)) return 0.0;
  const double s = (t - x[i]) / (x[i + 1] - x[i]);
  return (1.0 - s) * y[i] + s * y[i + 1];
}

double PiecewiseLinear::derivative(double t) const {
  const std::size_t i = locate(x, t);
  if (i == static_cast<std::size_t>(-1) || t >= x.back()) return 0.0;
  return (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
}

PiecewiseLinear PiecewiseLinear::transformed(double offset, double stretch, double scale) const {
  if (stretch == 0.0) throw std::invalid_argument("degenerate stretch");
  PiecewiseLinear out;
  out.x.reserve(x.size());
  out.y.reserve(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.x.push_back(offset + stretch * x[i]);
    out.y.push_back(scale * y[i]);
  }
  if (stretch < 0.0) {
    std::reverse(out.x.begin(), out.x.end());
    std::reverse(out.y.begin(), out.y.end());
  }
  return out;
}

PiecewiseLinear PiecewiseLinear::scaled(double alpha) const {
  PiecewiseLinear out = *this;
  for (double& v : out.y) v *= alpha;
  return out;
}

PiecewiseLinear sum(const std::vector<std::pair<double, const PiecewiseLinear*>>& terms) {
  std::vector<double> breaks;
  for (const auto& [coef, f] : terms) breaks.insert(breaks.end(), f->x.begin(), f->x.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  PiecewiseLinear out;
  out.x = breaks;
  out.y.assign(breaks.size(), 0.0);
  for (const auto& [coef, f] : terms) {
    if (f->empty()) continue;
    auto first = std::lower_bound(breaks.begin(), breaks.end(), f->lo());
    auto last = std::upper_bound(breaks.begin(), breaks.end(), f->hi());
    for (auto it = first; it != last; ++it) {
      out.y[static_cast<std::size_t>(it - breaks.begin())] += coef * f->value(*it);
    }
  }
  return out;
}

std::vector<double> common_breakpoints(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  if (f.empty() || g.empty()) return {};
  const double lo = std::max(f.lo(), g.lo());
  const double hi = std::min(f.hi(), g.hi());
  if (!(lo < hi)) return {};
  std::vector<double> breaks{lo, hi};
  for (double t : f.x) {
    if (t > lo && t < hi) breaks.push_back(t);
  }
  for (double t : g.x) {
    if (t > lo && t < hi) breaks.push_back(t);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return breaks;
}

ProductIntegrals integrate_products(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  ProductIntegrals out;
  const auto breaks = common_breakpoints(f, g);
  for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
    const double a = breaks[c];
    const double b = breaks[c + 1];
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double df = f.derivative(mid);
    const double dg = g.derivative(mid);
    double vv = 0.0;
    double gv = 0.0;
    for (std::size_t q = 0; q < 4; ++q) {
      const double t = mid + half * GaussLegendre4::nodes[q];
      const double w = GaussLegendre4::weights[q];
      const double gt = g.value(t);
      vv += w * f.value(t) * gt;
      gv += w * df * gt;
    }
    out.value_value += half * vv;
    out.grad_value += half * gv;
    out.grad_grad += (b - a) * df * dg;
  }
  return out;
}

double integrate_against(const std::function<double(double)>& h, const PiecewiseLinear& f,
                         int derivative_order, double max_cell) {
  if (derivative_order != 0 && derivative_order != 1) {
    throw std::invalid_argument("derivative order must be 0 or 1");
  }
  if (!(max_cell > 0.0)) throw std::invalid_argument("cell width must be positive");
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < f.x.size(); ++c) {
    const double width = f.x[c + 1] - f.x[c];
    const int subdivisions =
        std::isinf(max_cell) ? 1 : std::max(1, static_cast<int>(std::ceil(width / max_cell - 1e-9)));
    const double step = width / subdivisions;
    const double slope = (f.y[c + 1] - f.y[c]) / width;
    for (int r = 0; r < subdivisions; ++r) {
      const double a = f.x[c] + r * step;
      const double b = r + 1 == subdivisions ? f.x[c + 1] : a + step;
      if (derivative_order == 0) {
        total += gauss_legendre4([&](double t) { return h(t) * f.value(t); }, a, b);
      } else {
        total += slope * gauss_legendre4(h, a, b);
      }
    }
  }
  return total;
}

double integrate_square_against(const PiecewiseLinear& u, const PiecewiseLinear& g) {
  const auto breaks = common_breakpoints(u, g);
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
    total += gauss_legendre4(
        [&](double t) {
          const double ut = u.value(t);
          return ut * ut * g.value(t);
        },
        breaks[c], breaks[c + 1]);
  }
  return total;
}

}  // namespace framesolve
