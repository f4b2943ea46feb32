#include "framesolve/wavelets.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace framesolve {

ReferenceBasis::ReferenceBasis(int coarsest_level) : coarsest_level_(coarsest_level) {
  if (coarsest_level < 1) throw std::invalid_argument("coarsest level must be at least 1");
}

std::int64_t ReferenceBasis::count(int level, Kind kind) const {
  const std::int64_t n = std::int64_t{1} << level;
  switch (kind) {
    case Kind::Scaling:
      return n - 1;
    case Kind::Wavelet:
      return n;
    default:
      throw std::invalid_argument("reference basis has only scaling and wavelet kinds");
  }
}

std::int64_t ReferenceBasis::first_translate(Kind kind) { return kind == Kind::Scaling ? 1 : 0; }

void ReferenceBasis::validate(int level, std::int64_t translate, Kind kind) const {
  if (kind != Kind::Scaling && kind != Kind::Wavelet) {
    throw std::out_of_range("index out of range for level: kind " + to_string(kind));
  }
  if (level < coarsest_level_ || level > 60) {
    throw std::out_of_range("index out of range for level " + std::to_string(level));
  }
  const std::int64_t first = first_translate(kind);
  if (translate < first || translate >= first + count(level, kind)) {
    throw std::out_of_range("index out of range for level " + std::to_string(level) +
                            ": translate " + std::to_string(translate));
  }
}

PiecewiseLinear ReferenceBasis::shape(int level, std::int64_t translate, Kind kind) const {
  validate(level, translate, kind);
  const double h = std::ldexp(1.0, -level);
  const double amp = std::sqrt(std::ldexp(1.0, level));
  const auto k = static_cast<double>(translate);
  PiecewiseLinear f;
  if (kind == Kind::Scaling) {
    f.x = {(k - 1.0) * h, k * h, (k + 1.0) * h};
    f.y = {0.0, amp, 0.0};
    return f;
  }
  const std::int64_t last = count(level, Kind::Wavelet) - 1;
  // Nodal values on the level j+1 grid, node spacing h/2.
  if (translate == 0) {
    f.x = {0.0, 0.5 * h, h, 2.0 * h};
    f.y = {0.0, amp * (1.0 - 0.25), amp * (-0.5), 0.0};
  } else if (translate == last) {
    f.x = {(k - 1.0) * h, k * h, (k + 0.5) * h, (k + 1.0) * h};
    f.y = {0.0, amp * (-0.5), amp * (1.0 - 0.25), 0.0};
  } else {
    f.x = {(k - 1.0) * h, k * h, (k + 0.5) * h, (k + 1.0) * h, (k + 2.0) * h};
    f.y = {0.0, amp * (-0.25), amp * (1.0 - 0.25), amp * (-0.25), 0.0};
  }
  return f;
}

double ReferenceBasis::eval(int level, std::int64_t translate, Kind kind, double x) const {
  return shape(level, translate, kind).value(x);
}

std::pair<double, double> ReferenceBasis::support(int level, std::int64_t translate, Kind kind) const {
  const PiecewiseLinear f = shape(level, translate, kind);
  return {f.lo(), f.hi()};
}

double ReferenceBasis::inner_product(const std::function<double(double)>& f, int level,
                                     std::int64_t translate, Kind kind, int derivative_order) const {
  return integrate_against(f, shape(level, translate, kind), derivative_order);
}

double preconditioner_weight(double sobolev_order, int level) {
  return std::exp2(-sobolev_order * static_cast<double>(level));
}

}  // namespace framesolve
