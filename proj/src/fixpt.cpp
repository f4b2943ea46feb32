#include "framesolve/fixpt.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "framesolve/oracle.hpp"

namespace framesolve {

double NonlinearSpec::norm_bound() const {
  return std::abs(strength) / (2.0 * std::numbers::pi * std::numbers::pi);
}

SparseVector apply_nonlinear(const AggregatedFrame& frame, const NonlinearSpec& nl,
                             const SparseVector& v, double epsilon, std::uint64_t* entry_evals) {
  if (frame.dimension() != 1) throw std::invalid_argument("nonlinear term needs a 1D frame");
  if (v.empty() || nl.strength == 0.0) return {};
  const PiecewiseLinear u = synthesize_function(frame, v);
  std::vector<SparseVector::Entry> out;
  std::uint64_t evals = 0;
  for (std::size_t m = 0; m < frame.size(); ++m) {
    const Element& e = frame.element(m);
    if (!(std::max(e.fx.lo(), u.lo()) < std::min(e.fx.hi(), u.hi()))) continue;
    ++evals;
    const double value = e.weight * nl.strength * integrate_square_against(u, e.fx);
    if (value != 0.0) out.emplace_back(e.index, value);
  }
  if (entry_evals != nullptr) *entry_evals += evals;
  return coarse(epsilon, SparseVector::from_sorted(std::move(out)));
}

double ContractionConstants::gamma() const {
  return 2.0 * inverse_norm * std::pow(frame_norm, 3) * nonlinear_norm;
}

double ContractionConstants::smallness_bound() const {
  const double b = nonlinear_norm * std::pow(frame_norm, 3);
  if (b == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (4.0 * inverse_norm * inverse_norm * b);
}

ContractionConstants measure_constants(const AggregatedFrame& frame,
                                       const SpectralEstimates& spectral, const NonlinearSpec& nl) {
  ContractionConstants c;
  c.inverse_norm = spectral.inverse_norm();
  c.frame_norm = std::sqrt(synthesis_norm_squared(frame));
  c.nonlinear_norm = nl.norm_bound();
  return c;
}

void FixptConfig::validate() const {
  if (!(epsilon_target > 0.0)) throw std::invalid_argument("target tolerance must be positive");
  if (!(epsilon0 > 0.0 && epsilon0 < 1.0)) throw std::invalid_argument("epsilon0 must lie in (0, 1)");
  if (!(lipschitz < epsilon0)) throw std::invalid_argument("need L < epsilon0");
  if (!(epsilon0 < radius)) throw std::invalid_argument("need epsilon0 < r*");
  if (epsilon0 == lipschitz) throw std::invalid_argument("need epsilon0 != L");
}

FixptConfig check_contraction(const ContractionConstants& constants, const SparseVector& l_vec,
                              double epsilon_target) {
  FixptConfig c;
  c.epsilon_target = epsilon_target;
  c.gamma = constants.gamma();
  c.smallness_bound = constants.smallness_bound();
  c.data_norm = l_vec.norm();
  c.inverse_norm = constants.inverse_norm;
  const double a = constants.inverse_norm;
  const double b = constants.nonlinear_norm * std::pow(constants.frame_norm, 3);
  if (!(c.data_norm < c.smallness_bound)) {
    std::ostringstream msg;
    msg << "data too large: fixed point not certified (||l|| = " << c.data_norm
        << ", bound = " << c.smallness_bound << ", gamma = " << c.gamma << ")";
    throw CertificationError(msg.str(), c.gamma, c.smallness_bound, c.data_norm);
  }
  if (b == 0.0) {
    c.radius = c.data_norm > 0.0 ? 2.0 * a * c.data_norm : 1.0;
    c.lipschitz = 0.0;
    c.epsilon0 = 0.5 * std::min(c.radius, 1.0);
  } else {
    const double target = 0.5 * (c.data_norm + c.smallness_bound);
    const double disc = std::max(0.0, 1.0 / (a * a) - 4.0 * b * target);
    c.radius = 2.0 * target / (1.0 / a + std::sqrt(disc));
    c.lipschitz = c.gamma * c.radius;
    c.epsilon0 = std::sqrt(c.lipschitz * std::min(c.radius, 1.0));
  }
  if (!(c.lipschitz < c.epsilon0 && c.epsilon0 < c.radius && c.epsilon0 < 1.0)) {
    std::ostringstream msg;
    msg << "nonlinearity too strong: no admissible epsilon0 with L < epsilon0 < r* (gamma = "
        << c.gamma << ", L = " << c.lipschitz << ", r* = " << c.radius << ")";
    throw CertificationError(msg.str(), c.gamma, c.smallness_bound, c.data_norm);
  }
  c.validate();
  return c;
}

FixptConfig check_contraction(const OperatorMatrix& op, const SpectralEstimates& spectral,
                              const NonlinearSpec& nl, const SparseVector& l_vec,
                              double epsilon_target) {
  return check_contraction(measure_constants(op.frame(), spectral, nl), l_vec, epsilon_target);
}

void write_fixpt_csv(std::ostream& os, const std::vector<FixptStep>& history) {
  os << "i,epsilon_i,support,inner_solve_iters,nl_entry_evals\n";
  for (const FixptStep& s : history) {
    os << s.i << ',' << format_double(s.epsilon) << ',' << s.support << ',' << s.inner_solve_iters
       << ',' << s.nl_entry_evals << '\n';
  }
}

std::vector<double> partial_bounds(const FixptConfig& config, int n_max) {
  const double e0 = config.epsilon0;
  const double L = config.lipschitz;
  auto eps = [e0](int k) { return std::pow(e0, k); };
  const double base = e0 + config.inverse_norm * config.data_norm;
  std::vector<double> out;
  for (int n = 0; n <= n_max; ++n) {
    double first = 0.0;
    for (int k = 2; k <= n + 1; ++k) first += eps(k);
    double second = 0.0;
    for (int h = 0; h <= n - 3; ++h) {
      for (int k = 3; k <= n - h; ++k) second += eps(k) * std::pow(L, n - h - k);
    }
    double geometric = 0.0;
    for (int k = 0; k <= n - 1; ++k) geometric += std::pow(L, k);
    out.push_back(first + (1.0 + L) * second + (eps(1) + L * base) * geometric + base);
  }
  return out;
}

int max_fixpt_iterations(double epsilon_target) {
  return 10 * static_cast<int>(std::ceil(-std::log10(epsilon_target))) + 20;
}

FixptResult fixpt(const OperatorMatrix& op, const NonlinearSpec& nl, const SparseVector& l_vec,
                  const SpectralEstimates& spectral, const FixptConfig& config, double theta,
                  const FixptHooks& hooks) {
  config.validate();
  const double e0 = config.epsilon0;
  const double L = config.lipschitz;
  const double target = config.epsilon_target;
  const int cap = max_fixpt_iterations(target);
  auto exit_bound = [&](int i) {
    return (e0 - L) / (e0 * (e0 - L * std::pow(L / e0, i))) *
           (target - std::pow(L, i) * config.radius);
  };

  FixptResult result;
  SparseVector v;
  int i = 0;
  double eps_i = e0;
  result.history.push_back({0, eps_i, 0, 0, 0});
  while (eps_i > exit_bound(i) && i < cap) {
    eps_i = std::pow(e0, i + 1);
    std::uint64_t nl_evals = 0;
    const SparseVector datum = l_vec - apply_nonlinear(op.frame(), nl, v, 0.0, &nl_evals);
    if (!datum.all_finite()) throw std::runtime_error("numerical breakdown");
    const RhsCallback callback = [&datum](double epsilon, ApplyCounters& counters) {
      counters.touches += datum.size();
      return coarse(epsilon, datum);
    };
    SolveConfig sc = SolveConfig::with_defaults(spectral, eps_i, theta);
    SolveResult inner = solve(op, callback, datum.norm(), sc);
    v = std::move(inner.solution);
    ++i;
    result.counters += inner.counters;
    result.counters.entry_evals += nl_evals;
    result.history.push_back({i, eps_i, v.size(), inner.inner_iterations, nl_evals});
    if (hooks.observer) hooks.observer(i, v);
  }
  result.solution = std::move(v);
  result.iterations = i;
  const auto bounds = partial_bounds(config, i);
  for (double e : bounds) result.max_partial_bound = std::max(result.max_partial_bound, e);
  return result;
}

}  // namespace framesolve
