#include "framesolve/solve.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace framesolve {

void SolveConfig::validate() const {
  if (!(theta > 0.0 && theta < 1.0 / 3.0)) throw std::invalid_argument("theta must lie in (0, 1/3)");
  if (k_inner < 1) throw std::invalid_argument("K must be at least 1");
  if (!(epsilon_target > 0.0)) throw std::invalid_argument("target tolerance must be positive");
  if (!(spectral.alpha_star > 0.0) || !(spectral.lambda_min > 0.0)) {
    throw std::invalid_argument("spectral estimates are not initialized");
  }
  if (!(3.0 * std::pow(spectral.rho, k_inner) < theta)) {
    throw std::invalid_argument("3 rho^K must be smaller than theta");
  }
}

int SolveConfig::default_k(double rho, double theta) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0, 1)");
  if (rho == 0.0) return 1;
  const double k = std::ceil(std::log(theta / 30.0) / std::log(rho));
  return std::max(1, static_cast<int>(k));
}

SolveConfig SolveConfig::with_defaults(const SpectralEstimates& spectral, double epsilon_target,
                                       double theta) {
  SolveConfig c;
  c.theta = theta;
  c.spectral = spectral;
  c.epsilon_target = epsilon_target;
  c.k_inner = default_k(spectral.rho, theta);
  while (3.0 * std::pow(spectral.rho, c.k_inner) > theta / 10.0) ++c.k_inner;
  return c;
}

void ResidualHistory::write_csv(std::ostream& os) const {
  os << "j,epsilon_j,support,residual,entry_evals,touches\n";
  for (const SolveStep& s : steps) {
    os << s.j << ',' << format_double(s.epsilon) << ',' << s.support << ','
       << (std::isnan(s.residual) ? std::string("nan") : format_double(s.residual)) << ','
       << s.entry_evals << ',' << s.touches << '\n';
  }
}

SparseVector rhs(const SparseVector& target, double epsilon) { return coarse(epsilon, target); }

namespace {

void require_finite(const SparseVector& v) {
  if (!v.all_finite()) throw std::runtime_error("numerical breakdown");
}

}  // namespace

SolveResult solve(const OperatorMatrix& op, const RhsCallback& f, double rhs_norm,
                  const SolveConfig& config, const SolveHooks& hooks) {
  config.validate();
  if (!std::isfinite(rhs_norm) || rhs_norm < 0.0) throw std::runtime_error("numerical breakdown");
  const double alpha = config.spectral.alpha_star;
  const double theta = config.theta;
  const int K = config.k_inner;
  const double adjoint_norm = config.spectral.adjoint_norm();
  const double factor = 3.0 * std::pow(config.spectral.rho, K) / theta;

  SolveResult result;
  auto log_step = [&](int j, double eps, const SparseVector& v, double budget) {
    SolveStep s;
    s.j = j;
    s.epsilon = eps;
    s.support = v.size();
    s.residual = hooks.residual ? hooks.residual(v) : std::numeric_limits<double>::quiet_NaN();
    s.entry_evals = result.counters.entry_evals;
    s.touches = result.counters.touches;
    s.perturbation_budget = budget;
    result.history.steps.push_back(s);
  };

  SparseVector v;
  double eps = config.spectral.inverse_norm() * rhs_norm;
  int j = 0;
  log_step(j, eps, v, 0.0);
  while (eps > config.epsilon_target) {
    ++j;
    eps = factor * eps;
    const double tol_rhs = theta * eps / (12.0 * alpha * K * adjoint_norm);
    const double tol_adjoint = theta * eps / (12.0 * alpha * K);
    const double tol_apply = theta * eps / (12.0 * alpha * K * adjoint_norm);

    const SparseVector g = f(tol_rhs, result.counters);
    const SparseVector fj = op.apply_adjoint(g, tol_adjoint, &result.counters);
    require_finite(fj);
    SparseVector vk = v;
    for (int k = 1; k <= K; ++k) {
      const SparseVector w = op.apply(vk, tol_apply, &result.counters);
      const SparseVector z = op.apply_adjoint(w, tol_adjoint, &result.counters);
      const SparseVector gradient = z - fj;
      vk = axpy(-alpha, gradient, vk);
      result.counters.touches += z.size() + fj.size() + gradient.size() + vk.size();
      require_finite(vk);
      ++result.inner_iterations;
    }
    const double budget =
        K * alpha * (adjoint_norm * tol_apply + tol_adjoint + adjoint_norm * tol_rhs + tol_adjoint);
    SparseVector next = coarse((1.0 - theta) * eps, vk);
    result.counters.touches += vk.size();
    if (hooks.observer) hooks.observer(j, eps, v, vk, next);
    v = std::move(next);
    log_step(j, eps, v, budget);
  }
  result.solution = std::move(v);
  return result;
}

SolveResult solve(const OperatorMatrix& op, const SparseVector& f_vec, const SolveConfig& config,
                  const SolveHooks& hooks) {
  const RhsCallback callback = [&f_vec](double epsilon, ApplyCounters& counters) {
    counters.touches += f_vec.size();
    return rhs(f_vec, epsilon);
  };
  return solve(op, callback, f_vec.norm(), config, hooks);
}

}  // namespace framesolve
