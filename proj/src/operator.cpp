#include "framesolve/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>

namespace framesolve {

void OperatorSpec::validate() const {
  if (!(diffusion > 0.0)) throw std::invalid_argument("diffusion must be positive");
  if (!(reaction >= 0.0)) throw std::invalid_argument("reaction must be nonnegative");
  if (!std::isfinite(convection)) throw std::invalid_argument("convection must be finite");
}

SpectralEstimates SpectralEstimates::from_bounds(double lambda_max, double lambda_min) {
  if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min)) {
    throw std::invalid_argument("spectral bounds need 0 < lambda_min <= lambda_max");
  }
  SpectralEstimates s;
  s.lambda_max = lambda_max;
  s.lambda_min = lambda_min;
  s.alpha_star = 2.0 / (lambda_max + lambda_min);
  s.rho = std::max(s.alpha_star * lambda_max - 1.0, 1.0 - s.alpha_star * lambda_min);
  return s;
}

double SpectralEstimates::adjoint_norm() const { return std::sqrt(lambda_max); }
double SpectralEstimates::inverse_norm() const { return 1.0 / std::sqrt(lambda_min); }

double element_form(const Element& row, const Element& col, const OperatorSpec& spec) {
  const ProductIntegrals px = integrate_products(col.fx, row.fx);
  if (col.fy.empty()) {
    return spec.diffusion * px.grad_grad + spec.convection * px.grad_value +
           spec.reaction * px.value_value;
  }
  const ProductIntegrals py = integrate_products(col.fy, row.fy);
  return spec.diffusion * (px.grad_grad * py.value_value + px.value_value * py.grad_grad) +
         spec.convection * px.grad_value * py.value_value +
         spec.reaction * px.value_value * py.value_value;
}

namespace {

bool overlaps(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  return std::max(f.lo(), g.lo()) < std::min(f.hi(), g.hi());
}

bool overlaps(const Element& a, const Element& b) {
  if (!overlaps(a.fx, b.fx)) return false;
  return a.fy.empty() || overlaps(a.fy, b.fy);
}

}  // namespace

OperatorMatrix::Column OperatorMatrix::build_column(
    std::vector<std::pair<std::uint32_t, double>> entries, const std::vector<FrameIndex>& indices,
    int level) {
  auto distance = [&](std::uint32_t r) { return std::abs(indices[r].level - level); };
  std::sort(entries.begin(), entries.end(), [&](const auto& a, const auto& b) {
    const int da = distance(a.first);
    const int db = distance(b.first);
    if (da != db) return da < db;
    return a.first < b.first;
  });
  Column col;
  int max_distance = 0;
  for (const auto& [r, value] : entries) {
    col.rows.push_back(r);
    col.values.push_back(value);
    max_distance = std::max(max_distance, distance(r));
  }
  col.band_end.assign(static_cast<std::size_t>(max_distance) + 1, 0);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto d = static_cast<std::size_t>(distance(entries[i].first));
    col.band_end[d] = static_cast<std::uint32_t>(i + 1);
  }
  for (std::size_t b = 1; b < col.band_end.size(); ++b) {
    col.band_end[b] = std::max(col.band_end[b], col.band_end[b - 1]);
  }
  // Suffix sums of squares, accumulated from the far end.
  std::vector<double> suffix(entries.size() + 1, 0.0);
  for (std::size_t i = entries.size(); i-- > 0;) {
    suffix[i] = suffix[i + 1] + col.values[i] * col.values[i];
  }
  col.norm = std::sqrt(suffix[0]);
  col.tail.resize(col.band_end.size());
  for (std::size_t b = 0; b < col.band_end.size(); ++b) {
    col.tail[b] = std::sqrt(suffix[col.band_end[b]]);
  }
  return col;
}

OperatorMatrix::OperatorMatrix(const AggregatedFrame& frame, OperatorSpec spec)
    : frame_(&frame), spec_(spec) {
  spec_.validate();
  const std::size_t n = frame.size();
  if (n > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("frame too large");
  std::vector<std::size_t> by_lo(n);
  std::iota(by_lo.begin(), by_lo.end(), 0);
  std::sort(by_lo.begin(), by_lo.end(), [&](std::size_t a, std::size_t b) {
    const double la = frame.element(a).fx.lo();
    const double lb = frame.element(b).fx.lo();
    if (la != lb) return la < lb;
    return a < b;
  });
  std::vector<double> sorted_lo(n);
  for (std::size_t i = 0; i < n; ++i) sorted_lo[i] = frame.element(by_lo[i]).fx.lo();

  std::vector<std::vector<std::pair<std::uint32_t, double>>> col_entries(n);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> row_entries(n);
  for (std::size_t c = 0; c < n; ++c) {
    const Element& ec = frame.element(c);
    const auto end = static_cast<std::size_t>(
        std::lower_bound(sorted_lo.begin(), sorted_lo.end(), ec.fx.hi()) - sorted_lo.begin());
    for (std::size_t s = 0; s < end; ++s) {
      const std::size_t r = by_lo[s];
      const Element& er = frame.element(r);
      if (!overlaps(er, ec)) continue;
      const double value = er.weight * ec.weight * element_form(er, ec, spec_);
      if (value == 0.0) continue;
      col_entries[c].emplace_back(static_cast<std::uint32_t>(r), value);
      row_entries[r].emplace_back(static_cast<std::uint32_t>(c), value);
      ++nonzeros_;
    }
  }
  const auto& indices = frame.indices();
  columns_.reserve(n);
  rows_.reserve(n);
  for (std::size_t c = 0; c < n; ++c) {
    columns_.push_back(build_column(std::move(col_entries[c]), indices, indices[c].level));
    rows_.push_back(build_column(std::move(row_entries[c]), indices, indices[c].level));
  }
}

double OperatorMatrix::entry(const FrameIndex& row, const FrameIndex& col) const {
  const Element& er = frame_->element(row);
  const Element& ec = frame_->element(col);
  if (!overlaps(er, ec)) return 0.0;
  return er.weight * ec.weight * element_form(er, ec, spec_);
}

SparseVector OperatorMatrix::apply(const SparseVector& v, double epsilon,
                                   ApplyCounters* counters) const {
  return apply_columns(columns_, v, epsilon, counters);
}

SparseVector OperatorMatrix::apply_adjoint(const SparseVector& v, double epsilon,
                                           ApplyCounters* counters) const {
  return apply_columns(rows_, v, epsilon, counters);
}

SparseVector OperatorMatrix::apply_columns(const std::vector<Column>& columns,
                                           const SparseVector& v, double epsilon,
                                           ApplyCounters* counters) const {
  if (v.empty()) return {};
  if (!(epsilon >= 0.0)) throw std::invalid_argument("apply tolerance must be nonnegative");
  const std::size_t m = v.size();
  std::vector<std::size_t> pos(m);
  std::vector<double> mag(m);
  for (std::size_t i = 0; i < m; ++i) {
    pos[i] = frame_->position(v.entries()[i].first);
    mag[i] = std::abs(v.entries()[i].second);
  }
  // band[i] = -1 drops the column entirely; band b keeps level distances <= b.
  std::vector<int> band(m, -1);
  auto tail = [&](std::size_t i) {
    const Column& col = columns[pos[i]];
    return band[i] < 0 ? col.norm : col.tail[static_cast<std::size_t>(band[i])];
  };
  auto total_bound = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += mag[i] * tail(i);
    return s;
  };
  using Item = std::pair<double, std::size_t>;
  auto item_less = [](const Item& a, const Item& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  };
  std::priority_queue<Item, std::vector<Item>, decltype(item_less)> queue(item_less);
  double bound = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double c = mag[i] * tail(i);
    bound += c;
    if (c > 0.0) queue.emplace(c, i);
  }
  while (!queue.empty()) {
    if (bound <= epsilon) {
      bound = total_bound();
      if (bound <= epsilon) break;
    }
    const auto [c, i] = queue.top();
    queue.pop();
    const Column& col = columns[pos[i]];
    const double before = tail(i);
    do {
      ++band[i];
    } while (static_cast<std::size_t>(band[i]) + 1 < col.tail.size() && tail(i) == before);
    const double after = tail(i);
    bound -= mag[i] * (before - after);
    if (after > 0.0) queue.emplace(mag[i] * after, i);
  }

  std::vector<double> acc(frame_->size(), 0.0);
  std::vector<char> seen(frame_->size(), 0);
  std::vector<std::uint32_t> touched;
  std::uint64_t used = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (band[i] < 0) continue;
    const Column& col = columns[pos[i]];
    const double value = v.entries()[i].second;
    const std::uint32_t end = col.band_end[static_cast<std::size_t>(band[i])];
    used += end;
    for (std::uint32_t e = 0; e < end; ++e) {
      const std::uint32_t r = col.rows[e];
      acc[r] += value * col.values[e];
      if (!seen[r]) {
        seen[r] = 1;
        touched.push_back(r);
      }
    }
  }
  std::sort(touched.begin(), touched.end());
  std::vector<SparseVector::Entry> out;
  out.reserve(touched.size());
  const auto& indices = frame_->indices();
  for (std::uint32_t r : touched) {
    if (acc[r] != 0.0) out.emplace_back(indices[r], acc[r]);
  }
  if (counters != nullptr) {
    counters->entry_evals += used;
    counters->touches += m + touched.size();
  }
  return SparseVector::from_sorted(std::move(out));
}

Eigen::VectorXd OperatorMatrix::normal_product(const Eigen::VectorXd& x) const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::VectorXd ax = Eigen::VectorXd::Zero(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Column& col = columns_[static_cast<std::size_t>(c)];
    for (std::size_t e = 0; e < col.rows.size(); ++e) ax(col.rows[e]) += col.values[e] * x(c);
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Column& col = columns_[static_cast<std::size_t>(c)];
    double s = 0.0;
    for (std::size_t e = 0; e < col.rows.size(); ++e) s += col.values[e] * ax(col.rows[e]);
    out(c) = s;
  }
  return out;
}

Eigen::MatrixXd OperatorMatrix::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Column& col = columns_[static_cast<std::size_t>(c)];
    for (std::size_t e = 0; e < col.rows.size(); ++e) a(col.rows[e], c) = col.values[e];
  }
  return a;
}

std::vector<double> OperatorMatrix::level_decay() const {
  std::vector<double> decay;
  double diag = 0.0;
  const auto& indices = frame_->indices();
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    const Column& col = columns_[c];
    for (std::size_t e = 0; e < col.rows.size(); ++e) {
      const auto d = static_cast<std::size_t>(std::abs(indices[col.rows[e]].level - indices[c].level));
      if (decay.size() <= d) decay.resize(d + 1, 0.0);
      decay[d] = std::max(decay[d], std::abs(col.values[e]));
      if (col.rows[e] == c) diag = std::max(diag, std::abs(col.values[e]));
    }
  }
  if (diag > 0.0) {
    for (double& x : decay) x /= diag;
  }
  return decay;
}

double power_iteration_lambda_max(const OperatorMatrix& op, int max_iterations, double tolerance) {
  const auto n = static_cast<Eigen::Index>(op.size());
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = dist(rng);
  x.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd y = op.normal_product(x);
    const double next = x.dot(y);
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;
    x = y / ny;
    if (it > 0 && std::abs(next - lambda) <= tolerance * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

SpectralEstimates estimate_spectrum(const OperatorMatrix& op, const Eigen::VectorXd& singular_values) {
  if (singular_values.size() == 0 || !(singular_values.maxCoeff() > 0.0)) {
    throw std::runtime_error("operator has empty range");
  }
  const double sigma_max = singular_values.maxCoeff();
  double sigma_min = sigma_max;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    const double s = singular_values(i);
    if (s > 1e-10 * sigma_max) sigma_min = std::min(sigma_min, s);
  }
  const double lambda_max = std::max(power_iteration_lambda_max(op), sigma_max * sigma_max);
  return SpectralEstimates::from_bounds(lambda_max, sigma_min * sigma_min);
}

SpectralEstimates estimate_spectrum(const OperatorMatrix& op) {
  const Eigen::MatrixXd a = op.dense();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  return estimate_spectrum(op, svd.singularValues());
}

}  // namespace framesolve
