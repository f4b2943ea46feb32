#include "framesolve/coeffs.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace framesolve {

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::Scaling:
      return "scaling";
    case Kind::Wavelet:
      return "wavelet";
    case Kind::ScalingWavelet:
      return "scaling_wavelet";
    case Kind::WaveletScaling:
      return "wavelet_scaling";
    case Kind::WaveletWavelet:
      return "wavelet_wavelet";
  }
  throw std::invalid_argument("unknown kind");
}

Kind kind_from_string(const std::string& name) {
  static const std::array<Kind, 5> kinds = {Kind::Scaling, Kind::Wavelet, Kind::ScalingWavelet,
                                            Kind::WaveletScaling, Kind::WaveletWavelet};
  for (Kind k : kinds) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown kind '" + name + "'");
}

std::int64_t pack_translate(int level, std::int64_t kx, std::int64_t ky) {
  const std::int64_t stride = std::int64_t{1} << (level + 1);
  return kx * stride + ky;
}

std::pair<std::int64_t, std::int64_t> unpack_translate(int level, std::int64_t translate) {
  const std::int64_t stride = std::int64_t{1} << (level + 1);
  return {translate / stride, translate % stride};
}

std::ostream& operator<<(std::ostream& os, const FrameIndex& index) {
  return os << '(' << index.patch << ',' << index.level << ',' << index.translate << ','
            << to_string(index.kind) << ')';
}

namespace {

bool index_less(const SparseVector::Entry& a, const SparseVector::Entry& b) {
  return a.first < b.first;
}

std::vector<SparseVector::Entry> canonicalize(std::vector<SparseVector::Entry> entries) {
  std::stable_sort(entries.begin(), entries.end(), index_less);
  std::vector<SparseVector::Entry> out;
  out.reserve(entries.size());
  for (auto& e : entries) {
    if (!out.empty() && out.back().first == e.first) {
      out.back().second += e.second;
    } else {
      out.push_back(e);
    }
  }
  std::erase_if(out, [](const SparseVector::Entry& e) { return e.second == 0.0; });
  return out;
}

}  // namespace

SparseVector::SparseVector(std::vector<Entry> entries) : entries_(canonicalize(std::move(entries))) {}

SparseVector::SparseVector(std::initializer_list<Entry> entries)
    : entries_(canonicalize(std::vector<Entry>(entries))) {}

SparseVector::SparseVector(const std::map<FrameIndex, double>& entries) {
  entries_.reserve(entries.size());
  for (const auto& [index, value] : entries) {
    if (value != 0.0) entries_.emplace_back(index, value);
  }
}

SparseVector SparseVector::from_sorted(std::vector<Entry> entries) {
  SparseVector v;
  v.entries_ = std::move(entries);
  return v;
}

double SparseVector::operator[](const FrameIndex& index) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{index, 0.0}, index_less);
  if (it != entries_.end() && it->first == index) return it->second;
  return 0.0;
}

bool SparseVector::contains(const FrameIndex& index) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{index, 0.0}, index_less);
  return it != entries_.end() && it->first == index;
}

double SparseVector::squared_norm() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.second * e.second;
  return sum;
}

double SparseVector::norm() const { return std::sqrt(squared_norm()); }

double SparseVector::max_abs() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, std::abs(e.second));
  return m;
}

bool SparseVector::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Entry& e) { return std::isfinite(e.second); });
}

SparseVector SparseVector::scaled(double alpha) const {
  if (alpha == 0.0) return {};
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& [index, value] : entries_) {
    const double scaled_value = alpha * value;
    if (scaled_value != 0.0) out.emplace_back(index, scaled_value);
  }
  return from_sorted(std::move(out));
}

double SparseVector::dot(const SparseVector& other) const {
  double sum = 0.0;
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() && b != other.entries_.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      sum += a->second * b->second;
      ++a;
      ++b;
    }
  }
  return sum;
}

SparsenessParams::SparsenessParams(double s_value) : s(s_value), tau(1.0 / (0.5 + s_value)) {
  if (!(s_value > 0.0)) throw std::invalid_argument("sparseness order s must be positive");
}

SparseVector axpy(double alpha, const SparseVector& x, const SparseVector& y) {
  if (alpha == 0.0) return y;
  std::vector<SparseVector::Entry> out;
  out.reserve(x.size() + y.size());
  auto a = x.begin();
  auto b = y.begin();
  auto push = [&out](const FrameIndex& index, double value) {
    if (value != 0.0) out.emplace_back(index, value);
  };
  while (a != x.end() || b != y.end()) {
    if (b == y.end() || (a != x.end() && a->first < b->first)) {
      push(a->first, alpha * a->second);
      ++a;
    } else if (a == x.end() || b->first < a->first) {
      push(b->first, b->second);
      ++b;
    } else {
      push(a->first, alpha * a->second + b->second);
      ++a;
      ++b;
    }
  }
  return SparseVector::from_sorted(std::move(out));
}

SparseVector operator+(const SparseVector& x, const SparseVector& y) { return axpy(1.0, x, y); }
SparseVector operator-(const SparseVector& x, const SparseVector& y) { return axpy(-1.0, y, x); }

std::vector<SparseVector::Entry> sorted_by_magnitude(const SparseVector& v) {
  std::vector<SparseVector::Entry> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    const double ma = std::abs(a.second);
    const double mb = std::abs(b.second);
    if (ma != mb) return ma > mb;
    return a.first < b.first;
  });
  return sorted;
}

SparseVector best_n_term(const SparseVector& v, std::size_t n) {
  if (n >= v.size()) return v;
  auto sorted = sorted_by_magnitude(v);
  sorted.resize(n);
  return SparseVector(std::move(sorted));
}

SparseVector coarse(double epsilon, const SparseVector& v) {
  if (epsilon <= 0.0) return v;
  auto sorted = sorted_by_magnitude(v);
  // Dropped tail accumulated from the smallest entry upward.
  const double eps_sq = epsilon * epsilon;
  std::size_t keep = sorted.size();
  double tail = 0.0;
  while (keep > 0) {
    const double next = tail + sorted[keep - 1].second * sorted[keep - 1].second;
    if (std::sqrt(next) > epsilon && next > eps_sq) break;
    tail = next;
    --keep;
  }
  sorted.resize(keep);
  return SparseVector(std::move(sorted));
}

double weak_quasinorm(const SparseVector& v, const SparsenessParams& p) {
  const auto sorted = sorted_by_magnitude(v);
  double sup = 0.0;
  for (std::size_t n = 1; n <= sorted.size(); ++n) {
    sup = std::max(sup, std::pow(static_cast<double>(n), 0.5 + p.s) * std::abs(sorted[n - 1].second));
  }
  return sup;
}

double best_n_term_error_norm(const SparseVector& v, double s) {
  const auto sorted = sorted_by_magnitude(v);
  const std::size_t m = sorted.size();
  std::vector<double> tail(m + 1, 0.0);
  for (std::size_t n = m; n-- > 0;) tail[n] = tail[n + 1] + sorted[n].second * sorted[n].second;
  double sup = 0.0;
  for (std::size_t n = 0; n < m; ++n) {
    const double factor = n == 0 ? 1.0 : std::pow(static_cast<double>(n), s);
    sup = std::max(sup, factor * std::sqrt(tail[n]));
  }
  return sup;
}

std::string format_double(double value) {
  std::array<char, 64> buffer{};
  auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc()) throw std::runtime_error("failed to format double");
  return std::string(buffer.data(), ptr);
}

void write_sparse_vector(std::ostream& os, const SparseVector& v) {
  for (const auto& [index, value] : v) {
    os << index.patch << ' ' << index.level << ' ' << index.translate << ' '
       << to_string(index.kind) << ' ' << format_double(value) << '\n';
  }
}

SparseVector read_sparse_vector(std::istream& is) {
  std::vector<SparseVector::Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream fields(line);
    FrameIndex index;
    std::string kind;
    std::string value_text;
    if (!(fields >> index.patch >> index.level >> index.translate >> kind >> value_text)) {
      throw std::invalid_argument("malformed coefficient line " + std::to_string(line_no));
    }
    index.kind = kind_from_string(kind);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (ec != std::errc() || ptr != value_text.data() + value_text.size()) {
      throw std::invalid_argument("malformed value on coefficient line " + std::to_string(line_no));
    }
    entries.emplace_back(index, value);
  }
  return SparseVector(std::move(entries));
}

}  // namespace framesolve
