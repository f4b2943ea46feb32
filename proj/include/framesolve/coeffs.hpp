#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace framesolve {

/// Shape of a frame element. One-dimensional elements are either the coarse
/// scaling hat or a wavelet; tensor-product (2D) elements combine the two
/// factor kinds, x-factor first.
enum class Kind : std::uint8_t {
  Scaling = 0,         // 1D: scaling hat; 2D: scaling x scaling
  Wavelet = 1,         // 1D only
  ScalingWavelet = 2,  // 2D: scaling(x) * wavelet(y)
  WaveletScaling = 3,  // 2D: wavelet(x) * scaling(y)
  WaveletWavelet = 4,  // 2D: wavelet(x) * wavelet(y)
};

std::string to_string(Kind kind);
Kind kind_from_string(const std::string& name);

/// Address of one frame element (patch, level, translate, kind).
///
/// For 2D elements the translate packs the two factor translates as
/// `kx * 2^(level+1) + ky`; see `pack_translate`.
struct FrameIndex {
  int patch = 0;
  int level = 0;
  std::int64_t translate = 0;
  Kind kind = Kind::Scaling;

  friend auto operator<=>(const FrameIndex&, const FrameIndex&) = default;
};

std::int64_t pack_translate(int level, std::int64_t kx, std::int64_t ky);
std::pair<std::int64_t, std::int64_t> unpack_translate(int level, std::int64_t translate);

std::ostream& operator<<(std::ostream& os, const FrameIndex& index);

/// Finitely supported coefficient vector over frame indices.
///
/// Entries are kept sorted by index and never store an exact zero.
class SparseVector {
 public:
  using Entry = std::pair<FrameIndex, double>;

  SparseVector() = default;
  /// Sums duplicate indices and drops exact zeros.
  explicit SparseVector(std::vector<Entry> entries);
  SparseVector(std::initializer_list<Entry> entries);
  explicit SparseVector(const std::map<FrameIndex, double>& entries);

  /// Entries must already be strictly sorted and nonzero.
  static SparseVector from_sorted(std::vector<Entry> entries);

  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] bool empty() const { return entries_.empty(); }
  [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }
  [[nodiscard]] auto begin() const { return entries_.begin(); }
  [[nodiscard]] auto end() const { return entries_.end(); }

  /// Value at `index`, zero when not stored.
  [[nodiscard]] double operator[](const FrameIndex& index) const;
  [[nodiscard]] bool contains(const FrameIndex& index) const;

  [[nodiscard]] double norm() const;
  [[nodiscard]] double squared_norm() const;
  [[nodiscard]] double max_abs() const;
  [[nodiscard]] bool all_finite() const;

  [[nodiscard]] SparseVector scaled(double alpha) const;
  [[nodiscard]] double dot(const SparseVector& other) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<Entry> entries_;
};

/// Sparseness class parameters with tau = 1 / (1/2 + s).
struct SparsenessParams {
  double s;
  double tau;

  explicit SparsenessParams(double s_value);
};

/// alpha * x + y.
SparseVector axpy(double alpha, const SparseVector& x, const SparseVector& y);
SparseVector operator+(const SparseVector& x, const SparseVector& y);
SparseVector operator-(const SparseVector& x, const SparseVector& y);

/// Entries sorted by decreasing modulus, ties resolved by smaller index first.
std::vector<SparseVector::Entry> sorted_by_magnitude(const SparseVector& v);

/// The n entries of largest modulus.
SparseVector best_n_term(const SparseVector& v, std::size_t n);

/// Shortest magnitude-sorted prefix w of v with ||v - w|| <= epsilon.
SparseVector coarse(double epsilon, const SparseVector& v);

/// sup_n n^(1/2 + s) |gamma_n(v)| over the decreasing rearrangement.
double weak_quasinorm(const SparseVector& v, const SparsenessParams& p);

/// sup over N of N^s ||v - best_n_term(v, N)||, N = 0 .. #supp(v) - 1.
double best_n_term_error_norm(const SparseVector& v, double s);

/// Plain-text serialization: one `patch level translate kind value` line per
/// entry, sorted by index, values in shortest round-trip decimal.
void write_sparse_vector(std::ostream& os, const SparseVector& v);
SparseVector read_sparse_vector(std::istream& is);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace framesolve
