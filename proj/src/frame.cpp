#include "framesolve/frame.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "framesolve/oracle.hpp"

namespace framesolve {

Patch Patch::interval(double a, double length) {
  if (!(length > 0.0)) throw std::invalid_argument("patch length must be positive");
  Patch p;
  p.dimension = 1;
  p.a = a;
  p.length = length;
  return p;
}

Patch Patch::affine(const Point2& offset, const Eigen::Matrix2d& matrix) {
  if (matrix.determinant() == 0.0) throw std::invalid_argument("patch map must be invertible");
  Patch p;
  p.dimension = 2;
  p.offset = offset;
  p.matrix = matrix;
  return p;
}

double Patch::jacobian_determinant() const {
  return dimension == 1 ? length : matrix.determinant();
}

bool Patch::is_axis_aligned() const {
  return dimension == 1 || (matrix(0, 1) == 0.0 && matrix(1, 0) == 0.0);
}

Point2 Patch::pull_back(const Point2& x) const { return matrix.lu().solve(x - offset); }

std::pair<Kind, Kind> factor_kinds(Kind kind) {
  switch (kind) {
    case Kind::Scaling:
      return {Kind::Scaling, Kind::Scaling};
    case Kind::ScalingWavelet:
      return {Kind::Scaling, Kind::Wavelet};
    case Kind::WaveletScaling:
      return {Kind::Wavelet, Kind::Scaling};
    case Kind::WaveletWavelet:
      return {Kind::Wavelet, Kind::Wavelet};
    case Kind::Wavelet:
      break;
  }
  throw std::invalid_argument("kind 'wavelet' has no tensor-product factors");
}

double reference_eval(const ReferenceBasis& basis, int level, std::int64_t translate, Kind kind,
                      const Point2& x) {
  const auto [kx, ky] = unpack_translate(level, translate);
  const auto [fx, fy] = factor_kinds(kind);
  return basis.eval(level, kx, fx, x.x()) * basis.eval(level, ky, fy, x.y());
}

double lift_scalar(const Patch& patch, const ReferenceBasis& basis, int level,
                   std::int64_t translate, Kind kind, double x) {
  if (patch.dimension != 1) throw std::invalid_argument("1D lift needs a 1D patch");
  const double t = patch.pull_back(x);
  if (t < 0.0 || t > 1.0) return 0.0;
  return basis.eval(level, translate, kind, t) / std::sqrt(std::abs(patch.length));
}

double lift_scalar(const Patch& patch, const ReferenceBasis& basis, int level,
                   std::int64_t translate, Kind kind, const Point2& x) {
  if (patch.dimension != 2) throw std::invalid_argument("2D lift needs a 2D patch");
  const Point2 t = patch.pull_back(x);
  if (t.x() < 0.0 || t.x() > 1.0 || t.y() < 0.0 || t.y() > 1.0) return 0.0;
  return reference_eval(basis, level, translate, kind, t) /
         std::sqrt(std::abs(patch.jacobian_determinant()));
}

Point2 lift_piola(const Patch& patch, const VectorField2& reference_field, const Point2& x) {
  if (patch.dimension != 2) throw std::invalid_argument("Piola lift needs a 2D patch");
  const Point2 t = patch.pull_back(x);
  const double slack = 1e-12;
  if (t.x() < -slack || t.x() > 1.0 + slack || t.y() < -slack || t.y() > 1.0 + slack) {
    throw std::domain_error("point outside patch");
  }
  return patch.matrix * reference_field(t) / std::sqrt(std::abs(patch.jacobian_determinant()));
}

namespace {

Element make_element(const Patch& patch, const ReferenceBasis& basis, const FrameIndex& index,
                     double weight) {
  Element e;
  e.index = index;
  e.weight = weight;
  if (patch.dimension == 1) {
    e.fx = basis.shape(index.level, index.translate, index.kind)
               .transformed(patch.a, patch.length, 1.0 / std::sqrt(patch.length));
    return e;
  }
  const auto [kx, ky] = unpack_translate(index.level, index.translate);
  const auto [kindx, kindy] = factor_kinds(index.kind);
  const double mx = patch.matrix(0, 0);
  const double my = patch.matrix(1, 1);
  e.fx = basis.shape(index.level, kx, kindx)
             .transformed(patch.offset.x(), mx, 1.0 / std::sqrt(std::abs(mx)));
  e.fy = basis.shape(index.level, ky, kindy)
             .transformed(patch.offset.y(), my, 1.0 / std::sqrt(std::abs(my)));
  return e;
}

void enumerate_1d(const ReferenceBasis& basis, int patch, int max_level,
                  std::vector<FrameIndex>& out) {
  const int j0 = basis.coarsest_level();
  for (std::int64_t k = 1; k <= basis.count(j0, Kind::Scaling); ++k) {
    out.push_back({patch, j0, k, Kind::Scaling});
  }
  for (int j = j0; j < max_level; ++j) {
    for (std::int64_t k = 0; k < basis.count(j, Kind::Wavelet); ++k) {
      out.push_back({patch, j, k, Kind::Wavelet});
    }
  }
}

void enumerate_2d(const ReferenceBasis& basis, int patch, int max_level,
                  std::vector<FrameIndex>& out) {
  const int j0 = basis.coarsest_level();
  const std::int64_t n0 = basis.count(j0, Kind::Scaling);
  for (std::int64_t kx = 1; kx <= n0; ++kx) {
    for (std::int64_t ky = 1; ky <= n0; ++ky) {
      out.push_back({patch, j0, pack_translate(j0, kx, ky), Kind::Scaling});
    }
  }
  for (int j = j0; j < max_level; ++j) {
    const std::int64_t ns = basis.count(j, Kind::Scaling);
    const std::int64_t nw = basis.count(j, Kind::Wavelet);
    for (std::int64_t kx = 1; kx <= ns; ++kx) {
      for (std::int64_t ky = 0; ky < nw; ++ky) {
        out.push_back({patch, j, pack_translate(j, kx, ky), Kind::ScalingWavelet});
      }
    }
    for (std::int64_t kx = 0; kx < nw; ++kx) {
      for (std::int64_t ky = 1; ky <= ns; ++ky) {
        out.push_back({patch, j, pack_translate(j, kx, ky), Kind::WaveletScaling});
      }
    }
    for (std::int64_t kx = 0; kx < nw; ++kx) {
      for (std::int64_t ky = 0; ky < nw; ++ky) {
        out.push_back({patch, j, pack_translate(j, kx, ky), Kind::WaveletWavelet});
      }
    }
  }
}

}  // namespace

AggregatedFrame::AggregatedFrame(std::vector<Patch> patches, int max_level, double sobolev_order,
                                 ReferenceBasis basis)
    : patches_(std::move(patches)),
      max_level_(max_level),
      sobolev_order_(sobolev_order),
      basis_(basis) {
  if (patches_.empty()) throw std::invalid_argument("frame needs at least one patch");
  if (max_level < basis_.coarsest_level()) {
    throw std::invalid_argument("max level below the coarsest level");
  }
  if (max_level > 24) throw std::invalid_argument("max level too large");
  if (!(sobolev_order >= 0.0)) throw std::invalid_argument("sobolev order must be nonnegative");
  dimension_ = patches_.front().dimension;
  for (std::size_t i = 0; i < patches_.size(); ++i) {
    const Patch& p = patches_[i];
    if (p.dimension != dimension_) throw std::invalid_argument("patches of mixed dimension");
    if (dimension_ == 2 && !p.is_axis_aligned()) {
      throw std::invalid_argument("2D frames require axis-aligned patch maps");
    }
    if (dimension_ == 1) {
      enumerate_1d(basis_, static_cast<int>(i), max_level_, indices_);
    } else {
      enumerate_2d(basis_, static_cast<int>(i), max_level_, indices_);
    }
  }
  std::sort(indices_.begin(), indices_.end());
  elements_.reserve(indices_.size());
  for (const FrameIndex& index : indices_) {
    elements_.push_back(make_element(patches_[static_cast<std::size_t>(index.patch)], basis_, index,
                                     preconditioner_weight(sobolev_order_, index.level)));
  }
}

bool AggregatedFrame::contains(const FrameIndex& index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

std::size_t AggregatedFrame::position(const FrameIndex& index) const {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), index);
  if (it == indices_.end() || *it != index) {
    std::ostringstream msg;
    msg << "index " << index << " outside the truncated index set";
    throw std::out_of_range(msg.str());
  }
  return static_cast<std::size_t>(it - indices_.begin());
}

double AggregatedFrame::weight(const FrameIndex& index) const { return element(index).weight; }

std::vector<std::size_t> AggregatedFrame::patch_positions(int patch) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (patch < 0 || indices_[i].patch == patch) out.push_back(i);
  }
  return out;
}

AggregatedFrame interval_frame(int max_level, double sobolev_order) {
  return AggregatedFrame({Patch::interval(0.0, 2.0 / 3.0), Patch::interval(1.0 / 3.0, 2.0 / 3.0)},
                         max_level, sobolev_order);
}

AggregatedFrame single_patch_frame(int max_level, double sobolev_order) {
  return AggregatedFrame({Patch::interval(0.0, 1.0)}, max_level, sobolev_order);
}

AggregatedFrame lshape_frame(int max_level, double sobolev_order) {
  Eigen::Matrix2d m1;
  m1 << 1.0, 0.0, 0.0, 2.0;
  Eigen::Matrix2d m2;
  m2 << 2.0, 0.0, 0.0, 1.0;
  return AggregatedFrame(
      {Patch::affine(Point2(-1.0, -1.0), m1), Patch::affine(Point2(-1.0, 0.0), m2)}, max_level,
      sobolev_order);
}

bool in_lshape(const Point2& x) {
  const bool in_square = x.x() > -1.0 && x.x() < 1.0 && x.y() > -1.0 && x.y() < 1.0;
  const bool in_notch = x.x() >= 0.0 && x.y() <= 0.0;
  return in_square && !in_notch;
}

namespace {

std::vector<std::pair<double, double>> sorted_images(const AggregatedFrame& frame) {
  if (frame.dimension() != 1) throw std::invalid_argument("interval checks need a 1D frame");
  std::vector<std::pair<double, double>> images;
  for (const Patch& p : frame.patches()) images.emplace_back(p.a, p.a + p.length);
  std::sort(images.begin(), images.end());
  return images;
}

}  // namespace

bool covers_interval(const AggregatedFrame& frame, double lo, double hi) {
  const auto images = sorted_images(frame);
  double reach = lo;
  for (const auto& [a, b] : images) {
    if (a > reach) return false;
    reach = std::max(reach, b);
  }
  return reach >= hi;
}

bool consecutive_overlap(const AggregatedFrame& frame) {
  const auto images = sorted_images(frame);
  for (std::size_t i = 0; i + 1 < images.size(); ++i) {
    if (!(images[i].second > images[i + 1].first)) return false;
  }
  return true;
}

bool covers_domain(const AggregatedFrame& frame, const std::function<bool(const Point2&)>& inside,
                   const Point2& lo, const Point2& hi, int n) {
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const Point2 x(lo.x() + (hi.x() - lo.x()) * (i + 0.5) / n,
                     lo.y() + (hi.y() - lo.y()) * (k + 0.5) / n);
      if (!inside(x)) continue;
      const bool hit = std::any_of(frame.patches().begin(), frame.patches().end(), [&](const Patch& p) {
        const Point2 t = p.pull_back(x);
        return t.x() > 0.0 && t.x() < 1.0 && t.y() > 0.0 && t.y() < 1.0;
      });
      if (!hit) return false;
    }
  }
  return true;
}

double synthesize(const AggregatedFrame& frame, const SparseVector& v, double x) {
  if (frame.dimension() != 1) throw std::invalid_argument("1D synthesis needs a 1D frame");
  double sum = 0.0;
  for (const auto& [index, value] : v) {
    const Element& e = frame.element(index);
    sum += value * e.weight * e.value(x);
  }
  return sum;
}

double synthesize(const AggregatedFrame& frame, const SparseVector& v, const Point2& x) {
  if (frame.dimension() != 2) throw std::invalid_argument("2D synthesis needs a 2D frame");
  double sum = 0.0;
  for (const auto& [index, value] : v) {
    const Element& e = frame.element(index);
    sum += value * e.weight * e.value(x);
  }
  return sum;
}

PiecewiseLinear synthesize_function(const AggregatedFrame& frame, const SparseVector& v) {
  if (frame.dimension() != 1) throw std::invalid_argument("1D synthesis needs a 1D frame");
  std::vector<std::pair<double, const PiecewiseLinear*>> terms;
  terms.reserve(v.size());
  for (const auto& [index, value] : v) {
    const Element& e = frame.element(index);
    terms.emplace_back(value * e.weight, &e.fx);
  }
  return sum(terms);
}

namespace {

/// Finest grid spacing of the truncated frame in global coordinates.
double finest_spacing(const AggregatedFrame& frame) {
  double finest = std::numeric_limits<double>::infinity();
  for (const Patch& p : frame.patches()) {
    finest = std::min(finest, std::abs(p.length) * std::exp2(-frame.max_level()));
  }
  return finest;
}

}  // namespace

SparseVector analyze(const AggregatedFrame& frame, const ScalarField1& f) {
  if (frame.dimension() != 1) throw std::invalid_argument("1D analysis needs a 1D frame");
  std::vector<SparseVector::Entry> out;
  out.reserve(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const Element& e = frame.element(i);
    const double value = e.weight * integrate_against(f, e.fx, 0, finest_spacing(frame));
    if (value != 0.0) out.emplace_back(e.index, value);
  }
  return SparseVector::from_sorted(std::move(out));
}

SparseVector analyze(const AggregatedFrame& frame, const ScalarField2& f) {
  if (frame.dimension() != 2) throw std::invalid_argument("2D analysis needs a 2D frame");
  std::vector<SparseVector::Entry> out;
  out.reserve(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const Element& e = frame.element(i);
    double total = 0.0;
    for (std::size_t cx = 0; cx + 1 < e.fx.x.size(); ++cx) {
      for (std::size_t cy = 0; cy + 1 < e.fy.x.size(); ++cy) {
        const double ax = e.fx.x[cx];
        const double bx = e.fx.x[cx + 1];
        const double ay = e.fy.x[cy];
        const double by = e.fy.x[cy + 1];
        double cell = 0.0;
        for (std::size_t p = 0; p < 4; ++p) {
          const double x = 0.5 * (ax + bx) + 0.5 * (bx - ax) * GaussLegendre4::nodes[p];
          const double vx = e.fx.value(x);
          for (std::size_t q = 0; q < 4; ++q) {
            const double y = 0.5 * (ay + by) + 0.5 * (by - ay) * GaussLegendre4::nodes[q];
            cell += GaussLegendre4::weights[p] * GaussLegendre4::weights[q] * f(Point2(x, y)) * vx *
                    e.fy.value(y);
          }
        }
        total += 0.25 * (bx - ax) * (by - ay) * cell;
      }
    }
    const double value = e.weight * total;
    if (value != 0.0) out.emplace_back(e.index, value);
  }
  return SparseVector::from_sorted(std::move(out));
}

Eigen::VectorXd moments(const AggregatedFrame& frame, const std::vector<std::size_t>& positions,
                        const ScalarField1& f) {
  Eigen::VectorXd b(static_cast<Eigen::Index>(positions.size()));
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Element& e = frame.element(positions[i]);
    b(static_cast<Eigen::Index>(i)) = integrate_against(f, e.fx, 0, finest_spacing(frame));
  }
  return b;
}

std::vector<SparseVector> decompose(const AggregatedFrame& frame, const ScalarField1& u) {
  if (frame.dimension() != 1) throw std::invalid_argument("decompose needs a 1D frame");
  const int patches = static_cast<int>(frame.patches().size());
  std::vector<SparseVector> parts;
  std::vector<std::vector<std::size_t>> positions;
  std::vector<Eigen::VectorXd> unweighted;
  for (int i = 0; i < patches; ++i) {
    positions.push_back(frame.patch_positions(i));
    Eigen::VectorXd b = moments(frame, positions.back(), u);
    for (int k = 0; k < i; ++k) {
      b -= cross_gram(frame, positions.back(), positions[static_cast<std::size_t>(k)]) *
           unweighted[static_cast<std::size_t>(k)];
    }
    Eigen::VectorXd d = gram_solve(gram_matrix(frame, positions.back()), b);
    unweighted.push_back(d);
    parts.push_back(to_weighted_coefficients(frame, positions.back(), d));
  }
  return parts;
}

namespace {

template <typename Integrand>
double refined_integral(const PiecewiseLinear& f, double lo, double hi, int refine, Integrand g) {
  std::vector<double> breaks{lo, hi};
  for (double t : f.x) {
    if (t > lo && t < hi) breaks.push_back(t);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
    const double step = (breaks[c + 1] - breaks[c]) / refine;
    for (int r = 0; r < refine; ++r) {
      const double a = breaks[c] + r * step;
      const double slope = f.derivative(a + 0.5 * step);
      total += gauss_legendre4([&](double t) { return g(t, slope); }, a, a + step);
    }
  }
  return total;
}

}  // namespace

double l2_distance(const PiecewiseLinear& f, const ScalarField1& u, double lo, double hi,
                   int refine) {
  const double sq = refined_integral(f, lo, hi, refine, [&](double t, double) {
    const double d = f.value(t) - u(t);
    return d * d;
  });
  return std::sqrt(sq);
}

double h1_seminorm_distance(const PiecewiseLinear& f, const ScalarField1& du, double lo, double hi,
                            int refine) {
  const double sq = refined_integral(f, lo, hi, refine, [&](double t, double slope) {
    const double d = slope - du(t);
    return d * d;
  });
  return std::sqrt(sq);
}

AggregatedFrame read_frame(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  int levels = -1;
  double sobolev = 1.0;
  std::vector<Patch> patches;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string keyword;
    if (!(fields >> keyword)) continue;
    const std::string where = " on frame line " + std::to_string(line_no);
    if (keyword == "levels") {
      std::string sob;
      if (!(fields >> levels >> sob >> sobolev) || sob != "sobolev") {
        throw std::invalid_argument("expected 'levels J sobolev s'" + where);
      }
    } else if (keyword == "patch") {
      std::vector<double> values;
      double v = 0.0;
      while (fields >> v) values.push_back(v);
      if (!fields.eof()) throw std::invalid_argument("malformed number" + where);
      if (values.size() == 2) {
        patches.push_back(Patch::interval(values[0], values[1]));
      } else if (values.size() == 6) {
        Eigen::Matrix2d m;
        m << values[2], values[3], values[4], values[5];
        patches.push_back(Patch::affine(Point2(values[0], values[1]), m));
      } else {
        throw std::invalid_argument("patch needs 2 or 6 numbers" + where);
      }
    } else {
      throw std::invalid_argument("unknown keyword '" + keyword + "'" + where);
    }
  }
  if (levels < 0) throw std::invalid_argument("frame file lacks a 'levels' header");
  return AggregatedFrame(std::move(patches), levels, sobolev);
}

void write_frame(std::ostream& os, const AggregatedFrame& frame) {
  os << "levels " << frame.max_level() << " sobolev " << format_double(frame.sobolev_order()) << '\n';
  for (const Patch& p : frame.patches()) {
    if (p.dimension == 1) {
      os << "patch " << format_double(p.a) << ' ' << format_double(p.length) << '\n';
    } else {
      os << "patch " << format_double(p.offset.x()) << ' ' << format_double(p.offset.y()) << ' '
         << format_double(p.matrix(0, 0)) << ' ' << format_double(p.matrix(0, 1)) << ' '
         << format_double(p.matrix(1, 0)) << ' ' << format_double(p.matrix(1, 1)) << '\n';
    }
  }
}

}  // namespace framesolve
