#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <vector>

#include "framesolve/coeffs.hpp"
#include "framesolve/piecewise.hpp"
#include "framesolve/wavelets.hpp"

namespace framesolve {

using Point2 = Eigen::Vector2d;
using ScalarField1 = std::function<double(double)>;
using ScalarField2 = std::function<double(const Point2&)>;
using VectorField2 = std::function<Point2(const Point2&)>;

/// Affine parametrization of one subdomain by the reference box.
///
/// In 1D the map is x -> a + L x with L > 0. In 2D it is x -> b + M x with M
/// invertible.
struct Patch {
  int dimension = 1;
  double a = 0.0;
  double length = 1.0;
  Point2 offset = Point2::Zero();
  Eigen::Matrix2d matrix = Eigen::Matrix2d::Identity();

  static Patch interval(double a, double length);
  static Patch affine(const Point2& offset, const Eigen::Matrix2d& matrix);

  [[nodiscard]] double jacobian_determinant() const;
  [[nodiscard]] bool is_axis_aligned() const;
  /// Reference coordinate of a global point (1D).
  [[nodiscard]] double pull_back(double x) const { return (x - a) / length; }
  /// Reference coordinate of a global point (2D).
  [[nodiscard]] Point2 pull_back(const Point2& x) const;
};

/// Factor kinds (x, y) of a tensor-product element kind.
std::pair<Kind, Kind> factor_kinds(Kind kind);

/// Reference tensor-product element at a point of the unit square.
double reference_eval(const ReferenceBasis& basis, int level, std::int64_t translate, Kind kind,
                      const Point2& x);

/// |det grad kappa|^(-1/2) psi(kappa^-1(x)); zero outside the patch image.
double lift_scalar(const Patch& patch, const ReferenceBasis& basis, int level,
                   std::int64_t translate, Kind kind, double x);
double lift_scalar(const Patch& patch, const ReferenceBasis& basis, int level,
                   std::int64_t translate, Kind kind, const Point2& x);

/// grad kappa psi(kappa^-1(x)) / |det grad kappa|^(1/2) for a reference vector
/// field psi. Throws std::domain_error "point outside patch" when kappa^-1(x)
/// leaves the closed unit square.
Point2 lift_piola(const Patch& patch, const VectorField2& reference_field, const Point2& x);

/// One lifted, unweighted frame element as separable piecewise-linear factors.
/// In 1D only `fx` is used.
struct Element {
  FrameIndex index;
  double weight = 1.0;
  PiecewiseLinear fx;
  PiecewiseLinear fy;

  [[nodiscard]] double value(double x) const { return fx.value(x); }
  [[nodiscard]] double value(const Point2& p) const { return fx.value(p.x()) * fy.value(p.y()); }
};

/// Truncated aggregated frame: lifted copies of the reference system on every
/// patch, levels up to `max_level`, with diagonal weights 2^(-s level).
class AggregatedFrame {
 public:
  AggregatedFrame(std::vector<Patch> patches, int max_level, double sobolev_order = 1.0,
                  ReferenceBasis basis = ReferenceBasis{});

  [[nodiscard]] int dimension() const { return dimension_; }
  [[nodiscard]] const std::vector<Patch>& patches() const { return patches_; }
  [[nodiscard]] const ReferenceBasis& basis() const { return basis_; }
  [[nodiscard]] int max_level() const { return max_level_; }
  [[nodiscard]] double sobolev_order() const { return sobolev_order_; }

  /// The truncated index set in FrameIndex order.
  [[nodiscard]] const std::vector<FrameIndex>& indices() const { return indices_; }
  [[nodiscard]] std::size_t size() const { return indices_.size(); }
  [[nodiscard]] bool contains(const FrameIndex& index) const;
  /// Position of `index` in `indices()`; throws std::out_of_range when absent.
  [[nodiscard]] std::size_t position(const FrameIndex& index) const;
  [[nodiscard]] const Element& element(std::size_t position) const { return elements_[position]; }
  [[nodiscard]] const Element& element(const FrameIndex& index) const {
    return elements_[position(index)];
  }
  [[nodiscard]] double weight(const FrameIndex& index) const;
  /// Positions of all elements living on `patch`.
  [[nodiscard]] std::vector<std::size_t> patch_positions(int patch) const;

 private:
  int dimension_;
  std::vector<Patch> patches_;
  int max_level_;
  double sobolev_order_;
  ReferenceBasis basis_;
  std::vector<FrameIndex> indices_;
  std::vector<Element> elements_;
};

/// Two-patch cover of (0, 1) by (0, 2/3) and (1/3, 1).
AggregatedFrame interval_frame(int max_level, double sobolev_order = 1.0);
/// Single-patch (basis) system on (0, 1).
AggregatedFrame single_patch_frame(int max_level, double sobolev_order = 1.0);
/// L-shaped domain (-1,1)^2 \ [0,1)x(-1,0] covered by (-1,0)x(-1,1) and (-1,1)x(0,1).
AggregatedFrame lshape_frame(int max_level, double sobolev_order = 1.0);
bool in_lshape(const Point2& x);

/// Union of the 1D patch images covers [lo, hi] and consecutive patches
/// (sorted by left end) overlap on a set of positive length.
bool covers_interval(const AggregatedFrame& frame, double lo, double hi);
bool consecutive_overlap(const AggregatedFrame& frame);
/// Every sample point of a regular n x n grid inside the domain lies in some patch image.
bool covers_domain(const AggregatedFrame& frame, const std::function<bool(const Point2&)>& inside,
                   const Point2& lo, const Point2& hi, int n);

/// sum_lambda v_lambda w_lambda psi_lambda(x).
double synthesize(const AggregatedFrame& frame, const SparseVector& v, double x);
double synthesize(const AggregatedFrame& frame, const SparseVector& v, const Point2& x);
/// The 1D synthesized function as an exact piecewise-linear object.
PiecewiseLinear synthesize_function(const AggregatedFrame& frame, const SparseVector& v);

/// (w_lambda <f, psi_lambda>)_lambda over the truncated index set.
SparseVector analyze(const AggregatedFrame& frame, const ScalarField1& f);
SparseVector analyze(const AggregatedFrame& frame, const ScalarField2& f);

/// Unweighted moments <f, psi_lambda> for the elements at `positions` (1D).
Eigen::VectorXd moments(const AggregatedFrame& frame, const std::vector<std::size_t>& positions,
                        const ScalarField1& f);

/// Patch-by-patch decomposition u_i = P_i u^(i), u^(i+1) = u^(i) - u_i, with
/// P_i the L2 projection onto the truncated span of patch i (1D).
std::vector<SparseVector> decompose(const AggregatedFrame& frame, const ScalarField1& u);

/// L2 and H1-seminorm distances between a piecewise-linear function and a
/// smooth function on [lo, hi], using `refine` Gauss cells per breakpoint cell.
double l2_distance(const PiecewiseLinear& f, const ScalarField1& u, double lo, double hi,
                   int refine = 2);
double h1_seminorm_distance(const PiecewiseLinear& f, const ScalarField1& du, double lo, double hi,
                            int refine = 2);

/// Frame description: header `levels J sobolev s`, then one `patch a L` (1D)
/// or `patch bx by m11 m12 m21 m22` (2D) line per patch; `#` starts a comment.
AggregatedFrame read_frame(std::istream& is);
void write_frame(std::ostream& os, const AggregatedFrame& frame);

}  // namespace framesolve
