#pragma once

#include "orlicz/common.hpp"

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace orlicz::geometry {

struct Box {
  Vector lo, hi;  // strict lo < hi per axis
};

struct Ball {
  Vector center;
  double radius = 0.0;
};

using Piece = std::variant<Box, Ball>;

// A finite-measure open region, the union of axis-aligned boxes and balls.
// Pieces may overlap; all queries refer to the union.
class Domain {
 public:
  Domain(int dim, std::vector<Piece> pieces);

  int dim() const { return dim_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

  bool contains(const Vector& x) const;

  // Bounding box of the union.
  const Vector& bbox_lo() const { return lo_; }
  const Vector& bbox_hi() const { return hi_; }

  // Exact when the pieces are pairwise disjoint; otherwise grid counting
  // with one Richardson round at the given resolution.
  double measure(int resolution = 256) const;

  // Measure by counting cell centers at exactly this resolution.
  double measure_by_counting(int resolution) const;

  Domain translated(const Vector& shift) const;

  bool is_single_ball() const;

  // max |y - x| over the closure (analytic per piece).
  double circumradius_about(const Vector& x) const;

 private:
  int dim_;
  std::vector<Piece> pieces_;
  Vector lo_, hi_;
  bool pairwise_disjoint_;
};

Domain make_interval(double a, double b);                  // 1D box
Domain make_box(const Vector& lo, const Vector& hi);
Domain make_ball(const Vector& center, double radius);

// Origin-centered ball with the same measure; throws EmptyDomainError when
// the measure vanishes.
Ball symmetrized_set(const Domain& D, int resolution = 256);

// Distance from an interior point to the boundary of the union. Per-piece
// nearest boundary points that fall inside another piece are rejected; the
// fallback then samples piece boundaries densely, which is exact in 1D and
// accurate to the sampling pitch (recorded below) otherwise.
double distance_to_boundary(const Domain& D, const Vector& x);

// Sampling pitch of the boundary fallback relative to the piece size.
inline constexpr int kBoundarySamplesPerPiece = 4096;

struct InscribedBall {
  Vector center;
  double radius = 0.0;
};

// Grid argmax of distance_to_boundary over cell centers, radius shrunk by
// one cell width. Throws TooCoarseError when the result is under 4 cell
// widths: downstream bump constructions need resolvable radii.
InscribedBall inscribed_ball(const Domain& D, int resolution = 256);

// |D1 delta D2| by counting cell centers over the joint bounding box.
double symmetric_difference_measure(const Domain& D1, const Domain& D2,
                                    int resolution = 512);

// Cell-centered samples of a nonnegative function on a uniform grid over
// an axis-aligned box, the discrete stand-in for compactly supported u.
// Values on cells whose centers fall outside the support domain are zeroed
// at construction. Cell index is lexicographic, axis 0 most significant.
class GridFunction {
 public:
  GridFunction(const Domain& support, Vector box_lo, Vector box_hi,
               int cells_per_axis, Array values);

  static GridFunction sample(const Domain& support, const Vector& box_lo,
                             const Vector& box_hi, int cells_per_axis,
                             const std::function<double(const Vector&)>& f);

  int dim() const { return dim_; }
  int cells_per_axis() const { return n_; }
  Eigen::Index size() const { return values_.size(); }
  const Array& values() const { return values_; }
  const Vector& box_lo() const { return lo_; }
  const Vector& box_hi() const { return hi_; }
  const Domain& support() const { return support_; }

  Vector cell_widths() const;
  double cell_volume() const;
  Vector center(Eigen::Index flat_index) const;

  // 0 outside the box; piecewise constant inside.
  double value_at(const Vector& x) const;

  GridFunction translated(const Vector& shift) const;

  // Replaces the value array; the support-zeroing rule is re-applied.
  GridFunction with_values(Array values) const;

 private:
  int dim_;
  Vector lo_, hi_;
  int n_;
  Array values_;
  Domain support_;
};

// Discrete Schwarz rearrangement: values sorted descending are assigned to
// the cells of a fresh origin-centered grid of identical cell volume,
// sorted by center distance (ties by lexicographic index). The positive
// value multiset is preserved exactly; the result is radially nonincreasing
// along that cell order.
GridFunction schwarz_rearrange(const GridFunction& u);

}  // namespace orlicz::geometry
