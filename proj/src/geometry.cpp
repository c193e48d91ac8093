#include "orlicz/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace orlicz::geometry {

namespace {

double box_volume(const Box& b) {
  return (b.hi - b.lo).prod();
}

double ball_volume(const Ball& b, int dim) {
  return unit_ball_volume(dim) * std::pow(b.radius, dim);
}

// Signed inside-depth: positive inside the piece, negative outside.
double inside_depth(const Piece& piece, const Vector& x) {
  if (const Box* b = std::get_if<Box>(&piece)) {
    double depth = std::numeric_limits<double>::infinity();
    bool inside = true;
    double outside_sq = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const double lo = x[k] - b->lo[k], hi = b->hi[k] - x[k];
      if (lo < 0.0 || hi < 0.0) {
        inside = false;
        const double d = std::max(-lo, -hi);
        outside_sq += d * d;
      } else {
        depth = std::min(depth, std::min(lo, hi));
      }
    }
    return inside ? depth : -std::sqrt(outside_sq);
  }
  const Ball& b = std::get<Ball>(piece);
  return b.radius - (x - b.center).norm();
}

bool piece_contains(const Piece& piece, const Vector& x) {
  return inside_depth(piece, x) > 0.0;
}

// Nearest point of the piece's own boundary.
Vector nearest_boundary_point(const Piece& piece, const Vector& x) {
  if (const Box* b = std::get_if<Box>(&piece)) {
    Vector p = x.cwiseMax(b->lo).cwiseMin(b->hi);
    if ((p - x).squaredNorm() > 0.0) return p;  // x outside: clamped point
    // Inside: push to the closest face.
    int axis = 0;
    double best = std::numeric_limits<double>::infinity();
    double target = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      if (x[k] - b->lo[k] < best) {
        best = x[k] - b->lo[k];
        axis = int(k);
        target = b->lo[k];
      }
      if (b->hi[k] - x[k] < best) {
        best = b->hi[k] - x[k];
        axis = int(k);
        target = b->hi[k];
      }
    }
    p[axis] = target;
    return p;
  }
  const Ball& b = std::get<Ball>(piece);
  Vector dir = x - b.center;
  const double norm = dir.norm();
  if (norm == 0.0) {
    dir = Vector::Zero(x.size());
    dir[0] = 1.0;
  } else {
    dir /= norm;
  }
  return b.center + b.radius * dir;
}

bool pieces_overlap(const Piece& a, const Piece& b) {
  if (const Box* ba = std::get_if<Box>(&a)) {
    if (const Box* bb = std::get_if<Box>(&b)) {
      for (Eigen::Index k = 0; k < ba->lo.size(); ++k)
        if (ba->lo[k] >= bb->hi[k] || bb->lo[k] >= ba->hi[k]) return false;
      return true;
    }
    const Ball& ball = std::get<Ball>(b);
    const Vector p = ball.center.cwiseMax(ba->lo).cwiseMin(ba->hi);
    return (p - ball.center).norm() < ball.radius;
  }
  if (std::holds_alternative<Box>(b)) return pieces_overlap(b, a);
  const Ball& x = std::get<Ball>(a);
  const Ball& y = std::get<Ball>(b);
  return (x.center - y.center).norm() < x.radius + y.radius;
}

}  // namespace

Domain::Domain(int dim, std::vector<Piece> pieces)
    : dim_(dim), pieces_(std::move(pieces)) {
  if (dim_ < 1) throw Error("Domain: dim must be >= 1");
  if (pieces_.empty()) throw EmptyDomainError("Domain: no pieces");
  lo_ = Vector::Constant(dim_, std::numeric_limits<double>::infinity());
  hi_ = -lo_;
  for (const Piece& piece : pieces_) {
    if (const Box* b = std::get_if<Box>(&piece)) {
      if (b->lo.size() != dim_ || b->hi.size() != dim_)
        throw Error("Domain: box dimension mismatch");
      if (!((b->hi - b->lo).minCoeff() > 0.0))
        throw Error("Domain: box needs lo < hi on every axis");
      lo_ = lo_.cwiseMin(b->lo);
      hi_ = hi_.cwiseMax(b->hi);
    } else {
      const Ball& ball = std::get<Ball>(piece);
      if (ball.center.size() != dim_) throw Error("Domain: ball dim mismatch");
      if (!(ball.radius > 0.0)) throw Error("Domain: ball needs radius > 0");
      lo_ = lo_.cwiseMin(Vector(ball.center.array() - ball.radius));
      hi_ = hi_.cwiseMax(Vector(ball.center.array() + ball.radius));
    }
  }
  pairwise_disjoint_ = true;
  for (std::size_t i = 0; i < pieces_.size() && pairwise_disjoint_; ++i)
    for (std::size_t j = i + 1; j < pieces_.size(); ++j)
      if (pieces_overlap(pieces_[i], pieces_[j])) {
        pairwise_disjoint_ = false;
        break;
      }
}

bool Domain::contains(const Vector& x) const {
  for (const Piece& piece : pieces_)
    if (piece_contains(piece, x)) return true;
  return false;
}

double Domain::measure_by_counting(int resolution) const {
  if (resolution < 2) throw Error("measure_by_counting: resolution >= 2");
  const Vector widths = (hi_ - lo_) / double(resolution);
  const double cell_vol = widths.prod();
  std::vector<int> idx(dim_, 0);
  Vector x(dim_);
  long count = 0;
  const long total = std::lround(std::pow(double(resolution), dim_));
  for (long flat = 0; flat < total; ++flat) {
    long rest = flat;
    for (int k = dim_ - 1; k >= 0; --k) {
      idx[k] = int(rest % resolution);
      rest /= resolution;
    }
    for (int k = 0; k < dim_; ++k)
      x[k] = lo_[k] + (idx[k] + 0.5) * widths[k];
    if (contains(x)) ++count;
  }
  return count * cell_vol;
}

double Domain::measure(int resolution) const {
  if (pairwise_disjoint_) {
    double total = 0.0;
    for (const Piece& piece : pieces_) {
      if (const Box* b = std::get_if<Box>(&piece))
        total += box_volume(*b);
      else
        total += ball_volume(std::get<Ball>(piece), dim_);
    }
    return total;
  }
  // First-order Richardson on the O(h) boundary error of cell counting.
  const double coarse = measure_by_counting(resolution);
  const double fine = measure_by_counting(2 * resolution);
  return 2.0 * fine - coarse;
}

Domain Domain::translated(const Vector& shift) const {
  std::vector<Piece> moved = pieces_;
  for (Piece& piece : moved) {
    if (Box* b = std::get_if<Box>(&piece)) {
      b->lo += shift;
      b->hi += shift;
    } else {
      std::get<Ball>(piece).center += shift;
    }
  }
  return Domain(dim_, std::move(moved));
}

bool Domain::is_single_ball() const {
  return pieces_.size() == 1 && std::holds_alternative<Ball>(pieces_[0]);
}

double Domain::circumradius_about(const Vector& x) const {
  double r = 0.0;
  for (const Piece& piece : pieces_) {
    if (const Box* b = std::get_if<Box>(&piece)) {
      // The farthest box point from x is a corner; per axis independently.
      double sq = 0.0;
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double d =
            std::max(std::abs(b->lo[k] - x[k]), std::abs(b->hi[k] - x[k]));
        sq += d * d;
      }
      r = std::max(r, std::sqrt(sq));
    } else {
      const Ball& ball = std::get<Ball>(piece);
      r = std::max(r, (ball.center - x).norm() + ball.radius);
    }
  }
  return r;
}

Domain make_interval(double a, double b) {
  Vector lo(1), hi(1);
  lo << a;
  hi << b;
  return Domain(1, {Box{lo, hi}});
}

Domain make_box(const Vector& lo, const Vector& hi) {
  return Domain(int(lo.size()), {Box{lo, hi}});
}

Domain make_ball(const Vector& center, double radius) {
  return Domain(int(center.size()), {Ball{center, radius}});
}

Ball symmetrized_set(const Domain& D, int resolution) {
  const double vol = D.measure(resolution);
  if (!(vol > 0.0)) throw EmptyDomainError("symmetrized_set: measure 0");
  Ball out;
  out.center = Vector::Zero(D.dim());
  out.radius = std::pow(vol / unit_ball_volume(D.dim()), 1.0 / D.dim());
  return out;
}

namespace {

// Dense samples of a piece's boundary; exact endpoints in 1D.
std::vector<Vector> boundary_samples(const Piece& piece, int dim) {
  std::vector<Vector> pts;
  if (dim == 1) {
    Vector a(1), b(1);
    if (const Box* box = std::get_if<Box>(&piece)) {
      a << box->lo[0];
      b << box->hi[0];
    } else {
      const Ball& ball = std::get<Ball>(piece);
      a << ball.center[0] - ball.radius;
      b << ball.center[0] + ball.radius;
    }
    return {a, b};
  }
  const int per_axis = std::max(
      2, int(std::lround(std::pow(double(kBoundarySamplesPerPiece),
                                  1.0 / (dim - 1)))));
  if (const Box* box = std::get_if<Box>(&piece)) {
    for (int axis = 0; axis < dim; ++axis) {
      for (double side : {0, 1}) {
        // Grid over the remaining axes of this face.
        const long face_total =
            std::lround(std::pow(double(per_axis), dim - 1));
        for (long flat = 0; flat < face_total; ++flat) {
          Vector p(dim);
          p[axis] = side == 0 ? box->lo[axis] : box->hi[axis];
          long rest = flat;
          for (int k = 0; k < dim; ++k) {
            if (k == axis) continue;
            const int i = int(rest % per_axis);
            rest /= per_axis;
            p[k] = box->lo[k] +
                   (i + 0.5) * (box->hi[k] - box->lo[k]) / per_axis;
          }
          pts.push_back(std::move(p));
        }
      }
    }
    return pts;
  }
  const Ball& ball = std::get<Ball>(piece);
  if (dim == 2) {
    const int m = kBoundarySamplesPerPiece;
    pts.reserve(m);
    for (int i = 0; i < m; ++i) {
      const double a = 2.0 * std::numbers::pi * i / m;
      Vector p(2);
      p << ball.center[0] + ball.radius * std::cos(a),
          ball.center[1] + ball.radius * std::sin(a);
      pts.push_back(std::move(p));
    }
    return pts;
  }
  // dim >= 3: spiral point set on the sphere.
  const int m = kBoundarySamplesPerPiece;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < m; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / m;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double a = golden * i;
    Vector p = Vector::Zero(dim);
    p[0] = rho * std::cos(a);
    p[1] = rho * std::sin(a);
    p[2] = z;
    pts.push_back(ball.center + ball.radius * p);
  }
  return pts;
}

}  // namespace

double distance_to_boundary(const Domain& D, const Vector& x) {
  if (x.size() != D.dim()) throw Error("distance_to_boundary: dim mismatch");
  if (!D.contains(x)) throw OutsideDomainError("point outside the domain");
  const double tol = 1e-12 * (1.0 + (D.bbox_hi() - D.bbox_lo()).norm());
  auto strictly_interior = [&](const Vector& p) {
    for (const Piece& piece : D.pieces())
      if (inside_depth(piece, p) > tol) return true;
    return false;
  };

  double best = std::numeric_limits<double>::infinity();
  bool rejected_any = false;
  for (const Piece& piece : D.pieces()) {
    const Vector b = nearest_boundary_point(piece, x);
    if (strictly_interior(b))
      rejected_any = true;
    else
      best = std::min(best, (b - x).norm());
  }
  if (!rejected_any && std::isfinite(best)) return best;
  // A nearest candidate was swallowed by an overlapping piece: scan
  // sampled boundary points of every piece instead.
  for (const Piece& piece : D.pieces()) {
    for (const Vector& b : boundary_samples(piece, D.dim())) {
      if (strictly_interior(b)) continue;
      best = std::min(best, (b - x).norm());
    }
  }
  if (!std::isfinite(best))
    throw Error("distance_to_boundary: no boundary point survived");
  return best;
}

InscribedBall inscribed_ball(const Domain& D, int resolution) {
  const Vector widths = (D.bbox_hi() - D.bbox_lo()) / double(resolution);
  const double h = widths.maxCoeff();
  const int dim = D.dim();
  const long total = std::lround(std::pow(double(resolution), dim));
  Vector x(dim);
  InscribedBall out;
  double best = -1.0;
  for (long flat = 0; flat < total; ++flat) {
    long rest = flat;
    for (int k = dim - 1; k >= 0; --k) {
      x[k] = D.bbox_lo()[k] + (rest % resolution + 0.5) * widths[k];
      rest /= resolution;
    }
    if (!D.contains(x)) continue;
    const double d = distance_to_boundary(D, x);
    if (d > best + 1e-15) {
      best = d;
      out.center = x;
    }
  }
  if (best < 0.0) throw EmptyDomainError("inscribed_ball: no interior cell");
  out.radius = best - h;
  if (out.radius < 4.0 * h)
    throw TooCoarseError("inscribed_ball: radius under 4 cell widths");
  // Membership spot check of the claimed ball.
  for (const Vector& dir : boundary_samples(
           Ball{Vector::Zero(dim), 1.0}, dim)) {
    for (double rho : {0.5, 1.0}) {
      if (!D.contains(out.center + (rho * out.radius) * dir))
        throw Error("inscribed_ball: membership verification failed");
    }
  }
  return out;
}

double symmetric_difference_measure(const Domain& D1, const Domain& D2,
                                    int resolution) {
  if (D1.dim() != D2.dim())
    throw Error("symmetric_difference_measure: dim mismatch");
  const int dim = D1.dim();
  const Vector lo = D1.bbox_lo().cwiseMin(D2.bbox_lo());
  const Vector hi = D1.bbox_hi().cwiseMax(D2.bbox_hi());
  const Vector widths = (hi - lo) / double(resolution);
  const double cell_vol = widths.prod();
  const long total = std::lround(std::pow(double(resolution), dim));
  Vector x(dim);
  long count = 0;
  for (long flat = 0; flat < total; ++flat) {
    long rest = flat;
    for (int k = dim - 1; k >= 0; --k) {
      x[k] = lo[k] + (rest % resolution + 0.5) * widths[k];
      rest /= resolution;
    }
    if (D1.contains(x) != D2.contains(x)) ++count;
  }
  return count * cell_vol;
}

GridFunction::GridFunction(const Domain& support, Vector box_lo,
                           Vector box_hi, int cells_per_axis, Array values)
    : dim_(int(box_lo.size())),
      lo_(std::move(box_lo)),
      hi_(std::move(box_hi)),
      n_(cells_per_axis),
      values_(std::move(values)),
      support_(support) {
  if (dim_ != support.dim() || hi_.size() != dim_)
    throw Error("GridFunction: dimension mismatch");
  if (n_ < 1) throw Error("GridFunction: cells_per_axis >= 1");
  if (!((hi_ - lo_).minCoeff() > 0.0))
    throw Error("GridFunction: box needs lo < hi");
  const Eigen::Index expect =
      Eigen::Index(std::lround(std::pow(double(n_), dim_)));
  if (values_.size() != expect)
    throw Error("GridFunction: value count != cells_per_axis^dim");
  if (values_.size() > 0 && values_.minCoeff() < 0.0)
    throw Error("GridFunction: values must be nonnegative");
  for (Eigen::Index i = 0; i < values_.size(); ++i)
    if (values_[i] > 0.0 && !support_.contains(center(i))) values_[i] = 0.0;
}

GridFunction GridFunction::sample(
    const Domain& support, const Vector& box_lo, const Vector& box_hi,
    int cells_per_axis, const std::function<double(const Vector&)>& f) {
  const int dim = int(box_lo.size());
  const Eigen::Index total =
      Eigen::Index(std::lround(std::pow(double(cells_per_axis), dim)));
  Array values(total);
  const Vector widths = (box_hi - box_lo) / double(cells_per_axis);
  Vector x(dim);
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rest = flat;
    for (int k = dim - 1; k >= 0; --k) {
      x[k] = box_lo[k] + (rest % cells_per_axis + 0.5) * widths[k];
      rest /= cells_per_axis;
    }
    values[flat] = f(x);
  }
  return GridFunction(support, box_lo, box_hi, cells_per_axis,
                      std::move(values));
}

Vector GridFunction::cell_widths() const {
  return (hi_ - lo_) / double(n_);
}

double GridFunction::cell_volume() const { return cell_widths().prod(); }

Vector GridFunction::center(Eigen::Index flat_index) const {
  Vector x(dim_);
  const Vector widths = cell_widths();
  Eigen::Index rest = flat_index;
  for (int k = dim_ - 1; k >= 0; --k) {
    x[k] = lo_[k] + (rest % n_ + 0.5) * widths[k];
    rest /= n_;
  }
  return x;
}

double GridFunction::value_at(const Vector& x) const {
  const Vector widths = cell_widths();
  Eigen::Index flat = 0;
  for (int k = 0; k < dim_; ++k) {
    if (x[k] < lo_[k] || x[k] > hi_[k]) return 0.0;
    const Eigen::Index i = std::min<Eigen::Index>(
        n_ - 1, Eigen::Index((x[k] - lo_[k]) / widths[k]));
    flat = flat * n_ + i;
  }
  return values_[flat];
}

GridFunction GridFunction::translated(const Vector& shift) const {
  return GridFunction(support_.translated(shift), lo_ + shift, hi_ + shift,
                      n_, values_);
}

GridFunction GridFunction::with_values(Array values) const {
  return GridFunction(support_, lo_, hi_, n_, std::move(values));
}

GridFunction schwarz_rearrange(const GridFunction& u) {
  const int dim = u.dim();
  const double h = std::pow(u.cell_volume(), 1.0 / dim);

  std::vector<double> positives;
  positives.reserve(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (u.values()[i] > 0.0) positives.push_back(u.values()[i]);
  std::sort(positives.begin(), positives.end(), std::greater<>());
  const Eigen::Index P = Eigen::Index(positives.size());

  // Support ball radius in cell-width units; the sizing below works in
  // integer offsets so the result is independent of where u's box sits.
  const double rho =
      P > 0 ? std::pow(double(P) / unit_ball_volume(dim), 1.0 / dim) : 0.0;

  // Squared integer distance of a flat index from the grid center.
  auto dist2_of = [dim](Eigen::Index flat, int n, long& out) {
    const int half = (n - 1) / 2;
    long sq = 0;
    Eigen::Index rest = flat;
    for (int k = dim - 1; k >= 0; --k) {
      const long off = long(rest % n) - half;
      sq += off * off;
      rest /= n;
    }
    out = sq;
  };

  int n_out = 3;
  std::vector<Eigen::Index> order;
  std::vector<long> dist2;
  while (true) {
    const Eigen::Index total =
        Eigen::Index(std::lround(std::pow(double(n_out), dim)));
    if (total >= std::max<Eigen::Index>(P, 1)) {
      dist2.assign(std::size_t(total), 0);
      for (Eigen::Index i = 0; i < total; ++i)
        dist2_of(i, n_out, dist2[std::size_t(i)]);
      order.resize(std::size_t(total));
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](Eigen::Index a, Eigen::Index b) {
                  const long da = dist2[std::size_t(a)],
                             db = dist2[std::size_t(b)];
                  if (da != db) return da < db;
                  return a < b;
                });
      const double farthest =
          P > 0 ? std::sqrt(double(dist2[std::size_t(order[P - 1])])) : 0.0;
      const double half_extent = (n_out - 1) / 2 + 0.5;
      // All positive cells clear of the fresh box by more than two cell
      // widths (downstream support-margin rules must never clip them),
      // and the box must host the support ball.
      if (farthest + 2.5 <= half_extent && half_extent >= rho + 2.0) break;
    }
    n_out += 2;
  }

  const Eigen::Index total =
      Eigen::Index(std::lround(std::pow(double(n_out), dim)));
  Array values = Array::Zero(total);
  for (Eigen::Index k = 0; k < P; ++k) values[order[k]] = positives[k];

  const double half_width = 0.5 * n_out * h;
  const Vector lo = Vector::Constant(dim, -half_width);
  const Vector hi = Vector::Constant(dim, half_width);
  // Support ball snugly covering every positive cell.
  double r_cover = h;
  if (P > 0)
    r_cover =
        (std::sqrt(double(dist2[std::size_t(order[P - 1])])) + 1.0) * h;
  const Domain support = make_ball(Vector::Zero(dim), r_cover);
  return GridFunction(support, lo, hi, n_out, std::move(values));
}

}  // namespace orlicz::geometry
