#include "orlicz/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace orlicz::quadrature {

namespace {

constexpr int kMaxDim = 3;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// One refinement level of a cell partition, restricted to cells whose
// centers pass the keep predicate. Integer coordinates are kept so that
// near-diagonal tests on a shared lattice are exact.
struct LevelGrid {
  int dim = 0;
  int res = 0;      // cells per axis
  Vector lo;        // box corner
  Vector widths;    // per-axis cell width
  double volume = 0.0;
  std::vector<std::array<int, kMaxDim>> multi;
  PointMatrix centers;
  Array values;
};

LevelGrid build_grid(const Vector& lo, const Vector& hi, int base_res,
                     int level, const geometry::Domain* filter,
                     const geometry::GridFunction* carrier) {
  LevelGrid g;
  g.dim = int(lo.size());
  if (g.dim < 1 || g.dim > kMaxDim)
    throw Error("cubature supports 1 to 3 dimensions");
  g.res = base_res << level;
  g.lo = lo;
  g.widths = (hi - lo).array().cwiseMax(0.0).matrix() / double(g.res);
  if ((g.widths.array() <= 0.0).any())
    throw Error("cubature box has a degenerate axis");
  g.volume = g.widths.prod();

  const long total = ipow(g.res, g.dim);
  std::vector<std::array<int, kMaxDim>> multi;
  std::vector<double> flat_centers;
  std::vector<double> vals;
  Vector x(g.dim);
  for (long flat = 0; flat < total; ++flat) {
    std::array<int, kMaxDim> mi{0, 0, 0};
    long rest = flat;
    for (int k = g.dim - 1; k >= 0; --k) {
      mi[k] = int(rest % g.res);
      rest /= g.res;
    }
    for (int k = 0; k < g.dim; ++k) x[k] = lo[k] + (mi[k] + 0.5) * g.widths[k];
    if (filter && !filter->contains(x)) continue;
    multi.push_back(mi);
    for (int k = 0; k < g.dim; ++k) flat_centers.push_back(x[k]);
    vals.push_back(carrier ? carrier->value_at(x) : 0.0);
  }
  const long n = long(multi.size());
  g.multi = std::move(multi);
  g.centers.resize(n, g.dim);
  g.values.resize(n);
  for (long i = 0; i < n; ++i) {
    for (int k = 0; k < g.dim; ++k) g.centers(i, k) = flat_centers[i * g.dim + k];
    g.values[i] = vals[i];
  }
  return g;
}

// Per-axis subcell center offsets for a dyadic split into m = 2^depth
// pieces per axis, relative to the parent center.
std::vector<std::array<double, kMaxDim>> subcell_offsets(const Vector& widths,
                                                         int depth) {
  const int dim = int(widths.size());
  const int m = 1 << depth;
  const long count = ipow(m, dim);
  std::vector<std::array<double, kMaxDim>> out(count);
  for (long flat = 0; flat < count; ++flat) {
    long rest = flat;
    for (int k = dim - 1; k >= 0; --k) {
      const int p = int(rest % m);
      rest /= m;
      out[flat][k] = ((p + 0.5) / m - 0.5) * widths[k];
    }
  }
  return out;
}

[[noreturn]] void throw_non_finite(double r) {
  std::ostringstream os;
  os << "pair integrand evaluated non-finite at r = " << r;
  throw Error(os.str());
}

struct PairSumResult {
  double value = 0.0;
  double singular_bound = 0.0;
};

// Local prefactor for the excluded-diagonal bound: 2x the largest sampled
// kernel(v, v, d) / d^alpha over a few sub-cell-scale distances.
double local_prefactor(const RadialPairIntegrand& f, double v, double scale,
                       double alpha) {
  double c = 0.0;
  for (double factor : {1.0, 0.5, 0.25}) {
    const double d = scale * factor;
    const double val = f.kernel(v, v, d);
    if (!std::isfinite(val)) throw_non_finite(d);
    c = std::max(c, val / std::pow(d, alpha));
  }
  return 2.0 * c;
}

// Cell-pair midpoint sum with dyadic subdivision of near-diagonal pairs.
// same_lattice enables the exact integer near test; otherwise a metric
// test against twice the larger cell width is used. alpha is the decay
// exponent used for the excluded-diagonal bound (singular kernels only).
PairSumResult pair_sum_level(const RadialPairIntegrand& f, const LevelGrid& GA,
                             const LevelGrid& GB, bool same_lattice, int depth,
                             int threads, double alpha) {
  const int dim = GA.dim;
  const long nA = GA.centers.rows();
  const long nB = GB.centers.rows();
  PairSumResult out;
  if (nA == 0 || nB == 0) return out;

  const int m = 1 << depth;
  const auto subA = subcell_offsets(GA.widths, depth);
  const auto subB = subcell_offsets(GB.widths, depth);
  const double sub_volA = GA.volume / double(subA.size());
  const double sub_volB = GB.volume / double(subB.size());
  Vector sub_widthsA = GA.widths / double(m);
  const double sub_half_diag = 0.5 * sub_widthsA.norm();
  const double sub_min_width = sub_widthsA.minCoeff();

  std::array<double, kMaxDim> near_span{0, 0, 0};
  for (int k = 0; k < dim; ++k)
    near_span[k] = 2.0 * std::max(GA.widths[k], GB.widths[k]) * (1.0 + 1e-9);

  auto chunk = [&](std::size_t ci) -> double {
    const long i = long(ci);
    KahanSum s;
    const double vx = GA.values[i];
    std::array<double, kMaxDim> cx{0, 0, 0};
    for (int k = 0; k < dim; ++k) cx[k] = GA.centers(i, k);
    const long j0 = f.symmetric ? i : 0;
    for (long j = j0; j < nB; ++j) {
      const double vy = GB.values[j];
      if (f.vanish_on_equal && vx == vy) continue;
      std::array<double, kMaxDim> dc{0, 0, 0};
      double r2 = 0.0;
      for (int k = 0; k < dim; ++k) {
        dc[k] = GB.centers(j, k) - cx[k];
        r2 += dc[k] * dc[k];
      }
      bool near = true;
      if (same_lattice) {
        for (int k = 0; k < dim; ++k)
          if (std::abs(GB.multi[j][k] - GA.multi[i][k]) > 2) {
            near = false;
            break;
          }
      } else {
        for (int k = 0; k < dim; ++k)
          if (std::abs(dc[k]) > near_span[k]) {
            near = false;
            break;
          }
      }
      const double weight = (f.symmetric && j > i) ? 2.0 : 1.0;
      if (!near) {
        const double val = f.kernel(vx, vy, std::sqrt(r2));
        if (!std::isfinite(val)) throw_non_finite(std::sqrt(r2));
        s.add(weight * val * GA.volume * GB.volume);
        continue;
      }
      const bool self_cell = same_lattice && f.symmetric && j == i;
      KahanSum cell;
      for (std::size_t pa = 0; pa < subA.size(); ++pa) {
        for (std::size_t pb = 0; pb < subB.size(); ++pb) {
          if (self_cell && pa == pb) {
            if (f.singular_diagonal) continue;  // bounded, not sampled
            const double val = f.kernel(vx, vy, 0.0);
            if (!std::isfinite(val)) throw_non_finite(0.0);
            cell.add(val);
            continue;
          }
          double rr = 0.0;
          for (int k = 0; k < dim; ++k) {
            const double d = dc[k] + subB[pb][k] - subA[pa][k];
            rr += d * d;
          }
          if (rr == 0.0) {
            if (f.singular_diagonal) continue;
            const double val = f.kernel(vx, vy, 0.0);
            if (!std::isfinite(val)) throw_non_finite(0.0);
            cell.add(val);
            continue;
          }
          const double val = f.kernel(vx, vy, std::sqrt(rr));
          if (!std::isfinite(val)) throw_non_finite(std::sqrt(rr));
          cell.add(val);
        }
      }
      s.add(weight * cell.value() * sub_volA * sub_volB);
    }
    return s.value();
  };
  out.value = parallel_chunk_sum(std::size_t(nA), threads, chunk);

  if (f.singular_diagonal && !f.vanish_on_equal && same_lattice &&
      f.symmetric) {
    // Each diagonal cell excludes m^dim coincident subcell pairs, bounded
    // by integrating C r^alpha over a ball of the subcell half-diagonal.
    const double omega = unit_sphere_area(dim);
    KahanSum bound;
    for (long i = 0; i < nA; ++i) {
      const double c_loc =
          local_prefactor(f, GA.values[i], 0.5 * sub_min_width, alpha);
      bound.add(GA.volume * c_loc * omega *
                std::pow(sub_half_diag, alpha + dim) / (alpha + dim));
    }
    out.singular_bound = bound.value();
  }
  return out;
}

// Sampled decay exponent of the kernel near the diagonal: mean log-slope
// over axis-aligned displacements of one, two and four minimal widths.
double fit_exponent(const RadialPairIntegrand& f, const LevelGrid& G) {
  const long n = G.centers.rows();
  if (n == 0) return kNaN;
  const double base_r = G.widths.minCoeff();
  const long stride = std::max<long>(1, n / 64);
  double slope_sum = 0.0;
  long slope_count = 0;
  Vector y(G.dim);
  for (long i = 0; i < n; i += stride) {
    const double vx = G.values[i];
    for (int axis = 0; axis < G.dim; ++axis) {
      double vals[3];
      for (int j = 0; j < 3; ++j) {
        const double r = base_r * double(1 << j);
        for (int k = 0; k < G.dim; ++k) y[k] = G.centers(i, k);
        y[axis] += r;
        const double vy = f.carrier ? f.carrier->value_at(y) : 0.0;
        vals[j] = f.kernel(vx, vy, r);
      }
      for (int j = 0; j < 2; ++j) {
        if (vals[j] > 1e-300 && vals[j + 1] > 1e-300) {
          slope_sum += std::log(vals[j + 1] / vals[j]) / std::log(2.0);
          ++slope_count;
        }
      }
    }
  }
  return slope_count == 0 ? kNaN : slope_sum / double(slope_count);
}

Estimate finalize(std::vector<double> level_values,
                  std::vector<int> level_resolutions, double singular,
                  double tail, double extra_error, double trunc,
                  double fitted) {
  Estimate e;
  e.level_values = std::move(level_values);
  e.level_resolutions = std::move(level_resolutions);
  e.value = e.level_values.back();
  const std::size_t L = e.level_values.size();
  e.richardson = L >= 2 ? std::abs(e.level_values[L - 1] - e.level_values[L - 2])
                        : std::abs(e.level_values[0]);
  e.singular_bound = singular;
  e.tail_bound = tail;
  e.truncation_radius = trunc;
  e.fitted_exponent = fitted;
  e.error_bound = e.richardson + singular + tail + extra_error;
  return e;
}

// Power-law estimate of an exterior kernel's integral beyond R, from two
// samples. Not a rigorous bound; used only when no tail_bound is given.
double fitted_tail_estimate(const std::function<double(double, double)>& kernel,
                            double amp, double R, int dim) {
  const double f1 = kernel(amp, R);
  const double f2 = kernel(amp, 2.0 * R);
  if (!(f1 > 0.0) || !(f2 > 0.0)) return 0.0;
  const double kappa = std::log(f2 / f1) / std::log(2.0);
  if (kappa + dim >= -1e-9) return std::numeric_limits<double>::infinity();
  return 2.0 * unit_sphere_area(dim) * f1 * std::pow(R, dim) /
         (-(kappa + dim));
}

}  // namespace

void CubatureSpec::validate() const {
  if (base_resolution < 2) throw Error("base_resolution must be at least 2");
  if (refinement_levels < 1)
    throw Error("refinement_levels must be at least 1");
  if (diagonal_split_depth < 2)
    throw Error("diagonal_split_depth must be at least 2");
  if (!(tolerance > 0.0)) throw Error("tolerance must be positive");
  if (truncation_radius < 0.0)
    throw Error("truncation_radius must be nonnegative");
  if (threads < 1) throw Error("threads must be at least 1");
}

Estimate double_integral(const RadialPairIntegrand& f,
                         const geometry::Domain& A, const geometry::Domain& B,
                         const CubatureSpec& spec) {
  spec.validate();
  if (!f.kernel) throw Error("pair integrand has no kernel");
  if (A.dim() != B.dim())
    throw Error("pair integral requires matching dimensions");
  const int dim = A.dim();

  Vector loA, hiA, loB, hiB;
  int baseA = spec.base_resolution, baseB = spec.base_resolution;
  if (f.carrier) {
    if (f.carrier->dim() != dim)
      throw Error("carrier grid dimension does not match the domains");
    loA = f.carrier->box_lo();
    hiA = f.carrier->box_hi();
    const double tol = 1e-9 * (hiA - loA).norm();
    if (((A.bbox_lo() - loA).minCoeff() < -tol) ||
        ((hiA - A.bbox_hi()).minCoeff() < -tol) ||
        ((B.bbox_lo() - loA).minCoeff() < -tol) ||
        ((hiA - B.bbox_hi()).minCoeff() < -tol))
      throw Error("carrier grid box does not cover the integration domains");
    loB = loA;
    hiB = hiA;
    baseA = baseB = f.carrier->cells_per_axis();
  } else {
    loA = A.bbox_lo();
    hiA = A.bbox_hi();
    loB = B.bbox_lo();
    hiB = B.bbox_hi();
  }
  const bool same_lattice =
      f.symmetric || (f.carrier != nullptr) ||
      (baseA == baseB && (loA - loB).norm() == 0.0 && (hiA - hiB).norm() == 0.0);

  double declared = f.declared_exponent;
  if (!std::isnan(declared) && declared <= -dim)
    throw NonIntegrableSingularityError(
        "declared near-diagonal exponent is not integrable", declared);

  std::vector<double> level_values;
  std::vector<int> level_resolutions;
  double singular = 0.0;
  double fitted = kNaN;
  double alpha = std::isnan(declared) ? 0.0 : declared;
  for (int level = 0; level < spec.refinement_levels; ++level) {
    const LevelGrid GA = build_grid(loA, hiA, baseA, level, &A, f.carrier);
    const LevelGrid GB =
        f.symmetric ? GA : build_grid(loB, hiB, baseB, level, &B, f.carrier);
    if (f.singular_diagonal && level == 0) {
      fitted = fit_exponent(f, GA);
      if (std::isnan(declared)) {
        if (!std::isnan(fitted) && fitted <= -dim + 1e-6)
          throw NonIntegrableSingularityError(
              "sampled near-diagonal exponent is not integrable", fitted);
        alpha = std::isnan(fitted) ? 0.0 : std::min(fitted, 0.0);
      }
    }
    const PairSumResult r = pair_sum_level(f, GA, f.symmetric ? GA : GB,
                                           same_lattice, spec.diagonal_split_depth,
                                           spec.threads, alpha);
    level_values.push_back(r.value);
    level_resolutions.push_back(GA.res);
    singular = r.singular_bound;  // finest level's bound is the one kept
  }
  return finalize(std::move(level_values), std::move(level_resolutions),
                  singular, 0.0, 0.0, 0.0, fitted);
}

Estimate exterior_sum(const PointMatrix& anchors, const Array& amplitudes,
                      const Array& weights, const ExteriorIntegrand& f,
                      const geometry::Domain& D, const CubatureSpec& spec) {
  spec.validate();
  if (!f.kernel) throw Error("exterior integrand has no kernel");
  const int dim = D.dim();
  if (dim > kMaxDim) throw Error("cubature supports 1 to 3 dimensions");
  const long K = anchors.rows();
  if (anchors.cols() != dim && K > 0)
    throw Error("anchor dimension does not match the domain");
  if (amplitudes.size() != K || weights.size() != K)
    throw Error("anchors, amplitudes and weights must have equal length");

  std::vector<double> level_values;
  std::vector<int> level_resolutions;
  if (K == 0) {
    for (int level = 0; level < spec.refinement_levels; ++level) {
      level_values.push_back(0.0);
      level_resolutions.push_back(spec.base_resolution << level);
    }
    return finalize(std::move(level_values), std::move(level_resolutions), 0.0,
                    0.0, 0.0, spec.truncation_radius, kNaN);
  }

  Array Rc(K);
  for (long k = 0; k < K; ++k) Rc[k] = D.circumradius_about(anchors.row(k));
  const double max_Rc = Rc.maxCoeff();
  const double omega = unit_sphere_area(dim);

  auto tail_at = [&](double R) {
    KahanSum t;
    for (long k = 0; k < K; ++k) {
      const double b = f.tail_bound
                           ? f.tail_bound(amplitudes[k], R)
                           : fitted_tail_estimate(f.kernel, amplitudes[k], R, dim);
      t.add(std::abs(weights[k]) * b);
    }
    return t.value();
  };

  // Near grid over the union of the anchor balls, cells outside D. The
  // per-anchor ball restriction is applied in the accumulation loop.
  Vector E_lo = Vector::Constant(dim, std::numeric_limits<double>::infinity());
  Vector E_hi = -E_lo;
  for (long k = 0; k < K; ++k)
    for (int a = 0; a < dim; ++a) {
      E_lo[a] = std::min(E_lo[a], anchors(k, a) - Rc[k]);
      E_hi[a] = std::max(E_hi[a], anchors(k, a) + Rc[k]);
    }

  auto near_at_level = [&](int level) {
    const LevelGrid G =
        build_grid(E_lo, E_hi, spec.base_resolution, level, nullptr, nullptr);
    const long n = G.centers.rows();
    std::vector<long> kept;
    kept.reserve(std::size_t(n));
    Vector c(dim);
    for (long i = 0; i < n; ++i) {
      for (int a = 0; a < dim; ++a) c[a] = G.centers(i, a);
      if (!D.contains(c)) kept.push_back(i);
    }
    auto chunk = [&](std::size_t ck) -> double {
      const long k = long(ck);
      KahanSum s;
      const double w = weights[k];
      const double amp = amplitudes[k];
      const double R2 = Rc[k] * Rc[k];
      for (long idx : kept) {
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) {
          const double d = G.centers(idx, a) - anchors(k, a);
          r2 += d * d;
        }
        if (r2 > R2) continue;
        const double val = f.kernel(amp, std::sqrt(r2));
        if (!std::isfinite(val)) throw_non_finite(std::sqrt(r2));
        s.add(w * val * G.volume);
      }
      return s.value();
    };
    return parallel_chunk_sum(std::size_t(K), spec.threads, chunk);
  };

  // Radial annuli [Rc_k, R_t], accumulated segment by segment so the
  // automatic doubling rule extends them without recomputation.
  Array radial(K);
  radial.setZero();
  Array radial_edge = Rc;  // integrated up to here, per anchor
  double radial_err = 0.0;
  const double quad_tol = std::max(1e-14, spec.tolerance * 1e-3);
  auto extend_radial = [&](double R) {
    for (long k = 0; k < K; ++k) {
      if (R <= radial_edge[k]) continue;
      const double amp = amplitudes[k];
      double err = 0.0;
      const double seg = adaptive_simpson(
          [&](double r) { return f.kernel(amp, r) * std::pow(r, dim - 1); },
          radial_edge[k], R, quad_tol, 40, &err);
      radial[k] += omega * seg;
      radial_err += std::abs(weights[k]) * omega * err;
      radial_edge[k] = R;
    }
  };

  double R_t;
  const double near0 = near_at_level(0);
  if (spec.truncation_radius > 0.0) {
    if (spec.truncation_radius < 2.0 * max_Rc)
      throw Error("truncation_radius must be at least twice the circumradius");
    R_t = spec.truncation_radius;
    extend_radial(R_t);
  } else {
    R_t = 8.0 * max_Rc;
    extend_radial(R_t);
    int doublings = 0;
    for (;;) {
      double radial_total = 0.0;
      for (long k = 0; k < K; ++k) radial_total += weights[k] * radial[k];
      const double running = std::abs(near0 + radial_total);
      const double tail = tail_at(R_t);
      if (tail <= 0.01 * running || tail == 0.0) break;
      if (++doublings > 60)
        throw Error("exterior tail does not decay under repeated doubling");
      R_t *= 2.0;
      extend_radial(R_t);
    }
  }

  double radial_total = 0.0;
  for (long k = 0; k < K; ++k) radial_total += weights[k] * radial[k];
  const double tail = tail_at(R_t);

  for (int level = 0; level < spec.refinement_levels; ++level) {
    const double near = level == 0 ? near0 : near_at_level(level);
    level_values.push_back(near + radial_total);
    level_resolutions.push_back(spec.base_resolution << level);
  }
  return finalize(std::move(level_values), std::move(level_resolutions), 0.0,
                  tail, radial_err, R_t, kNaN);
}

ExteriorIntegrand seminorm_exterior_integrand(const young::YoungFunction& Y,
                                              const young::KernelSpec& K,
                                              int dim) {
  ExteriorIntegrand out;
  out.kernel = [Y, K](double amp, double r) {
    if (amp <= 0.0) return 0.0;
    return Y.G(amp / K.M(r)) / K.Nker(r);
  };
  const double omega = unit_sphere_area(dim);
  if (K.fractional) {
    const double s = K.fractional->s;
    const double sp_minus = s * Y.p_minus;
    const double sp_plus = s * Y.p_plus;
    out.tail_bound = [Y, omega, sp_minus, sp_plus](double amp, double R) {
      if (amp <= 0.0 || R <= 0.0) return 0.0;
      double b;
      if (R >= 1.0) {
        b = std::pow(R, -sp_minus) / sp_minus;
      } else {
        b = (std::pow(R, -sp_plus) - 1.0) / sp_plus + 1.0 / sp_minus;
      }
      return Y.G(amp) * omega * b;
    };
    return out;
  }
  // General kernel: G(a/M(r)) <= G(a) / M(r)^{p-} once M >= 1, so the
  // tail reduces to a weighted integral of r^{dim-1} / (Nker M^{p-}),
  // evaluated numerically with a power-law remainder.
  const double p_minus = Y.p_minus;
  out.tail_bound = [Y, K, omega, p_minus, dim](double amp, double R) {
    if (amp <= 0.0 || R <= 0.0) return 0.0;
    auto h = [&](double r) {
      return std::pow(r, dim - 1) /
             (K.Nker(r) * std::pow(std::max(K.M(r), 1.0), p_minus));
    };
    const double R1 = std::max(R, 1.0);
    double total = 0.0;
    if (R < 1.0) {
      // Exact piece on [R, 1): amplitudes below 1 see the raw kernel.
      total += adaptive_simpson(
          [&](double r) {
            return Y.G(amp / K.M(r)) / K.Nker(r) * std::pow(r, dim - 1);
          },
          R, 1.0, 1e-10);
    }
    const double R_big = R1 * 65536.0;
    double bulk = adaptive_simpson(h, R1, R_big, 1e-10);
    const double h1 = h(R_big);
    const double h2 = h(2.0 * R_big);
    double remainder;
    if (!(h1 > 0.0)) {
      remainder = 0.0;
    } else if (!(h2 > 0.0)) {
      remainder = h1 * R_big;  // crude, decays faster than any power
    } else {
      const double kappa = std::log(h2 / h1) / std::log(2.0);
      if (kappa >= -1.0 - 1e-9)
        return std::numeric_limits<double>::infinity();
      remainder = 2.0 * h1 * R_big / (-(kappa + 1.0));
    }
    total += Y.G(amp) * (bulk + remainder);
    return omega * total;
  };
  return out;
}

Estimate exterior_tail_integral(const Vector& x, const young::YoungFunction& Y,
                                const young::KernelSpec& K, double amplitude,
                                const geometry::Domain& D,
                                const CubatureSpec& spec) {
  spec.validate();
  if (!D.contains(x))
    throw OutsideDomainError("exterior tail anchor lies outside the domain");
  const Vector span = D.bbox_hi() - D.bbox_lo();
  const double h_ref = span.maxCoeff() / double(spec.base_resolution);
  if (geometry::distance_to_boundary(D, x) < h_ref)
    throw OnBoundaryError(
        "anchor is closer to the boundary than one base cell width");

  PointMatrix anchors(1, D.dim());
  anchors.row(0) = x;
  Array amps(1), w(1);
  amps[0] = amplitude;
  w[0] = 1.0;
  if (amplitude == 0.0) {
    std::vector<double> lv(std::size_t(spec.refinement_levels), 0.0);
    std::vector<int> lr;
    for (int level = 0; level < spec.refinement_levels; ++level)
      lr.push_back(spec.base_resolution << level);
    return finalize(std::move(lv), std::move(lr), 0.0, 0.0, 0.0,
                    spec.truncation_radius, kNaN);
  }
  return exterior_sum(anchors, amps, w,
                      seminorm_exterior_integrand(Y, K, D.dim()), D, spec);
}

RadialComparison radial_comparison_check(
    const std::function<double(double)>& f_of_r, const geometry::Domain& D,
    const CubatureSpec& spec) {
  spec.validate();
  if (!f_of_r) throw Error("radial comparison needs an integrand");
  const int dim = D.dim();
  const geometry::Ball star = geometry::symmetrized_set(D);
  const geometry::Domain ball = geometry::make_ball(star.center, star.radius);

  const double meas = D.measure();
  const double sd = geometry::symmetric_difference_measure(D, ball, 512);
  if (sd <= 1e-6 * std::max(meas, 1e-12))
    throw Error(
        "domain coincides with its symmetrized ball; the comparison is an "
        "equality");

  const Vector origin = Vector::Zero(dim);
  const double R_check = std::max(D.circumradius_about(origin), star.radius);
  const Array radii = log_space(1e-3 * R_check, R_check, 16);
  for (int i = 0; i + 1 < radii.size(); ++i) {
    if (!(f_of_r(radii[i + 1]) < f_of_r(radii[i])))
      throw Error("radial comparison integrand is not strictly decreasing");
  }

  auto interior = [&](const geometry::Domain& dom) {
    std::vector<double> lv;
    std::vector<int> lr;
    for (int level = 0; level < spec.refinement_levels; ++level) {
      const LevelGrid G = build_grid(dom.bbox_lo(), dom.bbox_hi(),
                                     spec.base_resolution, level, &dom, nullptr);
      auto chunk = [&](std::size_t ci) -> double {
        const long i = long(ci);
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) r2 += G.centers(i, a) * G.centers(i, a);
        const double val = f_of_r(std::sqrt(r2));
        if (!std::isfinite(val)) throw_non_finite(std::sqrt(r2));
        return val * G.volume;
      };
      lv.push_back(
          parallel_chunk_sum(std::size_t(G.centers.rows()), spec.threads, chunk));
      lr.push_back(G.res);
    }
    return finalize(std::move(lv), std::move(lr), 0.0, 0.0, 0.0, 0.0, kNaN);
  };

  ExteriorIntegrand ext;
  ext.kernel = [f_of_r](double, double r) { return f_of_r(r); };
  PointMatrix anchors(1, dim);
  anchors.row(0) = origin;
  Array amps = Array::Ones(1), w = Array::Ones(1);

  RadialComparison out;
  out.domain_interior = interior(D);
  out.ball_interior = interior(ball);
  out.domain_exterior = exterior_sum(anchors, amps, w, ext, D, spec);
  out.ball_exterior = exterior_sum(anchors, amps, w, ext, ball, spec);

  const double int_gap = out.ball_interior.value - out.domain_interior.value;
  const double int_err =
      out.ball_interior.error_bound + out.domain_interior.error_bound;
  const double ext_gap = out.domain_exterior.value - out.ball_exterior.value;
  const double ext_err =
      out.domain_exterior.error_bound + out.ball_exterior.error_bound;
  out.interior_strict = int_gap > int_err;
  out.exterior_strict = ext_gap > ext_err;
  out.indistinguishable = !(out.interior_strict && out.exterior_strict);
  return out;
}

}  // namespace orlicz::quadrature
