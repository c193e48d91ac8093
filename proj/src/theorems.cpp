#include "orlicz/theorems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

namespace orlicz::theorems {

namespace {

constexpr int kMaxDim = 3;

double sphere_area(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    default: return 4.0 * std::numbers::pi;
  }
}

std::array<long, kMaxDim> unflatten(long flat, int dim, int n) {
  std::array<long, kMaxDim> idx{0, 0, 0};
  for (int k = dim - 1; k >= 0; --k) {
    idx[static_cast<size_t>(k)] = flat % n;
    flat /= n;
  }
  return idx;
}

// Values of profile(|x - anchor| / scale) on an n^dim grid, computed from
// integer cell offsets so two grids sharing the cell width produce
// bit-identical values at equal lattice distances.
Array lattice_profile_values(int dim, int n,
                             const std::array<long, kMaxDim>& anchor,
                             double h, double scale, double outer_radius) {
  long total = 1;
  for (int k = 0; k < dim; ++k) total *= n;
  Array vals(total);
  for (long flat = 0; flat < total; ++flat) {
    const auto idx = unflatten(flat, dim, n);
    long sq = 0;
    for (int k = 0; k < dim; ++k) {
      const long d = idx[static_cast<size_t>(k)] - anchor[static_cast<size_t>(k)];
      sq += d * d;
    }
    const double r = h * std::sqrt(static_cast<double>(sq));
    vals[flat] = mollifier_profile(r / scale, outer_radius);
  }
  return vals;
}

// Smallest odd cell count whose origin-centered box of pitch h covers
// radius r, with one spare cell per side.
int centered_cells_covering(double r, double h) {
  const int m =
      static_cast<int>(std::ceil(r / h - 0.5 - 1e-12)) + 1;
  return 2 * std::max(m, 1) + 1;
}

geometry::Domain ball_domain(const geometry::Ball& ball) {
  return geometry::make_ball(ball.center, ball.radius);
}

// Margin drift across refinement levels; the floor keeps the pass test
// meaningful when the two sides cancel to roundoff.
double margin_drift(const quadrature::Estimate& lhs,
                    const quadrature::Estimate& rhs, double* margin_out) {
  const size_t levels =
      std::min(lhs.level_values.size(), rhs.level_values.size());
  std::vector<double> margins(levels);
  for (size_t l = 0; l < levels; ++l)
    margins[l] = rhs.level_values[l] - lhs.level_values[l];
  const double margin = margins.empty() ? 0.0 : margins.back();
  double drift = std::abs(margin);
  if (levels >= 2) drift = std::abs(margins[levels - 1] - margins[levels - 2]);
  *margin_out = margin;
  return std::max(1.5 * drift,
                  1e-14 * (std::abs(lhs.value) + std::abs(rhs.value)));
}

}  // namespace

double mollifier_profile(double r, double outer_radius) {
  if (!(outer_radius > 0.0))
    throw Error("mollifier_profile: outer radius must be positive");
  if (r <= 0.5 * outer_radius) return 1.0;
  if (r >= outer_radius) return 0.0;
  const double t = 2.0 * r / outer_radius - 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

Frame build_frame(const geometry::Domain& D, int resolution) {
  const int dim = D.dim();
  if (dim > kMaxDim) throw Error("build_frame: dimension above 3");
  if (resolution < 8) throw Error("build_frame: resolution below 8");

  // A 1D interval is a ball in disguise; treat it as one so the off-center
  // probe applies.
  bool ball_like = D.is_single_ball();
  Vector ball_center;
  double ball_radius = 0.0;
  if (ball_like) {
    const auto& b = std::get<geometry::Ball>(D.pieces()[0]);
    ball_center = b.center;
    ball_radius = b.radius;
  } else if (dim == 1 && D.pieces().size() == 1) {
    const auto& b = std::get<geometry::Box>(D.pieces()[0]);
    ball_center = 0.5 * (b.lo + b.hi);
    ball_radius = 0.5 * (b.hi[0] - b.lo[0]);
    ball_like = true;
  }

  Frame f(ball_like ? D.translated(-ball_center) : D);
  if (ball_like) {
    f.shift = ball_center;
    f.resolution = (resolution % 2 == 1) ? resolution : resolution + 1;
    f.grid_lo = Vector::Constant(dim, -ball_radius);
    f.grid_hi = Vector::Constant(dim, ball_radius);
    f.cell_width = 2.0 * ball_radius / f.resolution;

    // Anchor at half the radius along axis 0, snapped to the lattice of
    // cell centers (the origin is one: the cell count is odd).
    const long k = std::max<long>(
        1, std::llround(0.5 * ball_radius / f.cell_width));
    f.bump.center = Vector::Zero(dim);
    f.bump.center[0] = static_cast<double>(k) * f.cell_width;
    f.bump.outer_radius = 0.25 * ball_radius;
    f.bump.off_center_ball = true;
    f.ball.center = Vector::Zero(dim);
    f.ball.radius = ball_radius;
  } else {
    f.shift = Vector::Zero(dim);
    f.resolution = resolution;
    const Vector lo = D.bbox_lo();
    const double span = (D.bbox_hi() - lo).maxCoeff();
    f.grid_lo = lo;
    f.grid_hi = lo + Vector::Constant(dim, span);
    f.cell_width = span / resolution;

    const auto ib = geometry::inscribed_ball(D, resolution);
    Vector center(dim);
    for (int k = 0; k < dim; ++k) {
      long idx = std::llround((ib.center[k] - lo[k]) / f.cell_width - 0.5);
      idx = std::clamp<long>(idx, 0, resolution - 1);
      center[k] = lo[k] + (static_cast<double>(idx) + 0.5) * f.cell_width;
    }
    const double moved = (center - ib.center).norm();
    f.bump.center = center;
    f.bump.outer_radius = ib.radius - moved;
    f.bump.off_center_ball = false;
    if (f.bump.outer_radius < 4.0 * f.cell_width)
      throw TooCoarseError(
          "build_frame: bump radius under four cell widths after snapping");
    f.ball = geometry::symmetrized_set(D, std::max(resolution, 512));
  }
  f.partner_cells = centered_cells_covering(f.ball.radius, f.cell_width);
  return f;
}

geometry::GridFunction bump_grid(const Frame& f, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0))
    throw Error("bump_grid: eps must lie in (0,1)");
  const int dim = f.domain.dim();
  std::array<long, kMaxDim> anchor{0, 0, 0};
  for (int k = 0; k < dim; ++k)
    anchor[static_cast<size_t>(k)] = std::llround(
        (f.bump.center[k] - f.grid_lo[k]) / f.cell_width - 0.5);
  Array vals = lattice_profile_values(dim, f.resolution, anchor, f.cell_width,
                                      eps, f.bump.outer_radius);
  return geometry::GridFunction(f.domain, f.grid_lo, f.grid_hi, f.resolution,
                                std::move(vals));
}

geometry::GridFunction partner_grid(const Frame& f, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0))
    throw Error("partner_grid: eps must lie in (0,1)");
  const int dim = f.domain.dim();
  const int n = f.partner_cells;
  std::array<long, kMaxDim> anchor{0, 0, 0};
  for (int k = 0; k < dim; ++k) anchor[static_cast<size_t>(k)] = (n - 1) / 2;
  Array vals = lattice_profile_values(dim, n, anchor, f.cell_width, eps,
                                      f.bump.outer_radius);
  const double half = (0.5 * n) * f.cell_width;
  return geometry::GridFunction(ball_domain(f.ball),
                                Vector::Constant(dim, -half),
                                Vector::Constant(dim, half), n,
                                std::move(vals));
}

CounterexampleReport verify_counterexample(
    const geometry::Domain& D, const young::YoungFunction& Y,
    const young::KernelSpec& K, const std::vector<double>& eps_scan,
    int resolution, const quadrature::CubatureSpec& spec) {
  CounterexampleReport report(build_frame(D, resolution));
  const Frame& f = report.frame;
  const geometry::Domain star = ball_domain(f.ball);

  std::vector<double> scan = eps_scan;
  if (scan.empty()) {
    for (int k = 1; k <= 6; ++k) {
      const double eps = f.bump.outer_radius * std::pow(2.0, -k);
      if (eps > 0.0 && eps < 1.0) scan.push_back(eps);
    }
  }
  if (scan.empty())
    throw Error("verify_counterexample: empty eps scan");

  for (size_t i = 0; i < scan.size(); ++i) {
    const double eps = scan[i];
    const geometry::GridFunction u = bump_grid(f, eps);
    const geometry::GridFunction v = partner_grid(f, eps);

    ScanRow row;
    row.eps = eps;
    row.lhs = seminorm::seminorm_domain(u, f.domain, Y, K, spec);
    row.rhs = seminorm::seminorm_domain(v, star, Y, K, spec);
    row.combined_error = margin_drift(row.lhs, row.rhs, &row.margin);
    row.pass = row.margin > 3.0 * row.combined_error;

    row.cross_domain = seminorm::cross_term(u, f.domain, Y, K, spec);
    row.cross_ball = seminorm::cross_term(v, star, Y, K, spec);
    row.cross_gap = row.cross_domain.value - row.cross_ball.value;
    row.cross_strict =
        row.cross_gap >
        row.cross_domain.error_bound + row.cross_ball.error_bound;

    if (i == 0) {
      const auto full = seminorm::seminorm_fullspace(u, Y, K, spec);
      report.decomposition_residual =
          std::abs(full.total.value -
                   (row.lhs.value + 2.0 * row.cross_domain.value));
      report.decomposition_budget = full.total.error_bound +
                                    row.lhs.error_bound +
                                    2.0 * row.cross_domain.error_bound;
    }
    report.rows.push_back(std::move(row));
  }

  for (const ScanRow& row : report.rows)
    if (row.pass &&
        (!report.pass_epsilon || row.eps < *report.pass_epsilon))
      report.pass_epsilon = row.eps;

  report.tail_domain = quadrature::exterior_tail_integral(
      f.bump.center, Y, K, 1.0, f.domain, spec);
  report.tail_ball = quadrature::exterior_tail_integral(
      Vector::Zero(f.domain.dim()), Y, K, 1.0, star, spec);
  report.tail_gap = report.tail_domain.value - report.tail_ball.value;
  report.tail_strict =
      report.tail_gap >
      report.tail_domain.error_bound + report.tail_ball.error_bound;
  return report;
}

DecompositionCheck decomposition_residual(const geometry::GridFunction& u,
                                          const geometry::Domain& D,
                                          const young::YoungFunction& Y,
                                          const young::KernelSpec& K,
                                          const quadrature::CubatureSpec& spec) {
  const auto domain = seminorm::seminorm_domain(u, D, Y, K, spec);
  const auto cross = seminorm::cross_term(u, D, Y, K, spec);
  const auto full = seminorm::seminorm_fullspace(u, Y, K, spec);
  DecompositionCheck out;
  out.residual =
      std::abs(full.total.value - (domain.value + 2.0 * cross.value));
  out.budget = full.total.error_bound + domain.error_bound +
               2.0 * cross.error_bound;
  out.ok = out.residual <= out.budget;
  return out;
}

namespace {

// Rebuilds a rearranged grid on a larger origin-centered box covering the
// given ball, declaring the ball as its support.
geometry::GridFunction embed_in_ball(const geometry::GridFunction& u,
                                     const geometry::Ball& ball) {
  const int dim = u.dim();
  const double h = u.cell_widths()[0];
  const int n_old = u.cells_per_axis();
  const int n = std::max(centered_cells_covering(ball.radius, h), n_old);
  const long pad = (n - n_old) / 2;
  long total = 1;
  for (int k = 0; k < dim; ++k) total *= n;
  Array vals = Array::Zero(total);
  for (Eigen::Index flat = 0; flat < u.size(); ++flat) {
    if (u.values()[flat] == 0.0) continue;
    const auto idx = unflatten(flat, dim, n_old);
    long out = 0;
    for (int k = 0; k < dim; ++k)
      out = out * n + (idx[static_cast<size_t>(k)] + pad);
    vals[out] = u.values()[flat];
  }
  const double half = (0.5 * n) * h;
  return geometry::GridFunction(ball_domain(ball),
                                Vector::Constant(dim, -half),
                                Vector::Constant(dim, half), n,
                                std::move(vals));
}

}  // namespace

ComparisonReport verify_comparison(
    const geometry::Domain& D, const young::YoungFunction& Y,
    const young::KernelSpec& K, int case_id,
    const std::vector<geometry::GridFunction>& corpus,
    const quadrature::CubatureSpec& spec) {
  if (!K.fractional)
    throw Error("verify_comparison: needs the fractional kernel");
  ComparisonReport report;
  report.gate = young::classify_growth_case(Y, K.fractional->s, D.dim(),
                                              case_id);
  if (report.gate.verdict != young::Verdict::True)
    throw CaseHypothesisError(
        "verify_comparison: growth-case gate not satisfied for case " +
        std::to_string(case_id));

  const geometry::Ball ball =
      geometry::symmetrized_set(D, std::max(512, spec.base_resolution));
  const geometry::Domain star = ball_domain(ball);

  report.all_ok = true;
  for (const geometry::GridFunction& u : corpus) {
    ComparisonRow row;
    row.domain_u = seminorm::seminorm_domain(u, D, Y, K, spec);
    row.fullspace_u = seminorm::seminorm_fullspace(u, Y, K, spec).total;
    row.cross_u = seminorm::cross_term(u, D, Y, K, spec);

    const geometry::GridFunction star_raw = geometry::schwarz_rearrange(u);
    row.fullspace_star =
        seminorm::seminorm_fullspace(star_raw, Y, K, spec).total;
    const geometry::GridFunction star_emb = embed_in_ball(star_raw, ball);
    row.domain_star = seminorm::seminorm_domain(star_emb, star, Y, K, spec);

    row.rho = row.domain_u.value > 0.0
                  ? row.fullspace_star.value / row.domain_u.value
                  : std::numeric_limits<double>::infinity();
    row.hardy_ratio = row.domain_u.value > 0.0
                          ? row.cross_u.value / row.domain_u.value
                          : std::numeric_limits<double>::infinity();
    row.rearrangement_ok =
        row.fullspace_star.value <=
        row.fullspace_u.value + row.fullspace_star.error_bound +
            row.fullspace_u.error_bound;
    row.restriction_ok =
        row.domain_star.value <=
        row.fullspace_star.value + row.domain_star.error_bound +
            row.fullspace_star.error_bound;

    report.max_rho = std::max(report.max_rho, row.rho);
    report.max_hardy_ratio = std::max(report.max_hardy_ratio, row.hardy_ratio);
    report.all_ok =
        report.all_ok && row.rearrangement_ok && row.restriction_ok;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<geometry::GridFunction> comparison_corpus(
    const geometry::Domain& D, int resolution) {
  const int dim = D.dim();
  const Vector lo = D.bbox_lo();
  const double span = (D.bbox_hi() - lo).maxCoeff();
  const Vector hi = lo + Vector::Constant(dim, span);
  const double h = span / resolution;

  const auto ib = geometry::inscribed_ball(D, resolution);
  const Vector c = ib.center;
  // Profiles vanish two cell widths inside the inscribed ball so no
  // positive cell ever grazes the boundary margin rules.
  const double R = ib.radius - 2.0 * h;
  if (R < 2.0 * h)
    throw TooCoarseError("comparison_corpus: inscribed ball underresolved");

  auto planted = [&](const std::function<double(double)>& profile) {
    return geometry::GridFunction::sample(
        D, lo, hi, resolution,
        [&](const Vector& x) { return profile((x - c).norm()); });
  };

  std::vector<geometry::GridFunction> corpus;
  corpus.push_back(planted([&](double r) { return std::max(0.0, 1.0 - r / R); }));
  corpus.push_back(planted(
      [&](double r) { return std::max(0.0, 1.0 - (r / R) * (r / R)); }));
  corpus.push_back(planted([&](double r) { return mollifier_profile(r, R); }));
  corpus.push_back(
      planted([&](double r) { return mollifier_profile(r, 0.5 * R); }));
  corpus.push_back(planted(
      [&](double r) { return 0.8 * std::max(0.0, 1.0 - 2.0 * r / R); }));

  Vector c1 = c, c2 = c;
  c1[0] -= R / 3.0;
  c2[0] += R / 3.0;
  corpus.push_back(geometry::GridFunction::sample(
      D, lo, hi, resolution, [&](const Vector& x) {
        return mollifier_profile((x - c1).norm(), R / 3.0) +
               0.7 * mollifier_profile((x - c2).norm(), R / 3.0);
      }));
  return corpus;
}

HardyReport hardy_quotient(const geometry::GridFunction& u,
                           const geometry::Domain& D,
                           const young::YoungFunction& Y, double s,
                           const quadrature::CubatureSpec& spec) {
  spec.validate();
  const int dim = u.dim();
  const auto K = young::KernelSpec::make_fractional(s, dim);
  const double spm = s * Y.p_minus;

  // The same margin rule the cross term applies, so every quantity below
  // refers to one function.
  const geometry::GridFunction uw =
      u.with_values(seminorm::shrunk_support_values(u, D));

  HardyReport report;

  // Distance-weighted concentration, refined by resampling the piecewise
  // constant function on split cells.
  {
    quadrature::Estimate est;
    const Vector lo = uw.box_lo();
    const Vector widths = uw.cell_widths();
    for (int level = 0; level < spec.refinement_levels; ++level) {
      const long factor = 1L << level;
      const long n = static_cast<long>(uw.cells_per_axis()) * factor;
      double vol = 1.0;
      for (int k = 0; k < dim; ++k) vol *= widths[k] / factor;
      long total = 1;
      for (int k = 0; k < dim; ++k) total *= n;
      KahanSum sum;
      Vector x(dim);
      for (long flat = 0; flat < total; ++flat) {
        long rem = flat;
        for (int k = dim - 1; k >= 0; --k) {
          const long i = rem % n;
          rem /= n;
          x[k] = lo[k] + (static_cast<double>(i) + 0.5) * widths[k] /
                             static_cast<double>(factor);
        }
        const double v = uw.value_at(x);
        if (v <= 0.0 || !D.contains(x)) continue;
        const double delta = geometry::distance_to_boundary(D, x);
        sum.add(vol * Y.G(v / std::pow(delta, s)));
      }
      est.level_values.push_back(sum.value());
      est.level_resolutions.push_back(static_cast<int>(n));
    }
    est.value = est.level_values.back();
    est.richardson =
        est.level_values.size() >= 2
            ? std::abs(est.value - est.level_values[est.level_values.size() - 2])
            : std::abs(est.value);
    est.error_bound = est.richardson;
    report.concentration = std::move(est);
  }

  report.seminorm = seminorm::seminorm_domain(uw, D, Y, K, spec);
  report.ratio = report.seminorm.value > 0.0
                     ? report.concentration.value / report.seminorm.value
                     : std::numeric_limits<double>::infinity();

  // Pointwise control at the deepest interior support cells: exterior mass
  // of the scaled profile against the distance-weighted bound.
  std::vector<std::pair<double, Eigen::Index>> interior;
  for (Eigen::Index flat = 0; flat < uw.size(); ++flat) {
    if (uw.values()[flat] <= 0.0) continue;
    const Vector x = uw.center(flat);
    interior.emplace_back(geometry::distance_to_boundary(D, x), flat);
  }
  std::sort(interior.begin(), interior.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  const size_t samples = std::min<size_t>(5, interior.size());
  const double omega = sphere_area(dim);
  for (size_t i = 0; i < samples; ++i) {
    const auto [delta, flat] = interior[i];
    const Vector x = uw.center(flat);
    const double amp = uw.values()[flat];
    const auto lhs =
        quadrature::exterior_tail_integral(x, Y, K, amp, D, spec);

    quadrature::ExteriorIntegrand weight;
    weight.kernel = [dim, spm](double, double r) {
      return std::pow(r, -static_cast<double>(dim) - spm);
    };
    weight.tail_bound = [omega, spm](double, double R) {
      return omega * std::pow(R, -spm) / spm;
    };
    PointMatrix anchors(1, dim);
    anchors.row(0) = x.transpose();
    const auto J = quadrature::exterior_sum(anchors, Array::Ones(1),
                                            Array::Ones(1), weight, D, spec);
    const double bound = Y.G(amp / std::pow(delta, s)) * std::pow(delta, spm);
    ++report.chain_samples;
    if (lhs.value - lhs.error_bound >
        bound * (J.value + J.error_bound) * (1.0 + 1e-9))
      ++report.chain_failures;
  }
  return report;
}

}  // namespace orlicz::theorems
