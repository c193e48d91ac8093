#pragma once

#include "orlicz/geometry.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/seminorm.hpp"
#include "orlicz/young.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace orlicz::theorems {

// The growth-case gate of a comparison run came back false or inconclusive.
class CaseHypothesisError : public Error {
 public:
  using Error::Error;
};

// Radial profile of the test bumps: 1 on [0, R/2], exp(1 - 1/(1 - t^2))
// with t = 2r/R - 1 on (R/2, R), 0 at and beyond R. Smooth, values in
// [0, 1], nonincreasing in r.
double mollifier_profile(double r, double outer_radius);

struct BumpSpec {
  Vector center;         // a cell center of the working grid
  double outer_radius;   // the profile vanishes at and past this radius
  bool off_center_ball;  // ball domain probed at an off-center anchor
};

// Working frame of a domain-comparison run. Ball domains are translated so
// the ball sits at the origin and the anchor moves off-center (half the
// radius along axis 0, snapped to the lattice); anything else keeps its
// native coordinates with the anchor at the inscribed-ball center. The grid
// box is a square prism (equal span per axis) covering the bounding box, so
// the rearranged partner can reuse the cell width.
struct Frame {
  explicit Frame(geometry::Domain d) : domain(std::move(d)) {}

  geometry::Domain domain;  // working coordinates
  Vector shift;             // working = native - shift
  Vector grid_lo, grid_hi;
  int resolution = 0;    // cells per axis; forced odd in the ball path
  BumpSpec bump;
  geometry::Ball ball;   // origin-centered ball of equal measure
  int partner_cells = 0;  // cells per axis of the partner grid
  double cell_width = 0.0;
};

Frame build_frame(const geometry::Domain& D, int resolution);

// u_eps: the profile scaled to radius eps * outer_radius, planted at the
// frame anchor, sampled on the frame grid.
geometry::GridFunction bump_grid(const Frame& f, double eps);

// The symmetric-decreasing partner of bump_grid on an origin-centered grid
// of the same cell width covering the equal-measure ball. Its positive
// values reproduce the bump's value multiset exactly, cell for cell.
geometry::GridFunction partner_grid(const Frame& f, double eps);

struct ScanRow {
  double eps = 0.0;
  quadrature::Estimate lhs;        // seminorm of the bump over the domain
  quadrature::Estimate rhs;        // seminorm of the partner over the ball
  double margin = 0.0;             // rhs - lhs
  double combined_error = 0.0;     // level-drift estimate for the margin
  bool pass = false;               // margin exceeds 3x combined_error
  quadrature::Estimate cross_domain;  // bump interactions across the boundary
  quadrature::Estimate cross_ball;    // partner interactions across the ball
  double cross_gap = 0.0;             // cross_domain - cross_ball
  bool cross_strict = false;          // gap exceeds the summed error bounds
};

struct CounterexampleReport {
  explicit CounterexampleReport(Frame f) : frame(std::move(f)) {}

  Frame frame;
  std::vector<ScanRow> rows;
  std::optional<double> pass_epsilon;  // smallest scanned eps that passed

  // Exterior-mass comparison at the anchors, amplitude one: the domain seen
  // from the bump center against the ball seen from the origin. Strict
  // means the gap clears both error bounds.
  quadrature::Estimate tail_domain, tail_ball;
  double tail_gap = 0.0;
  bool tail_strict = false;

  // Splitting the full-space seminorm of the first bump into its domain
  // part plus twice the cross term must close to within the error budget.
  double decomposition_residual = 0.0;
  double decomposition_budget = 0.0;
};

// Scans eps over eps_scan (empty: outer_radius * {1/2, ..., 1/64}, clipped
// to (0,1)) and compares the domain seminorm of the bump against the ball
// seminorm of its symmetric-decreasing partner. A scan with no passing eps
// is a result, not an error.
CounterexampleReport verify_counterexample(
    const geometry::Domain& D, const young::YoungFunction& Y,
    const young::KernelSpec& K, const std::vector<double>& eps_scan,
    int resolution, const quadrature::CubatureSpec& spec);

// |fullspace - (domain + 2 cross)| for one grid function supported in D,
// with the error budget that must cover it.
struct DecompositionCheck {
  double residual = 0.0;
  double budget = 0.0;
  bool ok = false;
};

DecompositionCheck decomposition_residual(const geometry::GridFunction& u,
                                          const geometry::Domain& D,
                                          const young::YoungFunction& Y,
                                          const young::KernelSpec& K,
                                          const quadrature::CubatureSpec& spec);

struct ComparisonRow {
  quadrature::Estimate fullspace_u;     // full-space seminorm of u
  quadrature::Estimate fullspace_star;  // same for the rearrangement
  quadrature::Estimate domain_u;        // domain seminorm of u
  quadrature::Estimate domain_star;     // ball seminorm of the rearrangement
  quadrature::Estimate cross_u;         // boundary cross term of u
  double rho = 0.0;           // fullspace_star / domain_u
  double hardy_ratio = 0.0;   // cross_u / domain_u
  bool rearrangement_ok = false;  // fullspace_star <= fullspace_u + errors
  bool restriction_ok = false;    // domain_star <= fullspace_star + errors
};

struct ComparisonReport {
  young::CaseDecision gate;
  std::vector<ComparisonRow> rows;
  double max_rho = 0.0;
  double max_hardy_ratio = 0.0;
  bool all_ok = false;  // every row passed both directional checks
};

// Ratio survey behind the constant-bounded comparison: for each corpus
// member, the full-space seminorm of its rearrangement against its domain
// seminorm. The growth-case gate must hold for the requested case, else
// CaseHypothesisError.
ComparisonReport verify_comparison(
    const geometry::Domain& D, const young::YoungFunction& Y,
    const young::KernelSpec& K, int case_id,
    const std::vector<geometry::GridFunction>& corpus,
    const quadrature::CubatureSpec& spec);

// Lipschitz test profiles planted on the inscribed ball of D: cone, dome,
// the mollifier at two scales, and a two-bump sum. All supported strictly
// inside D.
std::vector<geometry::GridFunction> comparison_corpus(
    const geometry::Domain& D, int resolution);

struct HardyReport {
  quadrature::Estimate concentration;  // integral of G(u / delta^s) over D
  quadrature::Estimate seminorm;       // domain seminorm of u
  double ratio = 0.0;                  // concentration / seminorm
  // Pointwise control of the boundary cross term: at sampled interior
  // cells, the exterior integral of G(u(x)/|x-y|^s)/|x-y|^N stays below
  // G(u(x)/delta^s) delta^{s p-} times the exterior integral of
  // |x-y|^{-N-s p-}, within quadrature error.
  int chain_samples = 0;
  int chain_failures = 0;
};

// Distance-weighted concentration against the domain seminorm, the quotient
// that makes the boundary cross term absorbable. Fractional kernels only.
HardyReport hardy_quotient(const geometry::GridFunction& u,
                           const geometry::Domain& D,
                           const young::YoungFunction& Y, double s,
                           const quadrature::CubatureSpec& spec);

}  // namespace orlicz::theorems
