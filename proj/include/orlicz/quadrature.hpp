#pragma once

#include "orlicz/common.hpp"
#include "orlicz/geometry.hpp"
#include "orlicz/young.hpp"

#include <functional>
#include <vector>

namespace orlicz::quadrature {

struct CubatureSpec {
  int base_resolution = 16;    // cells per axis at the coarsest level
  int refinement_levels = 3;   // >= 1; level l runs at base * 2^l
  int diagonal_split_depth = 3;  // >= 2; extra dyadic splits near x = y
  // Outer cutoff for integrals over the complement. 0 selects the
  // automatic rule: 8x the relevant circumradius, doubled until the
  // analytic tail bound drops under 1% of the running value. A positive
  // value is used as-is and must be at least twice the circumradius.
  double truncation_radius = 0.0;
  double tolerance = 1e-6;  // drives the 1D radial quadrature tolerance
  int threads = 1;

  void validate() const;  // throws Error on out-of-range fields
};

// Value plus an honest error bound. The bound always covers the
// difference of the two finest refinement levels; singular-cell and
// truncated-tail bounds are added where they apply.
struct Estimate {
  double value = 0.0;
  double error_bound = 0.0;
  std::vector<double> level_values;
  std::vector<int> level_resolutions;
  double richardson = 0.0;       // |value(L) - value(L-1)|
  double singular_bound = 0.0;   // excluded diagonal mass, bounded not summed
  double tail_bound = 0.0;       // analytic bound beyond truncation_radius
  double truncation_radius = 0.0;
  // Sampled near-diagonal decay exponent (NaN when not measured).
  double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
};

// Pair integrand of the radial form kernel(u(x), u(y), |x - y|). Values
// come from the carrier grid (piecewise constant, 0 outside its box); a
// null carrier means u = 0, so the kernel reduces to a function of the
// distance alone. All integrands this artifact needs have this shape.
struct RadialPairIntegrand {
  std::function<double(double, double, double)> kernel;
  const geometry::GridFunction* carrier = nullptr;
  // Unordered pair sum, doubled. Requires the integrand to be symmetric
  // in (x, y) and A == B.
  bool symmetric = false;
  // Pairs with u(x) == u(y) contribute exactly 0 and are skipped, along
  // with their diagonal subdivision (differences of equal values vanish).
  bool vanish_on_equal = false;
  // The kernel may blow up as r -> 0. Identical-subcell pairs are then
  // excluded from the value and covered by a closed-form local bound in
  // error_bound instead of being sampled.
  bool singular_diagonal = false;
  // Known decay exponent a with |f| <= C r^a near the diagonal; NaN means
  // unknown, in which case the sampled fit is used (and an exponent
  // <= -dim raises NonIntegrableSingularityError).
  double declared_exponent = std::numeric_limits<double>::quiet_NaN();
};

// Midpoint cubature of sum_{x in A, y in B} f over cell pairs, refined
// over refinement_levels, with dyadic near-diagonal subdivision. With a
// carrier the base partition is the carrier's own grid (base_resolution
// is ignored) so that values never straddle quadrature cells; otherwise
// the base partition is A's (and B's) bounding box at base_resolution.
Estimate double_integral(const RadialPairIntegrand& f,
                         const geometry::Domain& A, const geometry::Domain& B,
                         const CubatureSpec& spec);

// Integrand of exterior integrals: kernel(amplitude, r) at distance r
// from the anchor. tail_bound(amplitude, R) must bound the full integral
// beyond radius R (including the surface factor); when null, a power-law
// fit of the kernel at R supplies a non-rigorous estimate instead.
struct ExteriorIntegrand {
  std::function<double(double, double)> kernel;
  std::function<double(double, double)> tail_bound;
};

// sum_k weights[k] * integral over R^dim \ D of kernel(amplitudes[k],
// |y - anchors.row(k)|) dy. One shared near grid covers all anchors up to
// their circumradii; beyond its circumradius each anchor sees a full
// annulus, integrated exactly in the radial variable up to the truncation
// radius, with the tail bound folded into error_bound.
Estimate exterior_sum(const PointMatrix& anchors, const Array& amplitudes,
                      const Array& weights, const ExteriorIntegrand& f,
                      const geometry::Domain& D, const CubatureSpec& spec);

// Analytic tail bound for kernels G(amplitude / M(r)) / Nker(r): closed
// form for the fractional kernel, numeric with power-law extrapolation
// for a general (M, Nker) pair.
ExteriorIntegrand seminorm_exterior_integrand(const young::YoungFunction& Y,
                                              const young::KernelSpec& K,
                                              int dim);

// Integral of G(amplitude / M(|x - y|)) / Nker(|x - y|) over y outside D,
// for an interior anchor x. Throws OnBoundaryError when x sits closer to
// the boundary than one base-level cell width of D's bounding box.
Estimate exterior_tail_integral(const Vector& x, const young::YoungFunction& Y,
                                const young::KernelSpec& K, double amplitude,
                                const geometry::Domain& D,
                                const CubatureSpec& spec);

// Comparison of a radial strictly decreasing integrand over a domain vs.
// its symmetrized ball, interior and exterior. *_strict report whether
// the expected strict inequalities clear the combined error bounds;
// indistinguishable flags a comparison drowned by its error bounds.
struct RadialComparison {
  Estimate ball_interior;    // over the symmetrized ball
  Estimate domain_interior;  // over D
  Estimate domain_exterior;  // over the complement of D
  Estimate ball_exterior;    // over the complement of the ball
  bool interior_strict = false;  // ball_interior > domain_interior
  bool exterior_strict = false;  // domain_exterior > ball_exterior
  bool indistinguishable = false;
};

// Requires |D triangle D*| > 0 (throws Error otherwise: the comparison is
// an equality for an already-centered ball) and f strictly decreasing.
RadialComparison radial_comparison_check(
    const std::function<double(double)>& f_of_r, const geometry::Domain& D,
    const CubatureSpec& spec);

}  // namespace orlicz::quadrature
