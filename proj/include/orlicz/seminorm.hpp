#pragma once

#include "orlicz/geometry.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/young.hpp"

namespace orlicz::seminorm {

// Pair integrand G(|u(x) - u(y)| / M(|x - y|)) / Nker(|x - y|) over the
// carrier grid u. Borrows u: the grid must outlive the returned object.
// Equal values are skipped exactly and the near-diagonal decay exponent
// of a Lipschitz profile is declared, so the sampled-fit gate never
// misfires on piecewise-constant data.
quadrature::RadialPairIntegrand pair_integrand(const geometry::GridFunction& u,
                                               const young::YoungFunction& Y,
                                               const young::KernelSpec& K);

// Decay exponent of r -> G(r / M(r)) / Nker(r) as r -> 0: the local rate
// of the pair integrand under a Lipschitz profile. Closed form
// (1 - s) p_minus - dim for the fractional kernel, sampled otherwise.
double local_decay_exponent(const young::YoungFunction& Y,
                            const young::KernelSpec& K, int dim);

// Cell-volume-weighted sum of G(u); exact for the grid representation
// (error_bound = 0).
quadrature::Estimate modular(const geometry::GridFunction& u,
                             const young::YoungFunction& Y);

// Copy of u's values with positive cells closer than two cell widths to
// the boundary of D zeroed. dropped (optional) receives the count; a
// nonzero count is also logged to stderr by the callers that shrink.
Array shrunk_support_values(const geometry::GridFunction& u,
                            const geometry::Domain& D,
                            Eigen::Index* dropped = nullptr);

// Modular of the difference quotient over D x D. Requires u's box to
// cover D (quadrature enforces this) and all positive cells inside D.
quadrature::Estimate seminorm_domain(const geometry::GridFunction& u,
                                     const geometry::Domain& D,
                                     const young::YoungFunction& Y,
                                     const young::KernelSpec& K,
                                     const quadrature::CubatureSpec& spec);

// Integral over x in D, y outside D of G(u(x) / M(|x - y|)) / Nker.
// Support shrinkage applies: positive cells hugging the boundary of D
// are dropped with a warning, keeping the tail integrand bounded. The
// factor 2 of the full-space decomposition is NOT applied here.
quadrature::Estimate cross_term(const geometry::GridFunction& u,
                                const geometry::Domain& D,
                                const young::YoungFunction& Y,
                                const young::KernelSpec& K,
                                const quadrature::CubatureSpec& spec);

// Full-space modular, decomposed about u's box B: pairs over B x B plus
// twice the cross term into the complement (u vanishes outside B, so
// complement-complement pairs contribute nothing).
struct FullSpaceBreakdown {
  quadrature::Estimate box_pairs;
  quadrature::Estimate cross;
  quadrature::Estimate total;
};
FullSpaceBreakdown seminorm_fullspace(const geometry::GridFunction& u,
                                      const young::YoungFunction& Y,
                                      const young::KernelSpec& K,
                                      const quadrature::CubatureSpec& spec);

}  // namespace orlicz::seminorm
