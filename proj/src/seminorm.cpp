#include "orlicz/seminorm.hpp"

#include <cmath>
#include <iostream>

namespace orlicz::seminorm {

double local_decay_exponent(const young::YoungFunction& Y,
                            const young::KernelSpec& K, int dim) {
  if (K.fractional) return (1.0 - K.fractional->s) * Y.p_minus - double(dim);
  auto phi = [&](double r) { return Y.G(r / K.M(r)) / K.Nker(r); };
  double slope_sum = 0.0;
  int count = 0;
  for (double r : {1e-4, 2e-4, 4e-4}) {
    const double a = phi(r), b = phi(2.0 * r);
    if (a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b)) {
      slope_sum += std::log2(b / a);
      ++count;
    }
  }
  if (count == 0) throw Error("kernel decay exponent could not be sampled");
  return slope_sum / double(count);
}

quadrature::RadialPairIntegrand pair_integrand(const geometry::GridFunction& u,
                                               const young::YoungFunction& Y,
                                               const young::KernelSpec& K) {
  quadrature::RadialPairIntegrand f;
  f.kernel = [Y, K](double vx, double vy, double r) {
    const double d = std::abs(vx - vy);
    if (d == 0.0) return 0.0;
    return Y.G(d / K.M(r)) / K.Nker(r);
  };
  f.carrier = &u;
  f.symmetric = true;
  f.vanish_on_equal = true;
  f.singular_diagonal = true;
  f.declared_exponent = local_decay_exponent(Y, K, u.dim());
  return f;
}

quadrature::Estimate modular(const geometry::GridFunction& u,
                             const young::YoungFunction& Y) {
  const double vol = u.cell_volume();
  KahanSum s;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double v = u.values()[i];
    if (v > 0.0) s.add(vol * Y.G(v));
  }
  quadrature::Estimate e;
  e.value = s.value();
  e.level_values = {e.value};
  e.level_resolutions = {u.cells_per_axis()};
  return e;
}

Array shrunk_support_values(const geometry::GridFunction& u,
                            const geometry::Domain& D,
                            Eigen::Index* dropped) {
  const double margin = 2.0 * u.cell_widths().maxCoeff();
  Array values = u.values();
  Eigen::Index n_dropped = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] <= 0.0) continue;
    const Vector c = u.center(i);
    if (!D.contains(c))
      throw Error("grid function has positive cells outside the region");
    if (geometry::distance_to_boundary(D, c) < margin) {
      values[i] = 0.0;
      ++n_dropped;
    }
  }
  if (dropped) *dropped = n_dropped;
  return values;
}

quadrature::Estimate seminorm_domain(const geometry::GridFunction& u,
                                     const geometry::Domain& D,
                                     const young::YoungFunction& Y,
                                     const young::KernelSpec& K,
                                     const quadrature::CubatureSpec& spec) {
  const auto f = pair_integrand(u, Y, K);
  return quadrature::double_integral(f, D, D, spec);
}

quadrature::Estimate cross_term(const geometry::GridFunction& u,
                                const geometry::Domain& D,
                                const young::YoungFunction& Y,
                                const young::KernelSpec& K,
                                const quadrature::CubatureSpec& spec) {
  Eigen::Index dropped = 0;
  const Array values = shrunk_support_values(u, D, &dropped);
  if (dropped > 0)
    std::cerr << "seminorm: support shrinkage dropped " << dropped
              << " positive cells within two cell widths of the boundary\n";

  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (values[i] > 0.0) kept.push_back(i);

  const int dim = u.dim();
  PointMatrix anchors(Eigen::Index(kept.size()), dim);
  Array amps(Eigen::Index(kept.size()));
  Array weights(Eigen::Index(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    anchors.row(Eigen::Index(k)) = u.center(kept[k]);
    amps[Eigen::Index(k)] = values[kept[k]];
    weights[Eigen::Index(k)] = u.cell_volume();
  }
  const auto f = quadrature::seminorm_exterior_integrand(Y, K, dim);
  return quadrature::exterior_sum(anchors, amps, weights, f, D, spec);
}

FullSpaceBreakdown seminorm_fullspace(const geometry::GridFunction& u,
                                      const young::YoungFunction& Y,
                                      const young::KernelSpec& K,
                                      const quadrature::CubatureSpec& spec) {
  const auto box = geometry::make_box(u.box_lo(), u.box_hi());
  FullSpaceBreakdown out;
  out.box_pairs = seminorm_domain(u, box, Y, K, spec);
  out.cross = cross_term(u, box, Y, K, spec);

  quadrature::Estimate& t = out.total;
  const std::size_t L = out.box_pairs.level_values.size();
  for (std::size_t l = 0; l < L && l < out.cross.level_values.size(); ++l) {
    t.level_values.push_back(out.box_pairs.level_values[l] +
                             2.0 * out.cross.level_values[l]);
    t.level_resolutions.push_back(out.box_pairs.level_resolutions[l]);
  }
  t.value = out.box_pairs.value + 2.0 * out.cross.value;
  t.richardson = t.level_values.size() >= 2
                     ? std::abs(t.level_values.back() -
                                t.level_values[t.level_values.size() - 2])
                     : std::abs(t.value);
  t.singular_bound = out.box_pairs.singular_bound;
  t.tail_bound = 2.0 * out.cross.tail_bound;
  t.truncation_radius = out.cross.truncation_radius;
  t.fitted_exponent = out.box_pairs.fitted_exponent;
  t.error_bound = out.box_pairs.error_bound + 2.0 * out.cross.error_bound;
  return out;
}

}  // namespace orlicz::seminorm
