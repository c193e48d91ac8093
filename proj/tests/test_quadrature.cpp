#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orlicz/quadrature.hpp"
#include "orlicz/young.hpp"

#include <cmath>

using namespace orlicz;
using namespace orlicz::quadrature;

namespace {

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

geometry::Domain unit_interval() {
  return geometry::make_interval(0.0, 1.0);
}

CubatureSpec quick_spec(int base, int levels) {
  CubatureSpec spec;
  spec.base_resolution = base;
  spec.refinement_levels = levels;
  return spec;
}

RadialPairIntegrand radial_only(std::function<double(double)> k,
                                bool symmetric) {
  RadialPairIntegrand f;
  f.kernel = [k = std::move(k)](double, double, double r) { return k(r); };
  f.symmetric = symmetric;
  return f;
}

}  // namespace

TEST_CASE("spec validation rejects out-of-range fields") {
  CubatureSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.base_resolution = 1;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = CubatureSpec{};
  spec.refinement_levels = 0;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = CubatureSpec{};
  spec.diagonal_split_depth = 1;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = CubatureSpec{};
  spec.tolerance = 0.0;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = CubatureSpec{};
  spec.truncation_radius = -1.0;
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("pair sum reproduces closed forms on the unit square of pairs") {
  const auto D = unit_interval();

  SUBCASE("constant kernel has pair integral exactly 1") {
    auto f = radial_only([](double) { return 1.0; }, true);
    const Estimate e = double_integral(f, D, D, quick_spec(16, 3));
    CHECK(std::abs(e.value - 1.0) < 1e-12);
    CHECK(e.error_bound < 1e-10);
  }

  SUBCASE("distance kernel converges to 1/3 within its bound") {
    auto f = radial_only([](double r) { return r; }, true);
    for (int levels : {2, 3, 4}) {
      const Estimate e = double_integral(f, D, D, quick_spec(16, levels));
      CHECK(std::abs(e.value - 1.0 / 3.0) <= e.error_bound);
    }
    const Estimate coarse = double_integral(f, D, D, quick_spec(16, 2));
    const Estimate fine = double_integral(f, D, D, quick_spec(16, 4));
    CHECK(std::abs(fine.value - 1.0 / 3.0) <
          std::abs(coarse.value - 1.0 / 3.0));
  }

  SUBCASE("inverse square root kernel converges to 8/3") {
    auto f = radial_only([](double r) { return 1.0 / std::sqrt(r); }, true);
    f.singular_diagonal = true;
    for (int levels : {2, 3, 4}) {
      const Estimate e = double_integral(f, D, D, quick_spec(16, levels));
      CHECK(std::abs(e.value - 8.0 / 3.0) <= e.error_bound);
      CHECK(e.singular_bound > 0.0);
      CHECK(e.value < 8.0 / 3.0);  // excluded diagonal mass is missing
    }
    const Estimate e = double_integral(f, D, D, quick_spec(16, 4));
    CHECK(e.fitted_exponent == doctest::Approx(-0.5).epsilon(0.2));
    CHECK(std::abs(e.value - 8.0 / 3.0) < 0.15);

    // A deeper diagonal split shrinks the excluded mass.
    auto deep = quick_spec(16, 3);
    deep.diagonal_split_depth = 6;
    const Estimate ed = double_integral(f, D, D, deep);
    const Estimate es = double_integral(f, D, D, quick_spec(16, 3));
    CHECK(std::abs(ed.value - 8.0 / 3.0) < std::abs(es.value - 8.0 / 3.0));
    CHECK(ed.singular_bound < es.singular_bound);
  }

  SUBCASE("squared distance kernel in two dimensions converges to 1/3") {
    const auto S = geometry::make_box(Vector::Zero(2), Vector::Ones(2));
    auto f = radial_only([](double r) { return r * r; }, true);
    const Estimate e = double_integral(f, S, S, quick_spec(8, 3));
    CHECK(std::abs(e.value - 1.0 / 3.0) <= e.error_bound);
    CHECK(std::abs(e.value - 1.0 / 3.0) < 5e-3);
  }
}

TEST_CASE("full loop matches the doubled unordered loop") {
  const auto D = unit_interval();
  auto half = radial_only([](double r) { return std::exp(-r); }, true);
  auto full = radial_only([](double r) { return std::exp(-r); }, false);
  const Estimate eh = double_integral(half, D, D, quick_spec(16, 2));
  const Estimate ef = double_integral(full, D, D, quick_spec(16, 2));
  CHECK(std::abs(eh.value - ef.value) < 1e-12 * std::abs(ef.value));
}

TEST_CASE("non-integrable diagonal is detected") {
  const auto D = unit_interval();
  auto f = radial_only([](double r) { return std::pow(r, -1.2); }, true);
  f.singular_diagonal = true;

  SUBCASE("from the sampled fit") {
    CHECK_THROWS_AS(double_integral(f, D, D, quick_spec(16, 2)),
                    NonIntegrableSingularityError);
  }
  SUBCASE("from a declared exponent") {
    f.declared_exponent = -1.2;
    CHECK_THROWS_AS(double_integral(f, D, D, quick_spec(16, 2)),
                    NonIntegrableSingularityError);
  }
  SUBCASE("a declared integrable exponent overrides the fit") {
    // Same kernel but integrable; the declaration skips the fitted gate.
    auto g = radial_only([](double r) { return std::pow(r, -0.5); }, true);
    g.singular_diagonal = true;
    g.declared_exponent = -0.5;
    const Estimate e = double_integral(g, D, D, quick_spec(16, 2));
    CHECK(std::abs(e.value - 8.0 / 3.0) <= e.error_bound);
  }
}

TEST_CASE("carrier values enter the pair sum piecewise constantly") {
  const auto D = unit_interval();
  const int n = 16;
  const auto u = geometry::GridFunction::sample(
      D, vec1(0.0), vec1(1.0), n, [](const Vector& x) { return x[0]; });

  SUBCASE("squared difference of a sampled ramp is exact at every level") {
    // For cellwise-constant values and a distance-free kernel the
    // midpoint rule is exact: the pair sum equals 1/6 - h^2/6.
    const double h = 1.0 / n;
    const double expected = 1.0 / 6.0 - h * h / 6.0;
    RadialPairIntegrand f;
    f.kernel = [](double vx, double vy, double) {
      return (vx - vy) * (vx - vy);
    };
    f.carrier = &u;
    f.symmetric = true;
    const Estimate e = double_integral(f, D, D, quick_spec(99, 3));
    CHECK(std::abs(e.value - expected) < 1e-13);
    CHECK(e.richardson < 1e-13);
    CHECK(e.level_resolutions.front() == n);  // base_resolution is ignored
  }

  SUBCASE("equal values vanish without evaluating the kernel") {
    const auto c = geometry::GridFunction::sample(
        D, vec1(0.0), vec1(1.0), n, [](const Vector&) { return 2.5; });
    RadialPairIntegrand f;
    f.kernel = [](double vx, double vy, double r) {
      const double d = vx - vy;
      return d * d / std::pow(r, 2.0);  // blows up if ever sampled at 0
    };
    f.carrier = &c;
    f.symmetric = true;
    f.vanish_on_equal = true;
    f.singular_diagonal = true;
    f.declared_exponent = -0.5;
    const Estimate e = double_integral(f, D, D, quick_spec(99, 2));
    CHECK(e.value == 0.0);
    CHECK(e.singular_bound == 0.0);
  }

  SUBCASE("carrier box must cover the domains") {
    const auto small = geometry::GridFunction::sample(
        D, vec1(0.0), vec1(0.5), n, [](const Vector&) { return 1.0; });
    RadialPairIntegrand f;
    f.kernel = [](double, double, double) { return 1.0; };
    f.carrier = &small;
    f.symmetric = true;
    CHECK_THROWS_AS(double_integral(f, D, D, quick_spec(8, 2)), Error);
  }
}

TEST_CASE("sampled decay exponent of a smooth profile difference") {
  // Hat profile, squared-difference kernel over r^{2s + 1} with s = 1/4:
  // the local decay is (1 - s) * 2 - 1 = 1/2.
  const auto D = unit_interval();
  const auto u = geometry::GridFunction::sample(
      D, vec1(0.0), vec1(1.0), 64, [](const Vector& x) {
        return std::max(0.0, 1.0 - 2.0 * std::abs(x[0] - 0.5));
      });
  RadialPairIntegrand f;
  const double s = 0.25;
  f.kernel = [s](double vx, double vy, double r) {
    if (vx == vy) return 0.0;
    const double d = std::abs(vx - vy) / std::pow(r, s);
    return d * d / r;
  };
  f.carrier = &u;
  f.symmetric = true;
  f.vanish_on_equal = true;
  f.singular_diagonal = true;
  f.declared_exponent = (1.0 - s) * 2.0 - 1.0;
  const Estimate e = double_integral(f, D, D, quick_spec(99, 2));
  CHECK(std::abs(e.fitted_exponent - 0.5) <= 0.2);
  CHECK(e.value > 0.0);
}

TEST_CASE("exterior integral of the quadratic fractional kernel") {
  // D = (-1, 1), anchor 0, amplitude 1, G = t^2, s = 1/2: the integrand
  // is |y|^{-2}, the annulus integral is 2 (1 - 1/R) and the analytic
  // tail is exactly 2 / R, so value + tail = 2 at any truncation.
  const auto D = geometry::make_interval(-1.0, 1.0);
  const auto Y = young::power(2.0);
  const auto K = young::KernelSpec::make_fractional(0.5, 1);

  SUBCASE("automatic truncation lands within one percent") {
    const Estimate e =
        exterior_tail_integral(vec1(0.0), Y, K, 1.0, D, quick_spec(16, 2));
    CHECK(e.value + e.tail_bound == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::abs(e.value - 2.0) <= e.error_bound);
    CHECK(e.tail_bound <= 0.0101 * e.value);
    CHECK(e.truncation_radius >= 8.0);
  }

  SUBCASE("a pinned truncation radius is honored") {
    auto spec = quick_spec(16, 2);
    spec.truncation_radius = 64.0;
    const Estimate e = exterior_tail_integral(vec1(0.0), Y, K, 1.0, D, spec);
    CHECK(e.truncation_radius == 64.0);
    CHECK(e.value == doctest::Approx(2.0 * (1.0 - 1.0 / 64.0)).epsilon(1e-9));
    CHECK(e.tail_bound == doctest::Approx(2.0 / 64.0).epsilon(1e-9));
  }

  SUBCASE("doubling the truncation radius stays inside the tail bound") {
    auto spec = quick_spec(16, 2);
    spec.truncation_radius = 64.0;
    const Estimate e1 = exterior_tail_integral(vec1(0.0), Y, K, 1.0, D, spec);
    spec.truncation_radius = 128.0;
    const Estimate e2 = exterior_tail_integral(vec1(0.0), Y, K, 1.0, D, spec);
    CHECK(std::abs(e2.value - e1.value) <= e1.tail_bound);
  }

  SUBCASE("a truncation radius under twice the circumradius is rejected") {
    auto spec = quick_spec(16, 2);
    spec.truncation_radius = 1.5;
    CHECK_THROWS_AS(exterior_tail_integral(vec1(0.0), Y, K, 1.0, D, spec),
                    Error);
  }

  SUBCASE("anchors on or outside the domain are rejected") {
    CHECK_THROWS_AS(
        exterior_tail_integral(vec1(0.99), Y, K, 1.0, D, quick_spec(16, 2)),
        OnBoundaryError);
    CHECK_THROWS_AS(
        exterior_tail_integral(vec1(3.0), Y, K, 1.0, D, quick_spec(16, 2)),
        OutsideDomainError);
  }

  SUBCASE("zero amplitude integrates to zero") {
    const Estimate e =
        exterior_tail_integral(vec1(0.0), Y, K, 0.0, D, quick_spec(16, 2));
    CHECK(e.value == 0.0);
    CHECK(e.error_bound == 0.0);
  }
}

TEST_CASE("weighted multi-anchor exterior sum matches the closed form") {
  // For D = (0, 1) and the quadratic fractional kernel at s = 1/2 the
  // exterior integral about x with amplitude a is a^2 (1/x + 1/(1 - x)).
  const auto D = unit_interval();
  const auto Y = young::power(2.0);
  const auto K = young::KernelSpec::make_fractional(0.5, 1);
  PointMatrix anchors(2, 1);
  anchors << 0.2, 0.5;
  Array amps(2), w(2);
  amps << 1.0, 2.0;
  w << 0.5, 0.25;
  const double exact = 0.5 * (1.0 / 0.2 + 1.0 / 0.8) + 0.25 * 4.0 * (2.0 + 2.0);
  const Estimate e = exterior_sum(anchors, amps, w,
                                  seminorm_exterior_integrand(Y, K, 1), D,
                                  quick_spec(64, 3));
  CHECK(std::abs(e.value - exact) <= e.error_bound);
  CHECK(std::abs(e.value - exact) < 0.015 * exact);
}

TEST_CASE("general kernel tail bound falls back to numerics") {
  // M(r) = r^{1/2}, Nker(r) = r reproduces the fractional kernel, so the
  // numeric bound must cover (and roughly track) the closed form.
  const auto Y = young::power(2.0);
  const auto frac = young::KernelSpec::make_fractional(0.5, 1);
  const auto gen = young::KernelSpec::general(
      [](double r) { return std::sqrt(r); }, [](double r) { return r; });
  const auto fi = seminorm_exterior_integrand(Y, frac, 1);
  const auto gi = seminorm_exterior_integrand(Y, gen, 1);
  for (double R : {2.0, 8.0, 32.0}) {
    const double closed = fi.tail_bound(1.0, R);
    const double numeric = gi.tail_bound(1.0, R);
    CHECK(numeric >= closed * (1.0 - 1e-6));
    CHECK(numeric <= closed * 1.5);
  }
}

TEST_CASE("radial comparison separates a shifted interval from its ball") {
  CubatureSpec spec = quick_spec(64, 3);

  SUBCASE("exponential profile, interval (1, 3)") {
    const auto D = geometry::make_interval(1.0, 3.0);
    const RadialComparison rc = radial_comparison_check(
        [](double r) { return std::exp(-r); }, D, spec);
    const double dom_int = std::exp(-1.0) - std::exp(-3.0);
    const double ball_int = 2.0 * (1.0 - std::exp(-1.0));
    CHECK(rc.domain_interior.value == doctest::Approx(dom_int).epsilon(0.01));
    CHECK(rc.ball_interior.value == doctest::Approx(ball_int).epsilon(0.01));
    CHECK(rc.domain_exterior.value ==
          doctest::Approx(2.0 - dom_int).epsilon(0.01));
    CHECK(rc.ball_exterior.value ==
          doctest::Approx(2.0 - ball_int).epsilon(0.01));
    CHECK(rc.interior_strict);
    CHECK(rc.exterior_strict);
    CHECK_FALSE(rc.indistinguishable);
  }

  SUBCASE("rational profile, interval (0, 2)") {
    const auto D = geometry::make_interval(0.0, 2.0);
    const RadialComparison rc = radial_comparison_check(
        [](double r) { return std::pow(1.0 + r, -2.0); }, D, spec);
    CHECK(rc.domain_interior.value == doctest::Approx(2.0 / 3.0).epsilon(0.01));
    CHECK(rc.ball_interior.value == doctest::Approx(1.0).epsilon(0.01));
    CHECK(rc.domain_exterior.value ==
          doctest::Approx(4.0 / 3.0).epsilon(0.015));
    CHECK(rc.ball_exterior.value == doctest::Approx(1.0).epsilon(0.015));
    CHECK(rc.interior_strict);
    CHECK(rc.exterior_strict);
    CHECK_FALSE(rc.indistinguishable);
  }

  SUBCASE("an already centered ball is rejected") {
    const auto B = geometry::make_interval(-1.0, 1.0);
    CHECK_THROWS_AS(radial_comparison_check(
                        [](double r) { return std::exp(-r); }, B, spec),
                    Error);
  }

  SUBCASE("a non-decreasing profile is rejected") {
    const auto D = geometry::make_interval(1.0, 3.0);
    CHECK_THROWS_AS(
        radial_comparison_check([](double r) { return r; }, D, spec), Error);
  }
}
