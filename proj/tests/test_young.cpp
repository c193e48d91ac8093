#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orlicz/young.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace orlicz;
using namespace orlicz::young;

namespace {

std::vector<YoungFunction> catalog() {
  return {power(2.0),          power(3.0),           power_log(3.0),
          power_over_log(2.0), power_over_log(3.0),  double_phase(2.0, 3.0),
          double_phase(3.0, 5.0)};
}

// Brute-force conjugate: dense grid search over w in (0, w_hi], coarse pass
// then a fine pass around the best point.
double conjugate_grid_oracle(const YoungFunction& Y, double t,
                             double w_hi = 10.0) {
  auto phi = [&](double w) { return t * w - Y.G(w); };
  double best_w = 1e-3, best = phi(best_w);
  for (double w = 1e-3; w <= w_hi; w += 1e-3) {
    const double v = phi(w);
    if (v > best) {
      best = v;
      best_w = w;
    }
  }
  for (double w = std::max(1e-7, best_w - 2e-3); w <= best_w + 2e-3;
       w += 1e-7) {
    best = std::max(best, phi(w));
  }
  return best;
}

}  // namespace

TEST_CASE("catalog passes structural validation") {
  for (const auto& Y : catalog()) {
    CAPTURE(Y.name);
    CHECK_NOTHROW(validate(Y));
  }
  CHECK_THROWS_AS(power(1.5), NonYoungError);
  CHECK_THROWS_AS(power_log(2.5), NonYoungError);
  CHECK_THROWS_AS(double_phase(3.0, 2.0), NonYoungError);
}

TEST_CASE("exponent bounds match declared values") {
  const Array grid = log_space(1e-4, 1e4, 161);

  auto [lo2, hi2] = exponent_bounds(power(2.0), grid);
  CHECK(lo2 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(hi2 == doctest::Approx(2.0).epsilon(1e-12));

  auto [lo, hi] = exponent_bounds(double_phase(2.0, 3.0), grid);
  CHECK(lo == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(hi == doctest::Approx(3.0).epsilon(1e-2));

  // Homogeneous cubic given directly, not via the catalog.
  YoungFunction cubic;
  cubic.G = [](double t) { return t * t * t / 3.0; };
  cubic.g = [](double t) { return t * t; };
  cubic.p_minus = cubic.p_plus = 3.0;
  cubic.name = "cubic/3";
  auto [lo3, hi3] = exponent_bounds(cubic, log_space(1e-2, 1e2, 81));
  CHECK(lo3 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(hi3 == doctest::Approx(3.0).epsilon(1e-12));

  for (const auto& Y : catalog()) {
    CAPTURE(Y.name);
    auto [plo, phi] = exponent_bounds(Y, default_t_grid());
    CHECK(plo >= Y.p_minus - 1e-2);
    CHECK(phi <= Y.p_plus + 1e-2);
    CHECK(plo <= Y.p_minus + 1e-2);   // sampled inf approaches declared
    CHECK(phi >= Y.p_plus - 1e-2);
  }
}

TEST_CASE("complementary function") {
  const auto sq = power(2.0);
  CHECK(complementary(sq, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(complementary(sq, 0.0) == 0.0);

  // Numeric maximization against the closed form, bypassing the shortcut.
  YoungFunction sq_numeric = sq;
  sq_numeric.complementary_closed_form = nullptr;
  for (double t : {0.3, 1.0, 2.0, 7.5}) {
    CHECK(complementary(sq_numeric, t) ==
          doctest::Approx(complementary(sq, t)).epsilon(1e-10));
  }

  const auto dp = double_phase(2.0, 3.0);
  const double oracle = conjugate_grid_oracle(dp, 3.0);
  CHECK(complementary(dp, 3.0) == doctest::Approx(oracle).epsilon(1e-6));

  YoungFunction linear;
  linear.G = [](double t) { return t; };
  linear.g = [](double) { return 1.0; };
  linear.p_minus = 1.5;  // deliberately wrong; not validated here
  linear.p_plus = 1.5;
  linear.name = "linear";
  CHECK_THROWS_AS(complementary(linear, 2.0), MaximizerDivergedError);
}

TEST_CASE("legendre identity residual") {
  const auto sq = power(2.0);
  CHECK(legendre_identity_residual(sq, 1.0) <= 1e-12);

  YoungFunction cubic;
  cubic.G = [](double t) { return t * t * t / 3.0; };
  cubic.g = [](double t) { return t * t; };
  cubic.p_minus = cubic.p_plus = 3.0;
  cubic.name = "cubic/3";
  // Conjugate is (2/3) u^{3/2}: at t=2, g=4, conj(4)=16/3, t g - G = 16/3.
  CHECK(complementary(cubic, 4.0) ==
        doctest::Approx(16.0 / 3.0).epsilon(1e-10));
  CHECK(legendre_identity_residual(cubic, 2.0) <= 1e-8);

  CHECK(legendre_identity_residual(double_phase(2.0, 3.0), 0.7) <= 1e-6);

  for (const auto& Y : catalog()) {
    CAPTURE(Y.name);
    const Array ts = log_space(1e-2, 1e1, 100);
    for (int i = 0; i < ts.size(); ++i) {
      CAPTURE(ts[i]);
      CHECK(legendre_identity_residual(Y, ts[i]) <= 1e-6);
    }
  }
}

TEST_CASE("doubling constant") {
  const Array grid = default_t_grid();
  CHECK(delta2_constant(power(2.0), grid) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(delta2_constant(power(3.0), grid) ==
        doctest::Approx(8.0).epsilon(1e-12));
  const double dp = delta2_constant(double_phase(2.0, 3.0), grid);
  CHECK(dp > 4.0);
  CHECK(dp <= 8.0 + 1e-9);
  for (const auto& Y : catalog()) {
    CAPTURE(Y.name);
    CHECK(delta2_constant(Y, grid) <= std::pow(2.0, Y.p_plus) + 1e-9);
  }
}

TEST_CASE("two-sided scaling bounds") {
  const auto sq = power(2.0);
  CHECK(two_sided_scaling_check(sq, 3.0, 2.0));
  CHECK(two_sided_scaling_check(sq, 0.0, 5.0));
  CHECK(two_sided_scaling_check(double_phase(2.0, 3.0), 0.5, 1.0));

  std::mt19937_64 rng(20240817);
  std::uniform_real_distribution<double> log_ab(-3.0, 3.0);
  for (const auto& Y : catalog()) {
    CAPTURE(Y.name);
    for (int k = 0; k < 200; ++k) {
      const double a = std::pow(10.0, log_ab(rng));
      const double b = std::pow(10.0, log_ab(rng));
      CAPTURE(a);
      CAPTURE(b);
      CHECK(two_sided_scaling_check(Y, a, b));
    }
  }
}

TEST_CASE("young inequality holds on random pairs") {
  std::mt19937_64 rng(911);
  std::uniform_real_distribution<double> log_ab(-3.0, 3.0);
  for (const auto& Y : catalog()) {
    CAPTURE(Y.name);
    int violations = 0;
    for (int k = 0; k < 1000; ++k) {
      const double a = std::pow(10.0, log_ab(rng));
      const double b = std::pow(10.0, log_ab(rng));
      const double lhs = a * b;
      const double rhs = Y.G(a) + complementary(Y, b);
      if (lhs > rhs * (1.0 + 1e-9) + 1e-12) ++violations;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("conjugate exponent sandwich") {
  for (const auto& Y : catalog()) {
    CAPTURE(Y.name);
    const double conj_plus = Y.p_plus / (Y.p_plus - 1.0);
    const double conj_minus = Y.p_minus / (Y.p_minus - 1.0);
    const Array ts = log_space(1e-2, 1e2, 25);
    for (int i = 0; i < ts.size(); ++i) {
      const double t = ts[i];
      const double ratio =
          t * complementary_density(Y, t) / complementary(Y, t);
      CAPTURE(t);
      CHECK(ratio >= conj_plus - 1e-4 * conj_plus);
      CHECK(ratio <= conj_minus + 1e-4 * conj_minus);
    }
  }
}

TEST_CASE("convexity in midpoint form") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> log_t(-5.0, 5.0);
  for (const auto& Y : catalog()) {
    CAPTURE(Y.name);
    for (int k = 0; k < 300; ++k) {
      double t1 = std::pow(10.0, log_t(rng));
      double t2 = std::pow(10.0, log_t(rng));
      if (t1 > t2) std::swap(t1, t2);
      for (double th : {0.25, 0.5, 0.75}) {
        const double mix = Y.G(th * t1 + (1.0 - th) * t2);
        const double chord = th * Y.G(t1) + (1.0 - th) * Y.G(t2);
        CHECK(mix <= chord * (1.0 + 1e-12) + 1e-300);
      }
    }
  }
}

TEST_CASE("beta: homogeneity oracle and grid stability") {
  const Array tg = default_t_grid();
  CHECK(beta(power(2.0), 0.75, 1e-3, tg) ==
        doctest::Approx(1e-2).epsilon(1e-8));
  CHECK(beta(power(2.0), 0.5, 0.1, tg) == doctest::Approx(1.0).epsilon(1e-8));

  for (double p : {2.0, 3.0}) {
    const auto Y = power(p);
    for (double s : {0.3, 0.5, 0.75}) {
      const Array lambdas = log_space(1e-4, 1e4, 17);
      for (int i = 0; i < lambdas.size(); ++i) {
        const double l = lambdas[i];
        const double expect = std::pow(l, p - 1.0 / s);
        CAPTURE(p);
        CAPTURE(s);
        CAPTURE(l);
        CHECK(beta(Y, s, l, tg) ==
              doctest::Approx(expect).epsilon(1e-8));
      }
    }
  }

  // Non-homogeneous entry: sampled sup stable against a 10x finer grid.
  const auto dp = double_phase(2.0, 3.0);
  const double coarse = beta(dp, 0.8, 0.1, log_space(1e-6, 1e6, 241));
  const double fine = beta(dp, 0.8, 0.1, log_space(1e-6, 1e6, 2401));
  CHECK(coarse == doctest::Approx(fine).epsilon(1e-4));
}

TEST_CASE("case classifier") {
  const auto decision = [](const YoungFunction& Y, double s, int dim,
                           int case_id) {
    return classify_growth_case(Y, s, dim, case_id).verdict;
  };
  CHECK(decision(power(2.0), 0.5, 1, 1) == Verdict::False);
  CHECK(decision(power(2.0), 0.75, 1, 1) == Verdict::True);
  CHECK(decision(power(2.0), 0.8, 2, 3) == Verdict::True);
  // Case 2 reduces to "either end decays"; beta == 1 decays at neither.
  CHECK(decision(power(2.0), 0.5, 1, 2) == Verdict::False);
  CHECK(decision(power(2.0), 0.75, 1, 2) == Verdict::True);
  CHECK_THROWS_AS(classify_growth_case(power(2.0), 0.5, 1, 4), Error);
}

TEST_CASE("kernel condition report") {
  const auto frac = KernelSpec::make_fractional(0.5, 1);
  const auto rep = kernel_conditions_check(frac, 2.0, 1);
  CHECK(rep.monotone_positive);
  CHECK(rep.lower_bound);
  CHECK(rep.integrable);
  // r^{N-1+p-} / (r^N r^{s p-}) = r^0 near zero; tail integrand r^{-2}.
  CHECK(rep.integral_near_zero == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(rep.integral_tail == doctest::Approx(1.0).epsilon(1e-2));

  const auto flat = KernelSpec::general([](double) { return 1.0; },
                                        [](double t) { return t; });
  const auto rep_flat = kernel_conditions_check(flat, 2.0, 1);
  CHECK(rep_flat.monotone_positive);
  CHECK(rep_flat.lower_bound);
  CHECK_FALSE(rep_flat.tail_convergent);  // tail integrand is r^{-1}
  CHECK_FALSE(rep_flat.integrable);

  const auto ramp = KernelSpec::general(
      [](double t) { return t; }, [](double t) { return t * t; });
  CHECK(kernel_conditions_check(ramp, 2.0, 2).lower_bound);

  const auto weak = KernelSpec::general(
      [](double t) { return 0.5 * std::min(1.0, t); },
      [](double t) { return t; });
  CHECK_FALSE(kernel_conditions_check(weak, 2.0, 1).lower_bound);
}

TEST_CASE("tabulated young function") {
  std::vector<double> ts, Gs;
  const Array nodes = log_space(1e-2, 1e2, 200);
  for (int i = 0; i < nodes.size(); ++i) {
    ts.push_back(nodes[i]);
    Gs.push_back(nodes[i] * nodes[i]);
  }
  const auto Y = from_table(ts, Gs);
  CHECK_NOTHROW(validate(Y));
  auto [lo, hi] = exponent_bounds(Y, log_space(1e-2, 1e2, 101));
  CHECK(lo == doctest::Approx(2.0).epsilon(2e-2));
  CHECK(hi == doctest::Approx(2.0).epsilon(2e-2));
  CHECK(complementary(Y, 2.0) == doctest::Approx(1.0).epsilon(1e-3));

  CHECK_THROWS_AS(from_table({1.0, 2.0}, {1.0, 4.0}), NonYoungError);
}
