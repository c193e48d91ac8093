#pragma once

#include "orlicz/common.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace orlicz::young {

// A Young function G(t) = \int_0^t g with its density and growth exponents
// 1 < p_minus <= t g(t)/G(t) <= p_plus < inf. The exponents are declared at
// construction (closed-form where known) and cross-validated by sampling;
// sampled estimates never redefine them.
struct YoungFunction {
  std::function<double(double)> G;
  std::function<double(double)> g;
  double p_minus = 0.0;
  double p_plus = 0.0;
  // Closed-form Legendre conjugate sup_w (t w - G(w)) when available.
  std::function<double(double)> complementary_closed_form;
  std::string name;
};

// Built-in catalog. Parameter ranges keep the strict growth condition
// 1 < p_minus and density monotonicity intact.
YoungFunction power(double p);               // t^p, p >= 2
YoungFunction power_log(double p);           // t^p (1 + |log t|), p >= 3
YoungFunction power_over_log(double p);      // t^p / log(e + t), p >= 2
YoungFunction double_phase(double q, double p);  // t^q + t^p, p > q >= 2

// Monotone-cubic interpolation of tabulated (t, G(t)) pairs, power-law
// extended beyond the table. The density is a central finite difference
// with step 1e-6 * max(t, 1). Exponents may be declared; otherwise they are
// sampled estimates widened by a 1% guard band.
YoungFunction from_table(const std::vector<double>& t,
                         const std::vector<double>& G,
                         std::optional<double> p_minus = std::nullopt,
                         std::optional<double> p_plus = std::nullopt);

// Checks the structural invariants (zero at zero, monotone, convex, density
// consistency, exponent sandwich) on sampled grids; throws NonYoungError.
void validate(const YoungFunction& Y);

// (inf, sup) of t g(t)/G(t) over the grid, with one local refinement round.
std::pair<double, double> exponent_bounds(const YoungFunction& Y,
                                          const Array& t_grid);

// Legendre conjugate sup_{w>0} (t w - G(w)); bracketed bisection on
// g(w) = t when no closed form is attached.
double complementary(const YoungFunction& Y, double t);

// d/dt of the computed conjugate, by central finite differences.
double complementary_density(const YoungFunction& Y, double t);

// |conj(g(t)) - (t g(t) - G(t))|; small for exact conjugate pairs.
double legendre_identity_residual(const YoungFunction& Y, double t);

// sup over the grid of G(2t)/G(t); bounded by 2^p_plus.
double delta2_constant(const YoungFunction& Y, const Array& t_grid);

// min{a^p-, a^p+} G(b) <= G(ab) <= max{a^p-, a^p+} G(b), within 1e-10
// relative slack.
bool two_sided_scaling_check(const YoungFunction& Y, double a, double b);

// sup over the grid of G(lambda t) / (lambda^{1/s} G(t)). May legitimately
// be +inf (overflow of the numerator); callers must handle it.
double beta(const YoungFunction& Y, double s, double lambda,
            const Array& t_grid);

enum class Verdict { True, False, Inconclusive };

// Summary of one probed limit: values of the probed quantity along a
// geometric sequence approaching the limit.
struct LimitEstimate {
  std::string quantity;   // what was probed, human readable
  Verdict verdict = Verdict::Inconclusive;
  double first = 0.0;     // value at the start of the approach
  double last = 0.0;      // value closest to the limit
  bool monotone = false;  // nonincreasing along the approach
};

struct CaseDecision {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<LimitEstimate> probes;
};

// Decides the growth-case hypotheses of the comparison bound from decay
// of beta:
//   case 1: beta(l) -> 0 as l -> 0
//   case 2: beta -> 0 at 0 or at inf
//   case 3: (l^{(1-N)/s} beta -> 0 at inf AND beta -> 0 at 0)
//           OR l^{(1-N)/s} beta -> 0 at 0 OR beta -> 0 at inf.
// A limit counts as 0 when the probed sequence is nonincreasing toward the
// limit and its last value is below 1e-3 times its first; non-monotone
// sequences are Inconclusive, never guessed.
CaseDecision classify_growth_case(const YoungFunction& Y, double s, int dim,
                                    int case_id,
                                    const Array& lambda_probe = Array());

// Kernel pair (M, N) of the general seminorm, with the fractional
// specialization M(t) = t^s, N(t) = t^dim marked explicitly.
struct KernelSpec {
  std::function<double(double)> M;
  std::function<double(double)> Nker;
  struct Fractional {
    double s;
    int dim;
  };
  std::optional<Fractional> fractional;

  static KernelSpec make_fractional(double s, int dim);
  static KernelSpec general(std::function<double(double)> M,
                            std::function<double(double)> Nker);
};

struct KernelConditionReport {
  bool monotone_positive = false;  // both kernels nondecreasing, positive
  bool lower_bound = false;        // M(r) >= min{1, r}
  bool integrable = false;         // both growth integrals finite
  double integral_near_zero = 0.0;  // int_0^1 r^{N-1+p-} / (Nker M^p-) dr
  double integral_tail = 0.0;       // int_1^inf r^{N-1} / (Nker M^p-) dr
  bool tail_convergent = true;  // false when the fitted tail exponent >= -1
};

// Samples (m1)-(m2) and integrates (m3) with power-law endpoint/tail
// extrapolation. A divergent tail is a false verdict, not an exception;
// kernel evaluation failures propagate.
KernelConditionReport kernel_conditions_check(const KernelSpec& K,
                                              double p_minus, int dim);

// Default grids used by the CLI and tests.
Array default_t_grid();       // 1e-6 .. 1e6, log spaced
Array default_lambda_probe(); // 1e-12 .. 1e12, geometric

}  // namespace orlicz::young
