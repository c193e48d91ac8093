#include "orlicz/young.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace orlicz::young {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

// Golden-section maximization of f over [a, b] (unimodal assumed).
template <class F>
double golden_max_arg(F&& f, double a, double b, int iters = 200) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && (b - a) > 1e-14 * (1.0 + std::abs(a)); ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

YoungFunction power(double p) {
  if (!(p >= 2.0)) throw NonYoungError("power: requires p >= 2");
  YoungFunction Y;
  Y.G = [p](double t) { return std::pow(t, p); };
  Y.g = [p](double t) { return t <= 0.0 ? 0.0 : p * std::pow(t, p - 1.0); };
  Y.p_minus = p;
  Y.p_plus = p;
  // sup_w (t w - w^p) at w = (t/p)^{1/(p-1)}.
  Y.complementary_closed_form = [p](double t) {
    return t <= 0.0 ? 0.0
                    : (p - 1.0) * std::pow(t / p, p / (p - 1.0));
  };
  Y.name = "power(p=" + fmt(p) + ")";
  return Y;
}

YoungFunction power_log(double p) {
  // The density t^{p-1}(p(1 - log t) - 1) on (0,1) is monotone only for
  // p^2 - 3p + 1 >= 0, and the lower exponent p - 1 must exceed 1.
  if (!(p >= 3.0)) throw NonYoungError("power_log: requires p >= 3");
  YoungFunction Y;
  Y.G = [p](double t) {
    return t <= 0.0 ? 0.0 : std::pow(t, p) * (1.0 + std::abs(std::log(t)));
  };
  Y.g = [p](double t) {
    if (t <= 0.0) return 0.0;
    const double lt = std::log(t);
    return t < 1.0 ? std::pow(t, p - 1.0) * (p * (1.0 - lt) - 1.0)
                   : std::pow(t, p - 1.0) * (p * (1.0 + lt) + 1.0);
  };
  Y.p_minus = p - 1.0;
  Y.p_plus = p + 1.0;
  Y.name = "power_log(p=" + fmt(p) + ")";
  return Y;
}

YoungFunction power_over_log(double p) {
  if (!(p >= 2.0)) throw NonYoungError("power_over_log: requires p >= 2");
  // t g / G = p - q(t) with q(t) = t / ((e + t) log(e + t)); q vanishes at
  // both ends, so p_minus = p - max q, p_plus = p (limits at 0 and inf).
  auto q = [](double t) {
    return t / ((std::numbers::e + t) * std::log(std::numbers::e + t));
  };
  const GridExtremum coarse = grid_sup(q, log_space(1e-8, 1e8, 2001));
  const double t_star =
      golden_max_arg(q, coarse.arg * 0.5, coarse.arg * 2.0);
  const double q_max = q(t_star);

  YoungFunction Y;
  Y.G = [p](double t) {
    return t <= 0.0 ? 0.0 : std::pow(t, p) / std::log(std::numbers::e + t);
  };
  Y.g = [p, q](double t) {
    if (t <= 0.0) return 0.0;
    return std::pow(t, p - 1.0) * (p - q(t)) / std::log(std::numbers::e + t);
  };
  Y.p_minus = p - q_max;
  Y.p_plus = p;
  Y.name = "power_over_log(p=" + fmt(p) + ")";
  return Y;
}

YoungFunction double_phase(double q, double p) {
  if (!(p > q && q >= 2.0))
    throw NonYoungError("double_phase: requires p > q >= 2");
  YoungFunction Y;
  Y.G = [q, p](double t) { return std::pow(t, q) + std::pow(t, p); };
  Y.g = [q, p](double t) {
    return t <= 0.0 ? 0.0
                    : q * std::pow(t, q - 1.0) + p * std::pow(t, p - 1.0);
  };
  Y.p_minus = q;
  Y.p_plus = p;
  Y.name = "double_phase(q=" + fmt(q) + ",p=" + fmt(p) + ")";
  return Y;
}

namespace {

// Fritsch-Carlson monotone cubic through strictly increasing data.
struct MonotoneCubic {
  std::vector<double> x, y, m;  // nodes, values, node slopes

  MonotoneCubic(std::vector<double> xs, std::vector<double> ys)
      : x(std::move(xs)), y(std::move(ys)) {
    const std::size_t n = x.size();
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
      d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    m.resize(n);
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
      m[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (d[i] == 0.0) {
        m[i] = m[i + 1] = 0.0;
        continue;
      }
      const double a = m[i] / d[i], b = m[i + 1] / d[i];
      const double s = a * a + b * b;
      if (s > 9.0) {
        const double tau = 3.0 / std::sqrt(s);
        m[i] = tau * a * d[i];
        m[i + 1] = tau * b * d[i];
      }
    }
  }

  double operator()(double t) const {
    const std::size_t n = x.size();
    std::size_t i =
        std::upper_bound(x.begin(), x.end(), t) - x.begin();
    i = std::min(std::max<std::size_t>(i, 1), n - 1) - 1;
    const double h = x[i + 1] - x[i];
    const double u = (t - x[i]) / h;
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y[i] + (u3 - 2 * u2 + u) * h * m[i] +
           (-2 * u3 + 3 * u2) * y[i + 1] + (u3 - u2) * h * m[i + 1];
  }
};

}  // namespace

YoungFunction from_table(const std::vector<double>& t,
                         const std::vector<double>& G,
                         std::optional<double> p_minus,
                         std::optional<double> p_plus) {
  if (t.size() < 4 || t.size() != G.size())
    throw NonYoungError("from_table: need >= 4 matched (t, G) rows");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] <= 0.0 || G[i] <= 0.0)
      throw NonYoungError("from_table: nodes must be positive");
    if (i > 0 && (t[i] <= t[i - 1] || G[i] <= G[i - 1]))
      throw NonYoungError("from_table: nodes must be strictly increasing");
  }
  auto cubic = std::make_shared<MonotoneCubic>(t, G);
  const double t_lo = t.front(), t_hi = t.back();
  const double G_lo = G.front(), G_hi = G.back();
  // Local log-log slopes at the table ends drive the power-law extension.
  const double r_lo = std::log(G[1] / G[0]) / std::log(t[1] / t[0]);
  const std::size_t n = t.size();
  const double r_hi =
      std::log(G[n - 1] / G[n - 2]) / std::log(t[n - 1] / t[n - 2]);

  YoungFunction Y;
  Y.G = [cubic, t_lo, t_hi, G_lo, G_hi, r_lo, r_hi](double u) {
    if (u <= 0.0) return 0.0;
    if (u < t_lo) return G_lo * std::pow(u / t_lo, r_lo);
    if (u > t_hi) return G_hi * std::pow(u / t_hi, r_hi);
    return (*cubic)(u);
  };
  auto Gfn = Y.G;
  Y.g = [Gfn](double u) {
    if (u <= 0.0) return 0.0;
    const double h = 1e-6 * std::max(u, 1.0);
    const double lo = std::max(u - h, 0.0);
    return (Gfn(u + h) - Gfn(lo)) / (u + h - lo);
  };
  if (p_minus && p_plus) {
    Y.p_minus = *p_minus;
    Y.p_plus = *p_plus;
  } else {
    // Sampled estimates over the table span, widened by a guard band.
    Array grid = log_space(t_lo, t_hi, 512);
    auto ratio = [&Y](double u) { return u * Y.g(u) / Y.G(u); };
    const double lo = grid_inf(ratio, grid).value;
    const double hi = grid_sup(ratio, grid).value;
    Y.p_minus = p_minus.value_or(lo * 0.99);
    Y.p_plus = p_plus.value_or(hi * 1.01);
  }
  Y.name = "table(" + fmt(double(t.size())) + " rows)";
  return Y;
}

void validate(const YoungFunction& Y) {
  if (!Y.G || !Y.g) throw NonYoungError(Y.name + ": missing G or g");
  if (!(Y.p_minus > 1.0) || !(Y.p_plus >= Y.p_minus) ||
      !std::isfinite(Y.p_plus))
    throw NonYoungError(Y.name + ": exponents need 1 < p- <= p+ < inf");
  if (std::abs(Y.G(0.0)) > 1e-300)
    throw NonYoungError(Y.name + ": G(0) != 0");
  if (std::abs(Y.g(0.0)) > 1e-300)
    throw NonYoungError(Y.name + ": g(0) != 0");

  const Array grid = log_space(1e-6, 1e6, 181);
  double prev_G = 0.0, prev_g = 0.0;
  const double tol = 1e-9;
  for (int i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const double Gt = Y.G(t), gt = Y.g(t);
    if (!(Gt > prev_G * (1.0 - tol)) || !(Gt > 0.0))
      throw NonYoungError(Y.name + ": G not strictly increasing at t=" +
                          fmt(t));
    if (gt <= 0.0 || gt < prev_g * (1.0 - tol))
      throw NonYoungError(Y.name + ": density not positive nondecreasing" +
                          " at t=" + fmt(t));
    const double ratio = t * gt / Gt;
    if (ratio < Y.p_minus - 1e-6 || ratio > Y.p_plus + 1e-6)
      throw NonYoungError(Y.name + ": t g/G = " + fmt(ratio) +
                          " escapes [p-, p+] at t=" + fmt(t));
    prev_G = Gt;
    prev_g = gt;
  }
  // Convexity, midpoint form, on a sparser subgrid.
  for (int i = 0; i + 8 < grid.size(); i += 8) {
    const double t1 = grid[i], t2 = grid[i + 8];
    const double mid = Y.G(0.5 * (t1 + t2));
    const double chord = 0.5 * (Y.G(t1) + Y.G(t2));
    if (mid > chord * (1.0 + 1e-9))
      throw NonYoungError(Y.name + ": convexity fails near t=" + fmt(t1));
  }
  // G consistent with its density.
  for (double t : {0.5, 1.7, 3.0}) {
    const double integral = adaptive_simpson(Y.g, 0.0, t, 1e-12, 48);
    if (std::abs(integral - Y.G(t)) > 1e-5 * (1.0 + Y.G(t)))
      throw NonYoungError(Y.name + ": G(t) != int_0^t g at t=" + fmt(t));
  }
}

std::pair<double, double> exponent_bounds(const YoungFunction& Y,
                                          const Array& t_grid) {
  if (t_grid.size() < 2 || t_grid.minCoeff() <= 0.0)
    throw Error("exponent_bounds: need a positive grid");
  auto ratio = [&Y](double t) {
    const double Gt = Y.G(t);
    if (!(Gt > 0.0))
      throw NonYoungError(Y.name + ": G(t) = 0 at t=" + fmt(t));
    return t * Y.g(t) / Gt;
  };
  const double lo = grid_inf(ratio, t_grid).value;
  const double hi = grid_sup(ratio, t_grid).value;
  if (lo <= 1.0)
    throw NonYoungError(Y.name + ": sampled t g/G <= 1 (got " + fmt(lo) +
                        ")");
  return {lo, hi};
}

double complementary(const YoungFunction& Y, double t) {
  if (t < 0.0) throw Error("complementary: t must be >= 0");
  if (t == 0.0) return 0.0;
  if (Y.complementary_closed_form) return Y.complementary_closed_form(t);
  // Maximizer solves g(w) = t; g is nondecreasing with g(0) = 0.
  double hi = 1.0;
  while (Y.g(hi) < t) {
    hi *= 2.0;
    if (hi > 1e13)
      throw MaximizerDivergedError(
          Y.name + ": sup_w (t w - G(w)) not attained below w = 1e13");
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && (hi - lo) > 1e-16 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (Y.g(mid) < t ? lo : hi) = mid;
  }
  const double w = 0.5 * (lo + hi);
  return std::max(0.0, t * w - Y.G(w));
}

double complementary_density(const YoungFunction& Y, double t) {
  const double h = 1e-6 * std::max(t, 1.0);
  const double lo = std::max(t - h, 0.0);
  return (complementary(Y, t + h) - complementary(Y, lo)) / (t + h - lo);
}

double legendre_identity_residual(const YoungFunction& Y, double t) {
  if (!(t > 0.0)) throw Error("legendre_identity_residual: t must be > 0");
  const double gt = Y.g(t);
  return std::abs(complementary(Y, gt) - (t * gt - Y.G(t)));
}

double delta2_constant(const YoungFunction& Y, const Array& t_grid) {
  if (t_grid.size() < 2 || t_grid.minCoeff() <= 0.0)
    throw Error("delta2_constant: need a positive grid");
  auto doubling = [&Y](double t) {
    const double Gt = Y.G(t);
    if (!(Gt > 0.0))
      throw NonYoungError(Y.name + ": G(t) = 0 at t=" + fmt(t));
    return Y.G(2.0 * t) / Gt;
  };
  return grid_sup(doubling, t_grid).value;
}

bool two_sided_scaling_check(const YoungFunction& Y, double a, double b) {
  if (a < 0.0 || b < 0.0) throw Error("two_sided_scaling_check: a, b >= 0");
  if (a == 0.0 || b == 0.0) return true;  // every side vanishes
  const double Gb = Y.G(b);
  const double lo = std::min(std::pow(a, Y.p_minus), std::pow(a, Y.p_plus));
  const double hi = std::max(std::pow(a, Y.p_minus), std::pow(a, Y.p_plus));
  const double v = Y.G(a * b);
  const double slack = 1e-10 * std::max({1.0, v, hi * Gb});
  return lo * Gb <= v + slack && v <= hi * Gb + slack;
}

double beta(const YoungFunction& Y, double s, double lambda,
            const Array& t_grid) {
  if (!(s > 0.0 && s < 1.0)) throw Error("beta: s must lie in (0,1)");
  if (!(lambda > 0.0)) throw Error("beta: lambda must be > 0");
  const Array& grid = t_grid.size() ? t_grid : default_t_grid();
  const double scale = std::pow(lambda, 1.0 / s);
  auto quotient = [&](double t) {
    const double denom = scale * Y.G(t);
    if (!(denom > 0.0)) return kInf;
    return Y.G(lambda * t) / denom;
  };
  const double v = grid_sup(quotient, grid).value;
  return std::isfinite(v) ? v : kInf;  // unbounded beta is legitimate
}

namespace {

// Decides whether a probed quantity tends to 0 along a directed approach.
LimitEstimate probe_limit(const std::string& label,
                          const std::function<double(double)>& f,
                          const Array& lambdas_toward_limit) {
  LimitEstimate est;
  est.quantity = label;
  const Eigen::Index n = lambdas_toward_limit.size();
  Array vals(n);
  for (Eigen::Index i = 0; i < n; ++i) vals[i] = f(lambdas_toward_limit[i]);
  est.first = vals[0];
  est.last = vals[n - 1];
  est.monotone = true;
  for (Eigen::Index i = 1; i < n; ++i)
    if (vals[i] > vals[i - 1] * (1.0 + 1e-9)) est.monotone = false;
  if (!est.monotone || !std::isfinite(est.first) ||
      !std::isfinite(est.last)) {
    est.verdict = Verdict::Inconclusive;
  } else {
    est.verdict = (est.last < 1e-3 * est.first) ? Verdict::True
                                                : Verdict::False;
  }
  return est;
}

Verdict verdict_or(std::initializer_list<Verdict> vs) {
  bool inconclusive = false;
  for (Verdict v : vs) {
    if (v == Verdict::True) return Verdict::True;
    if (v == Verdict::Inconclusive) inconclusive = true;
  }
  return inconclusive ? Verdict::Inconclusive : Verdict::False;
}

Verdict verdict_and(std::initializer_list<Verdict> vs) {
  bool inconclusive = false;
  for (Verdict v : vs) {
    if (v == Verdict::False) return Verdict::False;
    if (v == Verdict::Inconclusive) inconclusive = true;
  }
  return inconclusive ? Verdict::Inconclusive : Verdict::True;
}

}  // namespace

CaseDecision classify_growth_case(const YoungFunction& Y, double s, int dim,
                                    int case_id, const Array& lambda_probe) {
  if (case_id < 1 || case_id > 3)
    throw Error("classify_growth_case: case_id must be 1, 2 or 3");
  if (dim < 1) throw Error("classify_growth_case: dim >= 1");
  const Array probe =
      lambda_probe.size() ? lambda_probe : default_lambda_probe();
  if (probe.size() < 2 || probe.minCoeff() <= 0.0)
    throw Error("classify_growth_case: invalid probe");

  Array ascending = probe;
  std::sort(ascending.data(), ascending.data() + ascending.size());
  Array descending = ascending.reverse();
  // Toward 0 only the sub-unit window matters (and symmetrically for inf);
  // a probe spanning both sides is split at 1.
  auto window = [](const Array& a, bool below_one) {
    std::vector<double> keep;
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if ((below_one && a[i] <= 1.0) || (!below_one && a[i] >= 1.0))
        keep.push_back(a[i]);
    if (keep.size() < 2) return a;
    return Eigen::Map<const Array>(keep.data(), keep.size()).eval();
  };
  const Array to_zero = window(descending, true);
  const Array to_inf = window(ascending, false);

  const Array& tg = default_t_grid();
  auto beta_fn = [&](double l) { return beta(Y, s, l, tg); };
  const double shift = (1.0 - dim) / s;
  auto shifted_fn = [&](double l) {
    return std::pow(l, shift) * beta(Y, s, l, tg);
  };

  CaseDecision out;
  const LimitEstimate beta_at_zero =
      probe_limit("beta(l), l->0", beta_fn, to_zero);
  const LimitEstimate beta_at_inf =
      probe_limit("beta(l), l->inf", beta_fn, to_inf);
  switch (case_id) {
    case 1:
      out.probes = {beta_at_zero};
      out.verdict = beta_at_zero.verdict;
      break;
    case 2:
      out.probes = {beta_at_zero, beta_at_inf};
      out.verdict = verdict_or({beta_at_zero.verdict, beta_at_inf.verdict});
      break;
    case 3: {
      const LimitEstimate shifted_at_inf =
          probe_limit("l^{(1-N)/s} beta(l), l->inf", shifted_fn, to_inf);
      const LimitEstimate shifted_at_zero =
          probe_limit("l^{(1-N)/s} beta(l), l->0", shifted_fn, to_zero);
      out.probes = {shifted_at_inf, beta_at_zero, shifted_at_zero,
                    beta_at_inf};
      out.verdict = verdict_or(
          {verdict_and({shifted_at_inf.verdict, beta_at_zero.verdict}),
           shifted_at_zero.verdict, beta_at_inf.verdict});
      break;
    }
  }
  return out;
}

KernelSpec KernelSpec::make_fractional(double s, int dim) {
  if (!(s > 0.0 && s < 1.0) || dim < 1)
    throw Error("fractional kernel: need s in (0,1), dim >= 1");
  KernelSpec K;
  K.M = [s](double t) { return std::pow(t, s); };
  K.Nker = [dim](double t) { return std::pow(t, double(dim)); };
  K.fractional = Fractional{s, dim};
  return K;
}

KernelSpec KernelSpec::general(std::function<double(double)> M,
                               std::function<double(double)> Nker) {
  if (!M || !Nker) throw Error("general kernel: missing M or N");
  KernelSpec K;
  K.M = std::move(M);
  K.Nker = std::move(Nker);
  return K;
}

namespace {

// Local power-law exponent of f near r, from two octave ratios.
double fitted_exponent(const std::function<double(double)>& f, double r) {
  const double f1 = f(r), f2 = f(2.0 * r), f4 = f(4.0 * r);
  if (!(f1 > 0.0) || !(f2 > 0.0) || !(f4 > 0.0)) return 0.0;
  return 0.5 * (std::log2(f2 / f1) + std::log2(f4 / f2));
}

struct TailedIntegral {
  double value = 0.0;
  bool convergent = true;
};

// int_{r_lo}^{r_hi} f dr in log coordinates, plus a fitted power-law
// remainder outside the window in the direction indicated.
TailedIntegral integrate_with_extrapolation(
    const std::function<double(double)>& f, double r_lo, double r_hi,
    bool extrapolate_to_zero, bool extrapolate_to_inf) {
  TailedIntegral out;
  auto in_log = [&f](double v) {
    const double r = std::exp(v);
    return f(r) * r;
  };
  out.value = adaptive_simpson(in_log, std::log(r_lo), std::log(r_hi),
                               1e-11, 44);
  if (extrapolate_to_zero) {
    const double expo = fitted_exponent(f, r_lo);
    if (expo <= -1.0 + 1e-9) {
      out.convergent = false;
      out.value = kInf;
      return out;
    }
    out.value += f(r_lo) * r_lo / (expo + 1.0);
  }
  if (extrapolate_to_inf) {
    const double expo = fitted_exponent(f, r_hi / 4.0);
    if (expo >= -1.0 - 1e-9) {
      out.convergent = false;
      out.value = kInf;
      return out;
    }
    out.value += f(r_hi) * r_hi / (-expo - 1.0);
  }
  return out;
}

}  // namespace

KernelConditionReport kernel_conditions_check(const KernelSpec& K,
                                              double p_minus, int dim) {
  if (!K.M || !K.Nker) throw Error("kernel_conditions_check: missing kernel");
  if (!(p_minus > 1.0) || dim < 1)
    throw Error("kernel_conditions_check: need p_minus > 1, dim >= 1");
  KernelConditionReport rep;

  const Array grid = log_space(1e-6, 1e6, 241);
  rep.monotone_positive = true;
  rep.lower_bound = true;
  double prev_M = 0.0, prev_N = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    const double Mr = K.M(r), Nr = K.Nker(r);
    if (!std::isfinite(Mr) || !std::isfinite(Nr))
      throw Error("kernel_conditions_check: kernel evaluation failed at r=" +
                  fmt(r));
    if (Mr <= 0.0 || Nr <= 0.0 || Mr < prev_M * (1.0 - 1e-12) ||
        Nr < prev_N * (1.0 - 1e-12))
      rep.monotone_positive = false;
    if (Mr < std::min(1.0, r) * (1.0 - 1e-12)) rep.lower_bound = false;
    prev_M = Mr;
    prev_N = Nr;
  }

  auto near = [&](double r) {
    return std::pow(r, dim - 1.0 + p_minus) /
           (K.Nker(r) * std::pow(K.M(r), p_minus));
  };
  auto far = [&](double r) {
    return std::pow(r, dim - 1.0) /
           (K.Nker(r) * std::pow(K.M(r), p_minus));
  };
  const TailedIntegral near_zero =
      integrate_with_extrapolation(near, 1e-10, 1.0, true, false);
  const TailedIntegral tail =
      integrate_with_extrapolation(far, 1.0, 1e10, false, true);
  rep.integral_near_zero = near_zero.value;
  rep.integral_tail = tail.value;
  rep.tail_convergent = near_zero.convergent && tail.convergent;
  rep.integrable = rep.tail_convergent && std::isfinite(near_zero.value) &&
                   std::isfinite(tail.value);
  return rep;
}

Array default_t_grid() { return log_space(1e-6, 1e6, 241); }

Array default_lambda_probe() { return log_space(1e-12, 1e12, 25); }

}  // namespace orlicz::young
