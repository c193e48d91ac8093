#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace orlicz {

using Vector = Eigen::VectorXd;
using Array = Eigen::ArrayXd;
// Cell centers and sample sets are stored row-per-point.
using PointMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonYoungError : public Error {
 public:
  using Error::Error;
};

class MaximizerDivergedError : public Error {
 public:
  using Error::Error;
};

class EmptyDomainError : public Error {
 public:
  using Error::Error;
};

class OutsideDomainError : public Error {
 public:
  using Error::Error;
};

class TooCoarseError : public Error {
 public:
  using Error::Error;
};

class OnBoundaryError : public Error {
 public:
  using Error::Error;
};

class NonIntegrableSingularityError : public Error {
 public:
  NonIntegrableSingularityError(const std::string& what, double exponent)
      : Error(what), fitted_exponent(exponent) {}
  double fitted_exponent;
};

// ---------------------------------------------------------------------------
// Geometric constants
// ---------------------------------------------------------------------------

// Volume of the unit ball in R^N.
inline double unit_ball_volume(int dim) {
  return std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
}

// Surface measure of the unit sphere S^{N-1} (equals N * unit ball volume).
inline double unit_sphere_area(int dim) {
  return dim * unit_ball_volume(dim);
}

// ---------------------------------------------------------------------------
// Grids and extrema
// ---------------------------------------------------------------------------

inline Array log_space(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2)
    throw Error("log_space: need 0 < lo < hi and n >= 2");
  Array t(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    t[i] = std::exp(llo + (lhi - llo) * i / double(n - 1));
  t[0] = lo;
  t[n - 1] = hi;
  return t;
}

struct GridExtremum {
  double arg = 0.0;
  double value = 0.0;
};

namespace detail {

template <class F, class Better>
GridExtremum grid_extremum(F&& f, const Array& grid, Better better) {
  GridExtremum best{grid[0], f(grid[0])};
  int best_i = 0;
  for (int i = 1; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (better(v, best.value)) {
      best = {grid[i], v};
      best_i = i;
    }
  }
  // One refinement round, 10x finer around the running extremum.
  const int lo_i = std::max(0, best_i - 1);
  const int hi_i = std::min<int>(grid.size() - 1, best_i + 1);
  if (grid[hi_i] > grid[lo_i]) {
    const int m = std::max<int>(16, 10 * (hi_i - lo_i + 1));
    const Array fine = log_space(grid[lo_i], grid[hi_i], m);
    for (int i = 0; i < fine.size(); ++i) {
      const double v = f(fine[i]);
      if (better(v, best.value)) best = {fine[i], v};
    }
  }
  return best;
}

}  // namespace detail

// Supremum over a log grid with one local refinement round.
template <class F>
GridExtremum grid_sup(F&& f, const Array& grid) {
  return detail::grid_extremum(std::forward<F>(f), grid,
                               [](double a, double b) { return a > b; });
}

template <class F>
GridExtremum grid_inf(F&& f, const Array& grid) {
  return detail::grid_extremum(std::forward<F>(f), grid,
                               [](double a, double b) { return a < b; });
}

// ---------------------------------------------------------------------------
// Compensated summation
// ---------------------------------------------------------------------------

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

// ---------------------------------------------------------------------------
// Deterministic chunked reduction
// ---------------------------------------------------------------------------
//
// Work is split into a fixed number of chunks whose partial sums are
// combined in chunk order, so the result does not depend on how many
// workers execute the chunks.

template <class ChunkFn>
double parallel_chunk_sum(std::size_t n_chunks, int threads, ChunkFn&& chunk) {
  std::vector<double> partial(n_chunks, 0.0);
  const int workers =
      std::max(1, std::min<int>(threads, int(std::min<std::size_t>(
                                             n_chunks, 1024))));
  if (workers == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) partial[c] = chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= n_chunks) return;
        partial[c] = chunk(c);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  KahanSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

// ---------------------------------------------------------------------------
// Adaptive 1D quadrature (deterministic)
// ---------------------------------------------------------------------------

namespace detail {

template <class F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm,
                            double fb, double whole, double tol,
                            double tol_floor, int depth, double& err_acc) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    err_acc += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  // The per-level tolerance stays above rounding scale of the whole
  // integral, or the recursion never terminates on non-smooth integrands.
  const double child_tol = std::max(0.5 * tol, tol_floor);
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, child_tol,
                              tol_floor, depth - 1, err_acc) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, child_tol,
                              tol_floor, depth - 1, err_acc);
}

}  // namespace detail

// Adaptive Simpson on [a, b]; err_out (optional) receives an error estimate.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-10,
                        int max_depth = 40, double* err_out = nullptr) {
  if (!(b > a)) {
    if (err_out) *err_out = 0.0;
    return 0.0;
  }
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double left_whole = (m - a) / 6.0 * (fa + 4.0 * f(0.5 * (a + m)) + fm);
  const double right_whole = (b - m) / 6.0 * (fm + 4.0 * f(0.5 * (m + b)) + fb);
  const double tol_floor =
      1e-15 * (std::abs(left_whole) + std::abs(right_whole) + 1e-300);
  double err = 0.0;
  const double value = detail::adaptive_simpson_rec(
                           f, a, m, fa, f(0.5 * (a + m)), fm, left_whole,
                           std::max(0.5 * tol, tol_floor), tol_floor,
                           max_depth, err) +
                       detail::adaptive_simpson_rec(
                           f, m, b, fm, f(0.5 * (m + b)), fb, right_whole,
                           std::max(0.5 * tol, tol_floor), tol_floor,
                           max_depth, err);
  if (err_out) *err_out = err;
  return value;
}

}  // namespace orlicz
