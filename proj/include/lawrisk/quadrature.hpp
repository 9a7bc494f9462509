#pragma once

// Adaptive Gauss-Legendre quadrature on sub-intervals of the open unit
// interval, specialised for quantile integrands: the integrand may blow up at
// t -> 0 or t -> 1, and is monotone in each tail.
//
// The interval is swept in dyadic cells toward each endpoint. Each cell is
// integrated by adaptive bisection (10-point rule against its two halves).
// The upper half of the unit interval is parametrised by s = 1 - t so that
// tails like 1 - 2^-200 stay representable.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace lawrisk::quadrature {

enum class status { converged, divergent, budget_exhausted };

struct result {
  double value = 0.0;
  status state = status::converged;
  int sign = 0;  // direction of divergence, when divergent
  std::size_t evaluations = 0;

  bool ok() const { return state == status::converged; }
};

struct options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  std::size_t max_evaluations = std::size_t{1} << 20;
  double overflow_guard = 1e300;
  double growth_factor = 1.1;
  int growth_run = 8;
  int min_tail_cells = 20;
};

namespace detail {

inline constexpr int gl_order = 10;

struct gl_rule {
  std::array<double, gl_order> nodes{};
  std::array<double, gl_order> weights{};
};

inline const gl_rule& gauss_legendre() {
  static const gl_rule rule = [] {
    gl_rule r;
    constexpr int n = gl_order;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      r.nodes[i] = x;
      r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

template <class F>
class integrator {
 public:
  integrator(F& f, const options& opt) : f_(f), opt_(opt) {}

  // Sweep [lo, c] in cells [c 2^-(j+1), c 2^-j], clipped at lo. When lo == 0
  // the sweep runs until the tail has converged or visibly diverges.
  void sweep(double lo, double c, double total_width) {
    if (!(c > lo) || failed()) return;
    const bool open_end = (lo == 0.0);
    double prev = 0.0;
    int growth = 0;
    int zeros = 0;
    int settled = 0;
    double hi = c;
    for (int j = 0;; ++j) {
      double cell_lo = std::ldexp(c, -(j + 1));
      if (cell_lo < lo) cell_lo = lo;
      const double cell_tol = opt_.abs_tol * (hi - cell_lo) / total_width;
      const double v = cell(cell_lo, hi, cell_tol);
      if (failed()) return;
      sum_ += v;
      if (!std::isfinite(sum_) || std::abs(sum_) > opt_.overflow_guard) {
        diverge(v);
        return;
      }
      if (cell_lo == lo) {
        // Reached the end of the representable range on an open end.
        if (open_end && std::abs(v) > opt_.abs_tol) diverge(v);
        return;
      }
      hi = cell_lo;
      if (!open_end) continue;

      const double a = std::abs(v);
      const double ap = std::abs(prev);
      if (j > 0 && ap > 0.0 && a >= opt_.growth_factor * ap) {
        if (++growth >= opt_.growth_run) {
          diverge(v);
          return;
        }
      } else {
        growth = 0;
      }
      zeros = (a == 0.0) ? zeros + 1 : 0;
      if (j >= opt_.min_tail_cells) {
        if (zeros >= 3) return;
        const double target = 1e-4 * std::max(opt_.abs_tol, opt_.rel_tol * std::abs(sum_));
        bool small = false;
        if (ap > 0.0) {
          const double r = a / ap;
          small = r < 0.999 && a * r / (1.0 - r) <= target;
        }
        settled = small ? settled + 1 : 0;
        if (settled >= 2) return;
      }
      prev = v;
    }
  }

  result finish() const { return {sum_, state_, sign_, evaluations_}; }

 private:
  bool failed() const { return state_ != status::converged; }

  void diverge(double v) {
    state_ = status::divergent;
    sign_ = (v > 0) - (v < 0);
    if (sign_ == 0) sign_ = (sum_ > 0) - (sum_ < 0);
  }

  double rule(double a, double b) {
    const auto& gl = gauss_legendre();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < gl_order; ++i) {
      const double y = f_(mid + half * gl.nodes[i]);
      if (!std::isfinite(y) || std::abs(y) > opt_.overflow_guard) {
        diverge(y);
        return y;
      }
      s += gl.weights[i] * y;
    }
    evaluations_ += gl_order;
    if (evaluations_ > opt_.max_evaluations) state_ = status::budget_exhausted;
    return s * half;
  }

  double cell(double a, double b, double tol) {
    const double whole = rule(a, b);
    if (failed()) return whole;
    return refine(a, b, whole, tol, 0);
  }

  double refine(double a, double b, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = rule(a, m);
    if (failed()) return left;
    const double right = rule(m, b);
    if (failed()) return right;
    const double both = left + right;
    const double err = std::abs(both - whole);
    if (err <= std::max(tol, opt_.rel_tol * std::abs(both)) || depth >= 48 || m <= a || m >= b)
      return both;
    const double l = refine(a, m, left, 0.5 * tol, depth + 1);
    if (failed()) return l;
    return l + refine(m, b, right, 0.5 * tol, depth + 1);
  }

  F& f_;
  const options& opt_;
  double sum_ = 0.0;
  status state_ = status::converged;
  int sign_ = 0;
  std::size_t evaluations_ = 0;
};

}  // namespace detail

/// Integral over [a, b] of an ordinary function (adaptive, no tail handling).
template <class F>
result integrate_interval(F&& f, double a, double b, const options& opt = {}) {
  if (!(b > a)) return {};
  detail::integrator<F> it(f, opt);
  it.sweep(a, b, b - a);
  return it.finish();
}

/// Integral over [a, b] ⊂ [0, 1] of g, given as lower(t) = g(t) for t <= 1/2
/// and upper(s) = g(1 - s) for t > 1/2. Either endpoint may be the open end
/// of the unit interval.
template <class Lower, class Upper>
result integrate_unit(Lower&& lower, Upper&& upper, double a, double b,
                      const options& opt = {}) {
  result out;
  if (!(b > a)) return out;
  const double width = b - a;

  if (a < 0.5) {
    detail::integrator<Lower> it(lower, opt);
    it.sweep(a, std::min(b, 0.5), width);
    out = it.finish();
    if (!out.ok()) return out;
  }
  if (b > 0.5) {
    const double s_lo = (b >= 1.0) ? 0.0 : 1.0 - b;
    const double s_hi = 1.0 - std::max(a, 0.5);
    detail::integrator<Upper> it(upper, opt);
    it.sweep(s_lo, s_hi, width);
    result r = it.finish();
    r.value += out.value;
    r.evaluations += out.evaluations;
    return r;
  }
  return out;
}

}  // namespace lawrisk::quadrature
