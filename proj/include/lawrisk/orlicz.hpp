#pragma once

// Orlicz functions, the Luxemburg norm, Young-class and Orlicz-heart probes,
// and diagnostics for Phi-weak convergence (weak convergence plus
// convergence of the Phi-moments).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lawrisk/distribution.hpp"
#include "lawrisk/error.hpp"

namespace lawrisk {

/// Convex, nondecreasing, non-constant Phi on [0, inf) with Phi(0) = 0.
///
/// The properties are checked on a geometric grid at construction. The
/// Delta_2 flag is metadata supplied by the caller and never verified.
class orlicz_function {
 public:
  using evaluator = std::function<double(double)>;

  orlicz_function(std::string name, evaluator phi, bool delta2 = false)
      : name_(std::move(name)), phi_(std::move(phi)), delta2_(delta2) {
    validate();
  }

  /// Phi(x) = x^p, p >= 1.
  static orlicz_function power(double p) {
    require_exponent(p);
    return {label("power", p), [p](double x) { return std::pow(x, p); }, true};
  }

  /// Phi(x) = x^p / p, p >= 1.
  static orlicz_function power_scaled(double p) {
    require_exponent(p);
    return {label("power-scaled", p), [p](double x) { return std::pow(x, p) / p; }, true};
  }

  /// Phi(x) = e^x - 1.
  static orlicz_function expm1() {
    return {"expm1", [](double x) { return std::expm1(x); }, false};
  }

  /// Phi(x) = e^{a x} - 1, a > 0.
  static orlicz_function linear_exp(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw domain_error("linear-exp:a requires a > 0");
    return {label("linear-exp", a), [a](double x) { return std::expm1(a * x); }, false};
  }

  double operator()(double x) const { return phi_(x); }
  const std::string& name() const { return name_; }
  bool delta2() const { return delta2_; }

  /// Phi_lambda(x) = Phi(lambda x).
  orlicz_function scaled(double lambda) const {
    if (!(lambda > 0.0)) throw domain_error("Orlicz scaling must be positive");
    auto phi = phi_;
    return {label(name_ + "*", lambda), [phi, lambda](double x) { return phi(lambda * x); },
            delta2_};
  }

 private:
  static void require_exponent(double p) {
    if (!(p >= 1.0) || !std::isfinite(p))
      throw domain_error("power Orlicz function needs exponent p >= 1");
  }

  static std::string label(const std::string& base, double v) {
    std::ostringstream os;
    os << base << ':' << format_real(v);
    return os.str();
  }

  void validate() const {
    if (!phi_) throw domain_error("Orlicz function '" + name_ + "' has no evaluator");
    if (std::abs(phi_(0.0)) > 1e-15)
      throw domain_error("Orlicz function '" + name_ + "' must vanish at 0");
    std::vector<double> grid{0.0};
    for (int e = -20; e <= 6; ++e) grid.push_back(std::ldexp(1.0, e));
    bool positive = false;
    double prev = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double v = phi_(grid[i]);
      if (std::isnan(v) || v < 0.0)
        throw domain_error("Orlicz function '" + name_ + "' must be nonnegative");
      if (v < prev) throw domain_error("Orlicz function '" + name_ + "' must be nondecreasing");
      positive = positive || v > 0.0;
      prev = v;
    }
    if (!positive) throw domain_error("Orlicz function '" + name_ + "' must be non-constant");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double a = grid[i], b = grid[i + 1];
      const double fa = phi_(a), fb = phi_(b), fm = phi_(0.5 * (a + b));
      if (std::isfinite(fb) && fm > 0.5 * (fa + fb) + 1e-12 * (1.0 + std::abs(fb)))
        throw domain_error("Orlicz function '" + name_ + "' must be convex");
    }
  }

  std::string name_;
  evaluator phi_;
  bool delta2_;
};

inline double phi_moment(const distribution& d, const orlicz_function& phi, double scale) {
  return phi_moment<orlicz_function>(d, phi, scale);
}

namespace detail {
inline bool is_zero_law(const distribution& d) {
  if (!d.is_discrete()) return false;
  const auto v = d.values();
  return v.front() == 0.0 && v.back() == 0.0;
}
}  // namespace detail

/// Luxemburg norm inf{1/lambda : E[Phi(lambda |X|)] <= 1}.
///
/// lambda* = sup{lambda : E[Phi(lambda |X|)] <= 1} is bracketed by doubling or
/// halving from 1 (at most 2^64 either way) and then bisected to relative
/// tolerance `tol`. The returned norm is 1/lo with lo on the feasible side,
/// so E[Phi(|X| / norm)] <= 1 holds up to rounding.
inline double luxemburg_norm(const distribution& d, const orlicz_function& phi,
                             double tol = 1e-12) {
  if (!(tol > 0.0)) throw domain_error("luxemburg_norm tolerance must be positive");
  if (detail::is_zero_law(d)) return 0.0;
  auto feasible = [&](double lambda) { return phi_moment(d, phi, lambda) <= 1.0; };

  constexpr int max_doublings = 64;
  double lo, hi;
  if (feasible(1.0)) {
    lo = 1.0;
    hi = 2.0;
    int k = 0;
    while (feasible(hi)) {
      if (++k > max_doublings)
        throw domain_error("Luxemburg norm of " + d.descriptor() + " is below 2^-64");
      lo = hi;
      hi *= 2.0;
    }
  } else {
    hi = 1.0;
    lo = 0.5;
    int k = 0;
    while (!feasible(lo)) {
      if (++k > max_doublings)
        throw outside_orlicz_space_error(d.descriptor() + " is outside the Orlicz space of " +
                                         phi.name());
      hi = lo;
      lo *= 0.5;
    }
  }
  while ((hi - lo) > tol * lo) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 1.0 / lo;
}

/// Membership in the Young class: E[Phi(|X|)] < inf.
inline bool young_member(const distribution& d, const orlicz_function& phi) {
  return std::isfinite(phi_moment(d, phi, 1.0));
}

struct heart_probe_entry {
  double lambda;
  double moment;  // +inf when divergent
  bool finite;
};

/// Finiteness of E[Phi(lambda |X|)] at each probed lambda. All finite is
/// consistent with membership in the Orlicz heart; it is evidence, not proof.
struct heart_probe_report {
  std::vector<heart_probe_entry> entries;
  bool heart_consistent() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.finite; });
  }
};

inline heart_probe_report heart_probe(const distribution& d, const orlicz_function& phi,
                                      const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw domain_error("heart_probe needs at least one lambda");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw domain_error("heart_probe lambdas must be positive");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
      throw domain_error("heart_probe lambdas must be increasing");
  }
  heart_probe_report r;
  for (double lambda : lambdas) {
    const double m = phi_moment(d, phi, lambda);
    r.entries.push_back({lambda, m, std::isfinite(m)});
  }
  return r;
}

namespace detail {

// Evaluation points for the Levy check: quantiles at levels k/grid of both
// laws plus every atom. Between consecutive points each CDF moves by at most
// about 1/grid unless it jumps, and jumps sit on the points themselves.
inline std::vector<double> levy_grid(const distribution& a, const distribution& b,
                                     std::size_t grid_size) {
  std::vector<double> xs;
  for (const auto* d : {&a, &b}) {
    for (std::size_t k = 1; k < grid_size; ++k)
      xs.push_back(d->quantile(static_cast<double>(k) / static_cast<double>(grid_size)));
    if (d->is_discrete()) xs.insert(xs.end(), d->values().begin(), d->values().end());
  }
  xs.erase(std::remove_if(xs.begin(), xs.end(), [](double x) { return !std::isfinite(x); }),
           xs.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

// F1(x - eps) - eps <= F2(x) <= F1(x + eps) + eps at every grid point, using
// left limits where the supremum is approached from the left.
inline bool levy_feasible(const distribution& f1, const distribution& f2,
                          const std::vector<double>& xs, double eps) {
  for (double x : xs) {
    if (f1.cdf_left(x - eps) - eps > f2.cdf_left(x)) return false;
    if (f1.cdf(x - eps) - eps > f2.cdf(x)) return false;
    if (f2.cdf(x) > f1.cdf(x + eps) + eps) return false;
  }
  return true;
}

}  // namespace detail

/// Approximate Levy distance between two laws. Exact for purely atomic
/// pairs; otherwise accurate to about 1/grid_size.
inline double levy_distance(const distribution& d1, const distribution& d2,
                            std::size_t grid_size = 1000) {
  if (grid_size < 2) throw domain_error("levy_distance grid_size must be at least 2");
  const auto xs = detail::levy_grid(d1, d2, grid_size);
  double lo = 0.0, hi = 1.0;
  if (detail::levy_feasible(d1, d2, xs, 0.0)) return 0.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (detail::levy_feasible(d1, d2, xs, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

struct phi_weak_diagnostic {
  double levy_distance;
  double moment_gap;
  bool converged;
};

/// Per-element diagnostics of mu_n -> target Phi-weakly. The last entry's
/// `converged` flag is the headline verdict.
inline std::vector<phi_weak_diagnostic> phi_weak_check(const std::vector<distribution>& seq,
                                                       const distribution& target,
                                                       const orlicz_function& phi, double tol_w,
                                                       double tol_m,
                                                       std::size_t grid_size = 1000) {
  if (!(tol_w >= 0.0) || !(tol_m >= 0.0))
    throw domain_error("phi_weak_check tolerances must be nonnegative");
  const double target_moment = phi_moment(target, phi, 1.0);
  if (!std::isfinite(target_moment))
    throw domain_error("phi_weak_check: target is outside the Young class of " + phi.name());
  std::vector<phi_weak_diagnostic> out;
  out.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const double m = phi_moment(seq[i], phi, 1.0);
    if (!std::isfinite(m))
      throw domain_error("phi_weak_check: sequence element " + std::to_string(i) +
                         " is outside the Young class of " + phi.name());
    phi_weak_diagnostic diag;
    diag.levy_distance = levy_distance(seq[i], target, grid_size);
    diag.moment_gap = std::abs(m - target_moment);
    diag.converged = diag.levy_distance <= tol_w && diag.moment_gap <= tol_m;
    out.push_back(diag);
  }
  return out;
}

}  // namespace lawrisk
