#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lawrisk/error.hpp"
#include "lawrisk/quadrature.hpp"
#include "lawrisk/special.hpp"

namespace lawrisk {

enum class spectrum_kind { es, step, analytic };

/// Nonnegative, nondecreasing weight function phi on (0,1) with unit integral.
///
/// Normalisation is validated, never repaired: a spectrum whose integral is
/// off by more than 1e-6 is rejected.
class spectrum {
 public:
  static constexpr double normalization_tolerance = 1e-6;

  /// phi = 1/(1-p) on (p,1], the expected-shortfall spectrum.
  static spectrum expected_shortfall(double p) {
    if (!(p > 0.0 && p < 1.0)) throw domain_error("es spectrum level p must lie in (0,1)");
    spectrum s(spectrum_kind::es);
    s.p_ = p;
    return s;
  }

  /// Piecewise-constant phi: level[i] on (t[i-1], t[i]] with t[-1] = 0.
  /// The last breakpoint must be 1.
  static spectrum step(std::vector<double> breakpoints, std::vector<double> levels) {
    if (breakpoints.empty() || breakpoints.size() != levels.size())
      throw domain_error("step spectrum needs one level per breakpoint");
    if (breakpoints.back() != 1.0) throw domain_error("step spectrum must end at breakpoint 1");
    double prev_t = 0.0;
    double prev_level = 0.0;
    compensated_sum mass;
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
      if (!(breakpoints[i] > prev_t))
        throw domain_error("step spectrum breakpoints must increase within (0,1]");
      if (!(levels[i] >= 0.0) || !std::isfinite(levels[i]))
        throw domain_error("step spectrum levels must be finite and nonnegative");
      if (levels[i] < prev_level) throw domain_error("step spectrum levels must be nondecreasing");
      mass.add(levels[i] * (breakpoints[i] - prev_t));
      prev_t = breakpoints[i];
      prev_level = levels[i];
    }
    if (std::abs(mass.value() - 1.0) > normalization_tolerance)
      throw domain_error("step spectrum must integrate to 1");
    spectrum s(spectrum_kind::step);
    s.breakpoints_ = std::move(breakpoints);
    s.levels_ = std::move(levels);
    return s;
  }

  /// phi(t) = 1 everywhere: the spectral form of the mean.
  static spectrum uniform_weight() { return step({1.0}, {1.0}); }

  /// Arbitrary phi, checked on a grid for sign and monotonicity and by
  /// quadrature for normalisation.
  static spectrum analytic(std::string name, std::function<double(double)> phi) {
    constexpr int grid = 1000;
    double prev = 0.0;
    for (int i = 1; i < grid; ++i) {
      const double v = phi(static_cast<double>(i) / grid);
      if (!(v >= 0.0) || !std::isfinite(v))
        throw domain_error("spectrum '" + name + "' must be finite and nonnegative");
      if (v < prev - 1e-12) throw domain_error("spectrum '" + name + "' must be nondecreasing");
      prev = v;
    }
    spectrum s(spectrum_kind::analytic);
    s.name_ = std::move(name);
    s.phi_ = std::move(phi);
    const double mass = s.integral(0.0, 1.0);
    if (std::abs(mass - 1.0) > normalization_tolerance)
      throw domain_error("spectrum '" + s.name_ + "' must integrate to 1");
    return s;
  }

  spectrum_kind kind() const { return kind_; }
  double p() const { return p_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& levels() const { return levels_; }

  double operator()(double t) const {
    switch (kind_) {
      case spectrum_kind::es:
        return t > p_ ? 1.0 / (1.0 - p_) : 0.0;
      case spectrum_kind::step:
        for (std::size_t i = 0; i < breakpoints_.size(); ++i)
          if (t <= breakpoints_[i]) return levels_[i];
        return levels_.back();
      case spectrum_kind::analytic:
        return phi_(t);
    }
    return 0.0;
  }

  /// Integral of phi over [a, b] ⊂ [0, 1]; exact for es and step kinds.
  double integral(double a, double b) const {
    if (!(b > a)) return 0.0;
    switch (kind_) {
      case spectrum_kind::es: {
        const double len = b - std::max(a, p_);
        return len > 0.0 ? len / (1.0 - p_) : 0.0;
      }
      case spectrum_kind::step: {
        double sum = 0.0;
        double lo = 0.0;
        for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
          const double len = std::min(b, breakpoints_[i]) - std::max(a, lo);
          if (len > 0.0) sum += levels_[i] * len;
          lo = breakpoints_[i];
        }
        return sum;
      }
      case spectrum_kind::analytic: {
        auto lower = [this](double t) { return phi_(t); };
        auto upper = [this](double s) { return phi_(1.0 - s); };
        const auto r = quadrature::integrate_unit(lower, upper, a, b);
        if (!r.ok()) throw non_integrable_error("spectrum '" + name_ + "' is not integrable", r.sign);
        return r.value;
      }
    }
    return 0.0;
  }

  /// "es:0.9", "step:0.5,0;1,2" or the analytic name.
  std::string descriptor() const {
    std::ostringstream os;
    switch (kind_) {
      case spectrum_kind::es:
        os << "es:" << format_real(p_);
        break;
      case spectrum_kind::step:
        for (std::size_t i = 0; i < breakpoints_.size(); ++i)
          os << (i ? ";" : "") << format_real(breakpoints_[i]) << ',' << format_real(levels_[i]);
        break;
      case spectrum_kind::analytic:
        os << name_;
        break;
    }
    return os.str();
  }

 private:
  explicit spectrum(spectrum_kind k) : kind_(k) {}

  spectrum_kind kind_;
  double p_ = 0.0;
  std::vector<double> breakpoints_;
  std::vector<double> levels_;
  std::string name_;
  std::function<double(double)> phi_;
};

/// L-statistic weights w_i = integral of phi over ((i-1)/n, i/n].
inline std::vector<double> lstat_weights(const spectrum& phi, std::size_t n) {
  if (n == 0) throw domain_error("lstat_weights needs n >= 1");
  std::vector<double> w(n);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = phi.integral(static_cast<double>(i) / dn, static_cast<double>(i + 1) / dn);
  return w;
}

}  // namespace lawrisk
