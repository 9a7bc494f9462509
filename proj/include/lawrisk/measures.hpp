#pragma once

// Law-invariant functionals on distributions: expected shortfalls, the
// inter-ES difference, standard deviation and semideviations, spectral risk
// measures. Every functional only sees the law, so law invariance is
// structural.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lawrisk/distribution.hpp"
#include "lawrisk/error.hpp"
#include "lawrisk/spectrum.hpp"

namespace lawrisk {

namespace detail {

inline void check_level(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0))
    throw domain_error(std::string(what) + " level p must lie in (0,1)");
}

template <class G>
double quantile_moment(const distribution& d, G&& g, const char* what) {
  if (d.is_discrete()) {
    compensated_sum s;
    if (d.kind() == distribution_kind::empirical) {
      for (double x : d.values()) s.add(g(x));
      return s.value() / static_cast<double>(d.size());
    }
    for (const auto& a : d.atoms()) s.add(a.probability * g(a.value));
    return s.value();
  }
  const auto r = integrate_quantile(d, g);
  if (!r.ok()) throw non_integrable_error(std::string(what) + " is infinite", r.sign);
  return r.value;
}

}  // namespace detail

/// ES_p(X) = 1/(1-p) * integral of F^{-1} over (p, 1).
inline double es(const distribution& d, double p) {
  detail::check_level(p, "es");
  try {
    return quantile_integral(d, p, 1.0) / (1.0 - p);
  } catch (const non_integrable_error& e) {
    throw non_integrable_error("es: upper tail is not integrable", e.sign());
  }
}

/// ES_p^-(X) = 1/p * integral of F^{-1} over (0, p).
inline double es_minus(const distribution& d, double p) {
  detail::check_level(p, "es_minus");
  try {
    return quantile_integral(d, 0.0, p) / p;
  } catch (const non_integrable_error& e) {
    throw non_integrable_error("es_minus: lower tail is not integrable", e.sign());
  }
}

/// Inter-ES difference ES_p(X) + ES_p(-X).
inline double inter_es(const distribution& d, double p) {
  detail::check_level(p, "inter_es");
  return es(d, p) + es(negate(d), p);
}

/// The three L^2 deviations around the mean.
struct deviations {
  double stdev;
  double upper;
  double lower;
};

inline deviations compute_deviations(const distribution& d) {
  double m;
  try {
    m = expectation(d);
  } catch (const non_integrable_error& e) {
    throw non_integrable_error("deviation: mean is not finite", e.sign());
  }
  const double var = detail::quantile_moment(
      d, [m](double x) { return (x - m) * (x - m); }, "second moment");
  const double up = detail::quantile_moment(
      d,
      [m](double x) {
        const double y = x > m ? x - m : 0.0;
        return y * y;
      },
      "upper second moment");
  const double lo = detail::quantile_moment(
      d,
      [m](double x) {
        const double y = x < m ? m - x : 0.0;
        return y * y;
      },
      "lower second moment");
  return {std::sqrt(var), std::sqrt(up), std::sqrt(lo)};
}

inline double stdev(const distribution& d) { return compute_deviations(d).stdev; }
inline double semidev_upper(const distribution& d) { return compute_deviations(d).upper; }
inline double semidev_lower(const distribution& d) { return compute_deviations(d).lower; }

/// Spectral risk measure: integral of phi(t) F^{-1}(t) over (0,1).
///
/// For non-degenerate empirical laws this is the L-statistic sum of
/// lstat_weights times the order statistics, evaluated literally that way.
inline double spectral(const distribution& d, const spectrum& phi) {
  // A one-point law has rho = c for any normalised phi; summing weights
  // would only reintroduce their rounding.
  if (d.is_discrete() && d.values().front() == d.values().back()) return d.values().front();
  if (d.kind() == distribution_kind::empirical) {
    const auto w = lstat_weights(phi, d.size());
    const auto x = d.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * x[i];
    return sum;
  }
  if (d.kind() == distribution_kind::atomic) {
    compensated_sum s;
    for (const auto& c : d.cells()) s.add(c.value * phi.integral(c.lo, c.hi));
    return s.value();
  }
  try {
    switch (phi.kind()) {
      case spectrum_kind::es:
        return quantile_integral(d, phi.p(), 1.0) / (1.0 - phi.p());
      case spectrum_kind::step: {
        compensated_sum s;
        double lo = 0.0;
        for (std::size_t i = 0; i < phi.breakpoints().size(); ++i) {
          const double hi = phi.breakpoints()[i];
          if (phi.levels()[i] != 0.0) s.add(phi.levels()[i] * quantile_integral(d, lo, hi));
          lo = hi;
        }
        return s.value();
      }
      case spectrum_kind::analytic: {
        auto lower = [&](double t) {
          const double w = phi(t);
          return w == 0.0 ? 0.0 : w * d.lower_quantile(t);
        };
        auto upper = [&](double s) {
          const double w = phi(1.0 - s);
          return w == 0.0 ? 0.0 : w * d.upper_quantile(s);
        };
        const auto r = quadrature::integrate_unit(lower, upper, 0.0, 1.0);
        if (!r.ok()) throw non_integrable_error("spectral integral diverges", r.sign);
        return r.value;
      }
    }
  } catch (const non_integrable_error& e) {
    throw non_integrable_error("spectral: integral diverges", e.sign());
  }
  return 0.0;
}

/// Upper end of the support: the essential supremum. Law invariant but not
/// order continuous on unbounded laws; used as the failing counterexample in
/// consistency experiments.
inline double sample_max(const distribution& d) {
  if (d.is_discrete()) return d.values().back();
  const double hi = d.bounds().upper;
  if (!std::isfinite(hi)) throw non_integrable_error("max: support is unbounded above", +1);
  return hi;
}

// ---------------------------------------------------------------------------

enum class measure_kind {
  mean,
  es,
  es_minus,
  inter_es,
  stdev,
  semidev_upper,
  semidev_lower,
  spectral,
  sample_max
};

/// A named law-invariant functional rho; evaluate() is its induced map on laws.
class measure_id {
 public:
  static measure_id mean() { return measure_id(measure_kind::mean); }
  static measure_id es(double p) { return with_level(measure_kind::es, p); }
  static measure_id es_minus(double p) { return with_level(measure_kind::es_minus, p); }
  static measure_id inter_es(double p) { return with_level(measure_kind::inter_es, p); }
  static measure_id stdev() { return measure_id(measure_kind::stdev); }
  static measure_id semidev_upper() { return measure_id(measure_kind::semidev_upper); }
  static measure_id semidev_lower() { return measure_id(measure_kind::semidev_lower); }
  static measure_id spectral(spectrum phi) {
    measure_id m(measure_kind::spectral);
    m.spectrum_ = std::move(phi);
    return m;
  }
  static measure_id sample_max() { return measure_id(measure_kind::sample_max); }

  measure_kind kind() const { return kind_; }
  double p() const { return p_; }
  const spectrum& spec() const { return *spectrum_; }

  /// Mini-language form, e.g. "inter-es:0.9".
  std::string name() const {
    std::ostringstream os;
    switch (kind_) {
      case measure_kind::mean: os << "mean"; break;
      case measure_kind::es: os << "es:" << format_real(p_); break;
      case measure_kind::es_minus: os << "es-minus:" << format_real(p_); break;
      case measure_kind::inter_es: os << "inter-es:" << format_real(p_); break;
      case measure_kind::stdev: os << "stdev"; break;
      case measure_kind::semidev_upper: os << "semidev-upper"; break;
      case measure_kind::semidev_lower: os << "semidev-lower"; break;
      case measure_kind::spectral: os << "spectral:" << spectrum_->descriptor(); break;
      case measure_kind::sample_max: os << "max"; break;
    }
    return os.str();
  }

 private:
  explicit measure_id(measure_kind k) : kind_(k) {}
  static measure_id with_level(measure_kind k, double p) {
    detail::check_level(p, "measure");
    measure_id m(k);
    m.p_ = p;
    return m;
  }

  measure_kind kind_;
  double p_ = 0.0;
  std::optional<spectrum> spectrum_;
};

/// rho(X) computed from the law of X alone. Errors carry the measure name.
inline double evaluate(const measure_id& m, const distribution& d) {
  try {
    switch (m.kind()) {
      case measure_kind::mean: return expectation(d);
      case measure_kind::es: return es(d, m.p());
      case measure_kind::es_minus: return es_minus(d, m.p());
      case measure_kind::inter_es: return inter_es(d, m.p());
      case measure_kind::stdev: return stdev(d);
      case measure_kind::semidev_upper: return semidev_upper(d);
      case measure_kind::semidev_lower: return semidev_lower(d);
      case measure_kind::spectral: return spectral(d, m.spec());
      case measure_kind::sample_max: return sample_max(d);
    }
  } catch (const non_integrable_error& e) {
    throw non_integrable_error(m.name() + ": " + e.what(), e.sign());
  } catch (const domain_error& e) {
    throw domain_error(m.name() + ": " + e.what());
  }
  return 0.0;
}

/// Closed-form value for the uniform family, when one exists.
inline std::optional<double> closed_form(const measure_id& m, const distribution& d) {
  if (d.kind() != distribution_kind::analytic || d.family() != "uniform") return std::nullopt;
  const double a = d.params()[0];
  const double b = d.params()[1];
  const double w = b - a;
  const double p = m.p();
  switch (m.kind()) {
    case measure_kind::mean: return 0.5 * (a + b);
    case measure_kind::es: return a + w * (1.0 + p) / 2.0;
    case measure_kind::es_minus: return a + w * p / 2.0;
    case measure_kind::inter_es: return w * p;
    case measure_kind::stdev: return w / std::sqrt(12.0);
    case measure_kind::semidev_upper:
    case measure_kind::semidev_lower: return w / std::sqrt(24.0);
    case measure_kind::sample_max: return b;
    case measure_kind::spectral: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace lawrisk
