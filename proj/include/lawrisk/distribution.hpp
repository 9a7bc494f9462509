#pragma once

// Laws on the real line, represented through their left quantile function
// F^{-1}(t) = inf{x : P(X <= x) >= t}.
//
// Three kinds exist. Analytic laws carry quantile evaluators for both tails
// (lower(t) = F^{-1}(t) and upper(s) = F^{-1}(1 - s), each accurate as its
// argument goes to 0) plus a CDF. Atomic laws are finite lists of weighted
// atoms. Empirical laws are sorted samples with weight 1/n each; ties are
// kept as repeated atoms so order-statistic indexing stays exact.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lawrisk/error.hpp"
#include "lawrisk/quadrature.hpp"
#include "lawrisk/special.hpp"

namespace lawrisk {

enum class distribution_kind { analytic, atomic, empirical };

struct atom {
  double value;
  double probability;
};

/// Closed interval containing the support; endpoints may be infinite.
struct support_bounds {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

/// One piece of a discrete law: value carried on the probability cell (lo, hi].
struct quantile_cell {
  double value;
  double lo;
  double hi;
};

class distribution {
 public:
  using evaluator = std::function<double(double)>;

  /// Analytic law. `family` and `params` identify it in reports (e.g.
  /// "uniform", {-1, 1}); `cdf` may be empty, in which case it is obtained
  /// by inverting the quantile.
  static distribution analytic(std::string family, std::vector<double> params, evaluator lower,
                               evaluator upper, evaluator cdf, support_bounds bounds = {}) {
    distribution d(distribution_kind::analytic);
    d.family_ = std::move(family);
    d.params_ = std::move(params);
    d.lower_ = std::move(lower);
    d.upper_ = std::move(upper);
    d.cdf_ = std::move(cdf);
    d.bounds_ = bounds;
    return d;
  }

  /// Law from weighted atoms; atoms are sorted by value, ties kept.
  static distribution atomic(std::vector<atom> atoms) {
    if (atoms.empty()) throw domain_error("atomic distribution needs at least one atom");
    compensated_sum total;
    for (const auto& a : atoms) {
      if (!std::isfinite(a.value)) throw domain_error("atom value must be finite");
      if (!(a.probability > 0.0 && a.probability <= 1.0))
        throw domain_error("atom probability must lie in (0,1]");
      total.add(a.probability);
    }
    if (std::abs(total.value() - 1.0) > 1e-12)
      throw domain_error("atom probabilities must sum to 1");
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const atom& x, const atom& y) { return x.value < y.value; });
    distribution d(distribution_kind::atomic);
    d.cumulative_.reserve(atoms.size());
    compensated_sum run;
    for (const auto& a : atoms) {
      run.add(a.probability);
      d.cumulative_.push_back(run.value());
      d.values_.push_back(a.value);
      d.probs_.push_back(a.probability);
    }
    d.cumulative_.back() = 1.0;
    d.bounds_ = {d.values_.front(), d.values_.back()};
    return d;
  }

  /// Law from samples already sorted ascending. Prefer empirical_from_samples.
  static distribution empirical_sorted(std::vector<double> sorted) {
    if (sorted.empty()) throw domain_error("empirical distribution needs at least one sample");
    distribution d(distribution_kind::empirical);
    d.values_ = std::move(sorted);
    d.bounds_ = {d.values_.front(), d.values_.back()};
    return d;
  }

  distribution_kind kind() const { return kind_; }
  bool is_discrete() const { return kind_ != distribution_kind::analytic; }
  support_bounds bounds() const { return bounds_; }

  /// Sorted atom values (samples for the empirical kind).
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  std::vector<atom> atoms() const {
    std::vector<atom> out;
    out.reserve(values_.size());
    const double w = 1.0 / static_cast<double>(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i)
      out.push_back({values_[i], kind_ == distribution_kind::atomic ? probs_[i] : w});
    return out;
  }

  /// Cells ((i-1)/n, i/n] for empirical laws, (F_{i-1}, F_i] for atomic ones.
  std::vector<quantile_cell> cells() const {
    std::vector<quantile_cell> out;
    out.reserve(values_.size());
    if (kind_ == distribution_kind::empirical) {
      const double n = static_cast<double>(values_.size());
      for (std::size_t i = 0; i < values_.size(); ++i)
        out.push_back({values_[i], static_cast<double>(i) / n, static_cast<double>(i + 1) / n});
    } else if (kind_ == distribution_kind::atomic) {
      double lo = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        out.push_back({values_[i], lo, cumulative_[i]});
        lo = cumulative_[i];
      }
    }
    return out;
  }

  const std::string& family() const { return family_; }
  std::span<const double> params() const { return params_; }

  /// Left quantile at t in (0,1); no range check (see left_quantile).
  double quantile(double t) const {
    switch (kind_) {
      case distribution_kind::analytic:
        return t <= 0.5 ? lower_(t) : upper_(1.0 - t);
      case distribution_kind::empirical: {
        const double n = static_cast<double>(values_.size());
        auto k = static_cast<std::size_t>(std::ceil(t * n));
        k = std::clamp<std::size_t>(k, 1, values_.size());
        return values_[k - 1];
      }
      case distribution_kind::atomic: {
        auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), t);
        if (it == cumulative_.end()) --it;
        return values_[static_cast<std::size_t>(it - cumulative_.begin())];
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  /// F^{-1}(1 - s), accurate for small s.
  double upper_quantile(double s) const {
    if (kind_ == distribution_kind::analytic) return upper_(s);
    return quantile(1.0 - s);
  }

  /// F^{-1}(t), accurate for small t.
  double lower_quantile(double t) const {
    if (kind_ == distribution_kind::analytic) return t <= 0.5 ? lower_(t) : upper_(1.0 - t);
    return quantile(t);
  }

  /// P(X <= x).
  double cdf(double x) const {
    switch (kind_) {
      case distribution_kind::analytic:
        return cdf_ ? cdf_(x) : inverted_cdf(x);
      case distribution_kind::empirical: {
        auto it = std::upper_bound(values_.begin(), values_.end(), x);
        return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
      }
      case distribution_kind::atomic: {
        auto it = std::upper_bound(values_.begin(), values_.end(), x);
        if (it == values_.begin()) return 0.0;
        return cumulative_[static_cast<std::size_t>(it - values_.begin()) - 1];
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  /// P(X < x). Analytic laws are treated as continuous.
  double cdf_left(double x) const {
    switch (kind_) {
      case distribution_kind::analytic:
        return cdf(x);
      case distribution_kind::empirical: {
        auto it = std::lower_bound(values_.begin(), values_.end(), x);
        return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
      }
      case distribution_kind::atomic: {
        auto it = std::lower_bound(values_.begin(), values_.end(), x);
        if (it == values_.begin()) return 0.0;
        return cumulative_[static_cast<std::size_t>(it - values_.begin()) - 1];
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  /// Short text identifying the law, e.g. "uniform:-1,1" or "empirical[n=100]".
  std::string descriptor() const {
    std::ostringstream os;
    switch (kind_) {
      case distribution_kind::analytic:
        os << family_;
        for (std::size_t i = 0; i < params_.size(); ++i) os << (i == 0 ? ':' : ',') << format_real(params_[i]);
        break;
      case distribution_kind::empirical:
        os << "empirical[n=" << values_.size() << ']';
        break;
      case distribution_kind::atomic:
        if (values_.size() == 1) {
          os << "point:" << format_real(values_.front());
        } else {
          os << "atomic[k=" << values_.size() << ']';
        }
        break;
    }
    return os.str();
  }

  /// Access for transforms that need the raw evaluators.
  const evaluator& lower_evaluator() const { return lower_; }
  const evaluator& upper_evaluator() const { return upper_; }
  const evaluator& cdf_evaluator() const { return cdf_; }

 private:
  explicit distribution(distribution_kind k) : kind_(k) {}

  double inverted_cdf(double x) const {
    // F(x) = sup{t : F^{-1}(t) <= x}, by bisection on the quantile.
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
      const double m = 0.5 * (lo + hi);
      if (quantile(m) <= x) {
        lo = m;
      } else {
        hi = m;
      }
    }
    return lo;
  }

  distribution_kind kind_;
  support_bounds bounds_;
  // discrete kinds
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  // analytic kind
  std::string family_;
  std::vector<double> params_;
  evaluator lower_;
  evaluator upper_;
  evaluator cdf_;
};

// ---------------------------------------------------------------------------
// Construction

inline distribution point_mass(double c) { return distribution::atomic({{c, 1.0}}); }

inline distribution empirical_from_samples(std::span<const double> samples) {
  if (samples.empty()) throw domain_error("empirical distribution needs at least one sample");
  std::vector<double> v(samples.begin(), samples.end());
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      throw domain_error("sample " + std::to_string(i) + " is not finite");
  std::sort(v.begin(), v.end());
  return distribution::empirical_sorted(std::move(v));
}

inline distribution uniform(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    throw domain_error("uniform:a,b requires finite a < b");
  const double w = b - a;
  return distribution::analytic(
      "uniform", {a, b}, [a, w](double t) { return a + w * t; },
      [b, w](double s) { return b - w * s; },
      [a, b, w](double x) { return x <= a ? 0.0 : x >= b ? 1.0 : (x - a) / w; }, {a, b});
}

inline distribution normal(double mu, double sigma) {
  if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma))
    throw domain_error("normal:mu,sigma requires finite mu and sigma > 0");
  return distribution::analytic(
      "normal", {mu, sigma}, [mu, sigma](double t) { return mu + sigma * normal_quantile(t); },
      [mu, sigma](double s) { return mu - sigma * normal_quantile(s); },
      [mu, sigma](double x) { return normal_cdf((x - mu) / sigma); });
}

inline distribution lognormal(double mu, double sigma) {
  if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma))
    throw domain_error("lognormal:mu,sigma requires finite mu and sigma > 0");
  return distribution::analytic(
      "lognormal", {mu, sigma},
      [mu, sigma](double t) { return std::exp(mu + sigma * normal_quantile(t)); },
      [mu, sigma](double s) { return std::exp(mu - sigma * normal_quantile(s)); },
      [mu, sigma](double x) { return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - mu) / sigma); },
      {0.0, std::numeric_limits<double>::infinity()});
}

/// Pareto with tail index alpha and scale xm: P(X > x) = (xm / x)^alpha, x >= xm.
inline distribution pareto(double alpha, double xm) {
  if (!(alpha > 0.0) || !(xm > 0.0) || !std::isfinite(alpha) || !std::isfinite(xm))
    throw domain_error("pareto:alpha,xm requires alpha > 0 and xm > 0");
  return distribution::analytic(
      "pareto", {alpha, xm}, [alpha, xm](double t) { return xm * std::exp(-std::log1p(-t) / alpha); },
      [alpha, xm](double s) { return xm * std::pow(s, -1.0 / alpha); },
      [alpha, xm](double x) { return x <= xm ? 0.0 : -std::expm1(alpha * std::log(xm / x)); },
      {xm, std::numeric_limits<double>::infinity()});
}

inline distribution negate_analytic(const distribution& d);

/// The law of -X. Exact for discrete kinds. For analytic kinds the quantile
/// t -> -F^{-1}(1-t) differs from the true left quantile only at jump
/// points, a Lebesgue-null set invisible to every quantile integral.
inline distribution negate(const distribution& d) {
  if (d.is_discrete()) {
    if (d.kind() == distribution_kind::empirical) {
      std::vector<double> v;
      v.reserve(d.size());
      for (auto it = d.values().rbegin(); it != d.values().rend(); ++it) v.push_back(-*it);
      return distribution::empirical_sorted(std::move(v));
    }
    auto atoms = d.atoms();
    std::reverse(atoms.begin(), atoms.end());
    for (auto& a : atoms) a.value = -a.value;
    return distribution::atomic(std::move(atoms));
  }
  if (d.family() == "uniform") return uniform(-d.params()[1], -d.params()[0]);
  if (d.family() == "normal") return normal(-d.params()[0], d.params()[1]);
  return negate_analytic(d);
}

/// Generic analytic negation through the tail evaluators.
inline distribution negate_analytic(const distribution& d) {
  const auto lower = d.lower_evaluator();
  const auto upper = d.upper_evaluator();
  const auto cdf = d.cdf_evaluator();
  distribution::evaluator neg_cdf;
  if (cdf) neg_cdf = [cdf](double x) { return 1.0 - cdf(-x); };
  std::vector<double> params(d.params().begin(), d.params().end());
  const auto b = d.bounds();
  return distribution::analytic(
      d.family().rfind("neg(", 0) == 0 ? d.family().substr(4, d.family().size() - 5)
                                        : "neg(" + d.family() + ")",
      std::move(params), [upper](double t) { return -upper(t); },
      [lower](double s) { return -lower(s); }, neg_cdf, {-b.upper, -b.lower});
}

/// The law of scale * X + shift, scale > 0.
inline distribution affine(const distribution& d, double scale, double shift) {
  if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(shift))
    throw domain_error("affine transform requires finite scale > 0 and finite shift");
  if (d.kind() == distribution_kind::empirical) {
    std::vector<double> v;
    v.reserve(d.size());
    for (double x : d.values()) v.push_back(scale * x + shift);
    return distribution::empirical_sorted(std::move(v));
  }
  if (d.kind() == distribution_kind::atomic) {
    auto atoms = d.atoms();
    for (auto& a : atoms) a.value = scale * a.value + shift;
    return distribution::atomic(std::move(atoms));
  }
  if (d.family() == "uniform")
    return uniform(scale * d.params()[0] + shift, scale * d.params()[1] + shift);
  const auto lower = d.lower_evaluator();
  const auto upper = d.upper_evaluator();
  const auto cdf = d.cdf_evaluator();
  distribution::evaluator new_cdf;
  if (cdf) new_cdf = [cdf, scale, shift](double x) { return cdf((x - shift) / scale); };
  std::vector<double> params(d.params().begin(), d.params().end());
  const auto b = d.bounds();
  return distribution::analytic(
      "affine(" + d.family() + ")", std::move(params),
      [lower, scale, shift](double t) { return scale * lower(t) + shift; },
      [upper, scale, shift](double s) { return scale * upper(s) + shift; }, new_cdf,
      {scale * b.lower + shift, scale * b.upper + shift});
}

// ---------------------------------------------------------------------------
// Evaluation

inline double left_quantile(const distribution& d, double t) {
  if (!(t > 0.0 && t < 1.0)) throw domain_error("quantile level must lie in (0,1)");
  return d.quantile(t);
}

/// Integral of g(F^{-1}(t)) over t in [a, b], by quadrature (analytic kind).
template <class G>
quadrature::result integrate_quantile(const distribution& d, G&& g, double a = 0.0,
                                      double b = 1.0, const quadrature::options& opt = {}) {
  auto lower = [&](double t) { return g(d.lower_quantile(t)); };
  auto upper = [&](double s) { return g(d.upper_quantile(s)); };
  return quadrature::integrate_unit(lower, upper, a, b, opt);
}

/// Exact integral of F^{-1} over [a, b] for discrete kinds; quadrature otherwise.
inline double quantile_integral(const distribution& d, double a, double b) {
  if (d.is_discrete()) {
    compensated_sum s;
    for (const auto& c : d.cells()) {
      const double len = std::min(c.hi, b) - std::max(c.lo, a);
      if (len > 0.0) s.add(c.value * len);
    }
    return s.value();
  }
  const auto r = integrate_quantile(d, [](double x) { return x; }, a, b);
  if (!r.ok())
    throw non_integrable_error("quantile function is not integrable on the requested range",
                               r.sign);
  return r.value;
}

/// E[X] = integral of F^{-1} over (0,1).
inline double expectation(const distribution& d) {
  if (d.kind() == distribution_kind::empirical) return mean_of(d.values());
  return quantile_integral(d, 0.0, 1.0);
}

/// E[phi(scale * |X|)]; returns +infinity when the integral diverges.
template <class Phi>
double phi_moment(const distribution& d, const Phi& phi, double scale) {
  if (!(scale > 0.0)) throw domain_error("phi_moment scale must be positive");
  if (d.is_discrete()) {
    compensated_sum s;
    if (d.kind() == distribution_kind::empirical) {
      for (double x : d.values()) s.add(phi(scale * std::abs(x)));
      const double v = s.value() / static_cast<double>(d.size());
      return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    }
    for (const auto& a : d.atoms()) s.add(a.probability * phi(scale * std::abs(a.value)));
    const double v = s.value();
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }
  const auto r = integrate_quantile(d, [&](double x) { return phi(scale * std::abs(x)); });
  if (!r.ok()) return std::numeric_limits<double>::infinity();
  return r.value;
}

}  // namespace lawrisk
