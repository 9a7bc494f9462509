#pragma once

// Finite-dimensional bench for order boundedness and the convexity-based
// continuity bound. A finite weighted probability space is a Banach lattice
// under the coordinatewise order, so order intervals, |X| and suprema over
// boxes are all concrete here.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "lawrisk/detail/parallel.hpp"
#include "lawrisk/distribution.hpp"
#include "lawrisk/error.hpp"
#include "lawrisk/measures.hpp"
#include "lawrisk/rng.hpp"

namespace lawrisk::lab {

/// Probability weights on k points, all positive, summing to 1.
class finite_space {
 public:
  explicit finite_space(std::vector<double> weights)
      : weights_(std::make_shared<const std::vector<double>>(std::move(weights))) {
    if (weights_->empty()) throw domain_error("finite space needs at least one point");
    compensated_sum s;
    for (double w : *weights_) {
      if (!(w > 0.0)) throw domain_error("finite space weights must be positive");
      s.add(w);
    }
    if (std::abs(s.value() - 1.0) > 1e-12) throw domain_error("finite space weights must sum to 1");
  }

  static finite_space uniform(std::size_t k) {
    return finite_space(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }

  std::size_t dim() const { return weights_->size(); }
  const std::vector<double>& weights() const { return *weights_; }

  bool operator==(const finite_space& o) const {
    return weights_ == o.weights_ || *weights_ == *o.weights_;
  }

 private:
  std::shared_ptr<const std::vector<double>> weights_;
};

/// A random variable on a finite_space: one value per point.
class finite_rv {
 public:
  finite_rv(finite_space space, std::vector<double> values)
      : space_(std::move(space)), values_(std::move(values)) {
    if (values_.size() != space_.dim())
      throw domain_error("random variable dimension does not match its space");
  }

  static finite_rv constant(const finite_space& s, double c) {
    return {s, std::vector<double>(s.dim(), c)};
  }

  const finite_space& space() const { return space_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t dim() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  template <class F>
  finite_rv map(F&& f) const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(values_[i]);
    return {space_, std::move(v)};
  }

  template <class F>
  finite_rv zip(const finite_rv& o, F&& f) const {
    if (!(space_ == o.space_)) throw domain_error("random variables live on different spaces");
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(values_[i], o.values_[i]);
    return {space_, std::move(v)};
  }

  friend finite_rv operator+(const finite_rv& a, const finite_rv& b) {
    return a.zip(b, [](double x, double y) { return x + y; });
  }
  friend finite_rv operator-(const finite_rv& a, const finite_rv& b) {
    return a.zip(b, [](double x, double y) { return x - y; });
  }
  friend finite_rv operator*(double c, const finite_rv& a) {
    return a.map([c](double x) { return c * x; });
  }
  friend finite_rv operator+(const finite_rv& a, double c) {
    return a.map([c](double x) { return x + c; });
  }
  friend finite_rv operator-(const finite_rv& a, double c) { return a + (-c); }
  finite_rv operator-() const {
    return map([](double x) { return -x; });
  }

 private:
  finite_space space_;
  std::vector<double> values_;
};

inline finite_rv abs(const finite_rv& x) {
  return x.map([](double v) { return std::abs(v); });
}
inline finite_rv positive_part(const finite_rv& x) {
  return x.map([](double v) { return v > 0.0 ? v : 0.0; });
}
inline finite_rv negative_part(const finite_rv& x) {
  return x.map([](double v) { return v < 0.0 ? -v : 0.0; });
}

/// Coordinatewise a <= b + tol.
inline bool leq(const finite_rv& a, const finite_rv& b, double tol = 0.0) {
  for (std::size_t i = 0; i < a.dim(); ++i)
    if (a[i] > b[i] + tol) return false;
  return true;
}

inline double expectation(const finite_rv& x) {
  compensated_sum s;
  for (std::size_t i = 0; i < x.dim(); ++i) s.add(x.space().weights()[i] * x[i]);
  return s.value();
}

/// Weighted L^2 norm.
inline double norm2(const finite_rv& x) {
  compensated_sum s;
  for (std::size_t i = 0; i < x.dim(); ++i) s.add(x.space().weights()[i] * x[i] * x[i]);
  return std::sqrt(s.value());
}

inline double max_norm(const finite_rv& x) {
  double m = 0.0;
  for (double v : x.values()) m = std::max(m, std::abs(v));
  return m;
}

/// The induced law: one atom per point.
inline distribution to_distribution(const finite_rv& x) {
  std::vector<atom> atoms;
  atoms.reserve(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) atoms.push_back({x[i], x.space().weights()[i]});
  return distribution::atomic(std::move(atoms));
}

// ---------------------------------------------------------------------------

enum class functional_kind { stdev, semidev_upper, semidev_lower, inter_es, max_of_affine };

struct affine_piece {
  std::vector<double> coefficients;
  double offset = 0.0;
};

/// A convex functional on finite_rv. The named measures act through the
/// induced atomic law; max_of_affine is x -> max_j (c_j . x + b_j).
class convex_functional {
 public:
  static convex_functional stdev() { return convex_functional(functional_kind::stdev); }
  static convex_functional semidev_upper() {
    return convex_functional(functional_kind::semidev_upper);
  }
  static convex_functional semidev_lower() {
    return convex_functional(functional_kind::semidev_lower);
  }
  static convex_functional inter_es(double p) {
    if (!(p > 0.0 && p < 1.0)) throw domain_error("inter_es level p must lie in (0,1)");
    convex_functional f(functional_kind::inter_es);
    f.p_ = p;
    return f;
  }
  static convex_functional max_of_affine(std::vector<affine_piece> pieces) {
    if (pieces.empty()) throw domain_error("max_of_affine needs at least one piece");
    convex_functional f(functional_kind::max_of_affine);
    f.pieces_ = std::move(pieces);
    return f;
  }

  functional_kind kind() const { return kind_; }
  double p() const { return p_; }

  std::string name() const {
    switch (kind_) {
      case functional_kind::stdev: return "stdev";
      case functional_kind::semidev_upper: return "semidev-upper";
      case functional_kind::semidev_lower: return "semidev-lower";
      case functional_kind::inter_es: return measure_id::inter_es(p_).name();
      case functional_kind::max_of_affine: return "max-of-affine";
    }
    return "";
  }

  double operator()(const finite_rv& x) const {
    switch (kind_) {
      case functional_kind::stdev: return lawrisk::stdev(to_distribution(x));
      case functional_kind::semidev_upper: return lawrisk::semidev_upper(to_distribution(x));
      case functional_kind::semidev_lower: return lawrisk::semidev_lower(to_distribution(x));
      case functional_kind::inter_es: return lawrisk::inter_es(to_distribution(x), p_);
      case functional_kind::max_of_affine: {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& piece : pieces_) {
          if (piece.coefficients.size() != x.dim())
            throw domain_error("affine piece dimension does not match the variable");
          double v = piece.offset;
          for (std::size_t i = 0; i < x.dim(); ++i) v += piece.coefficients[i] * x[i];
          best = std::max(best, v);
        }
        return best;
      }
    }
    return 0.0;
  }

 private:
  explicit convex_functional(functional_kind k) : kind_(k) {}

  functional_kind kind_;
  double p_ = 0.0;
  std::vector<affine_piece> pieces_;
};

// ---------------------------------------------------------------------------

/// The 2^k vertices of the box [lo, hi] (k <= 20).
inline std::vector<finite_rv> box_corners(const finite_rv& lo, const finite_rv& hi) {
  const std::size_t k = lo.dim();
  if (k > 20) throw domain_error("box_corners supports at most 20 dimensions");
  std::vector<finite_rv> out;
  out.reserve(std::size_t{1} << k);
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    std::vector<double> v(k);
    for (std::size_t i = 0; i < k; ++i) v[i] = (mask >> i) & 1u ? hi[i] : lo[i];
    out.emplace_back(lo.space(), std::move(v));
  }
  return out;
}

/// `count` points drawn coordinatewise uniform on the order interval
/// [U, V], followed by its 2^k corners when k <= 10.
inline std::vector<finite_rv> order_interval_sample(const finite_rv& u, const finite_rv& v,
                                                    std::size_t count, std::uint64_t seed) {
  if (!(u.space() == v.space())) throw domain_error("order interval ends live on different spaces");
  if (!leq(u, v)) throw domain_error("order interval requires U <= V coordinatewise");
  stream_rng rng(seed, 0);
  std::vector<finite_rv> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<double> x(u.dim());
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = u[i] == v[i] ? u[i] : std::clamp(rng.uniform(u[i], v[i]), u[i], v[i]);
    out.emplace_back(u.space(), std::move(x));
  }
  if (u.dim() <= 10) {
    auto corners = box_corners(u, v);
    out.insert(out.end(), corners.begin(), corners.end());
  }
  return out;
}

namespace detail {
inline void require_in_interval(const finite_rv& x, const finite_rv& u, const finite_rv& v) {
  if (!(x.space() == u.space()) || !(x.space() == v.space()))
    throw domain_error("X, U, V must live on the same space");
  if (!leq(u, x) || !leq(x, v)) throw domain_error("requires U <= X <= V coordinatewise");
}
}  // namespace detail

/// Outcome of the three pointwise chains for sigma, sigma_+ and sigma_-:
///   U - E[V] <= X - E[X] <= V - E[U]
///   0 <= (X - E[X])^+ <= (V - E[U])^+
///   0 <= (X - E[X])^- <= (U - E[V])^-
struct example1_result {
  bool centered;
  bool upper;
  bool lower;
  bool all() const { return centered && upper && lower; }
};

inline example1_result example1_bounds_check(const finite_rv& x, const finite_rv& u,
                                             const finite_rv& v) {
  detail::require_in_interval(x, u, v);
  constexpr double tol = 1e-12;
  const finite_rv xc = x - expectation(x);
  const finite_rv lo = u - expectation(v);
  const finite_rv hi = v - expectation(u);
  const finite_rv zero = finite_rv::constant(x.space(), 0.0);
  example1_result r;
  r.centered = leq(lo, xc, tol) && leq(xc, hi, tol);
  r.upper = leq(zero, positive_part(xc), tol) && leq(positive_part(xc), positive_part(hi), tol);
  r.lower = leq(zero, negative_part(xc), tol) && leq(negative_part(xc), negative_part(lo), tol);
  return r;
}

/// sigma_+(X) <= ||(V - E[U])^+|| and sigma_-(X) <= ||(U - E[V])^-||, with
/// the semideviations computed from the induced law.
struct example1_norm_result {
  bool upper;
  bool lower;
};

inline example1_norm_result example1_norm_bounds_check(const finite_rv& x, const finite_rv& u,
                                                       const finite_rv& v) {
  detail::require_in_interval(x, u, v);
  const auto devs = compute_deviations(to_distribution(x));
  const double up_bound = norm2(positive_part(v - expectation(u)));
  const double lo_bound = norm2(negative_part(u - expectation(v)));
  return {devs.upper <= up_bound + 1e-12, devs.lower <= lo_bound + 1e-12};
}

/// inter_es_p(X) <= ES_p(V) + ES_p(-U).
inline bool example2_bound_check(const finite_rv& x, const finite_rv& u, const finite_rv& v,
                                 double p) {
  detail::require_in_interval(x, u, v);
  if (!(p > 0.0 && p < 1.0)) throw domain_error("p must lie in (0,1)");
  const double lhs = inter_es(to_distribution(x), p);
  const double rhs = es(to_distribution(v), p) + es(to_distribution(-u), p);
  return lhs <= rhs + 1e-10;
}

struct continuity_result {
  bool holds;
  double gap;    // |rho(X) - rho(Xn)|
  double bound;  // eps * (M - rho(X))
  double m;      // sampled sup of rho(X + Z) over |Z| <= Y
};

/// Checks |rho(X) - rho(Xn)| <= eps (M - rho(X)) where M bounds rho on the
/// order interval [X - Y, X + Y], given |Xn - X| <= eps Y.
///
/// M is the maximum over Z = 0, the corners of [-Y, Y] (all of them for
/// k <= 10, 1024 random ones otherwise) and `fill` random interior points.
/// A convex functional attains its maximum over a box at a vertex, so with
/// all corners enumerated M is the exact supremum.
inline continuity_result continuity_bound_check(const convex_functional& rho, const finite_rv& x,
                                                const finite_rv& y, const finite_rv& xn,
                                                double eps, std::uint64_t seed = 0,
                                                std::size_t fill = 64) {
  if (!(eps > 0.0 && eps <= 1.0)) throw domain_error("eps must lie in (0,1]");
  if (!(x.space() == y.space()) || !(x.space() == xn.space()))
    throw domain_error("X, Y, Xn must live on the same space");
  const finite_rv zero = finite_rv::constant(x.space(), 0.0);
  if (!leq(zero, y)) throw domain_error("Y must be nonnegative");
  const finite_rv diff = abs(xn - x);
  for (std::size_t i = 0; i < x.dim(); ++i)
    if (diff[i] > eps * y[i] + 1e-12 * (1.0 + std::abs(x[i])))
      throw domain_error("requires |Xn - X| <= eps * Y coordinatewise");

  const double rho_x = rho(x);
  double m = rho_x;
  stream_rng rng(seed, 1);
  if (x.dim() <= 10) {
    for (const auto& z : box_corners(-y, y)) m = std::max(m, rho(x + z));
  } else {
    for (int c = 0; c < 1024; ++c) {
      std::vector<double> z(x.dim());
      for (std::size_t i = 0; i < z.size(); ++i) z[i] = (rng.bits() & 1u) ? y[i] : -y[i];
      m = std::max(m, rho(x + finite_rv(x.space(), std::move(z))));
    }
  }
  for (std::size_t c = 0; c < fill; ++c) {
    std::vector<double> z(x.dim());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = rng.uniform(-y[i], y[i]);
    m = std::max(m, rho(x + finite_rv(x.space(), std::move(z))));
  }
  continuity_result r;
  r.gap = std::abs(rho_x - rho(xn));
  r.bound = eps * (m - rho_x);
  r.m = m;
  r.holds = r.gap <= r.bound + 1e-9;
  return r;
}

struct domination_result {
  std::vector<std::size_t> indices;       // selected n_k (1-based), k = 1, 2, ...
  std::vector<finite_rv> partial_sums;    // W_k = sum_{i<=k} i |X_{n_i} - X|
  finite_rv y;                            // the limit of W_k
  double truncation_bound;                // bound on the omitted tail of the series
  bool verified;                          // |X_{n_k} - X| <= Y / k for every selected k
};

/// Dominating element for a max-norm convergent sequence: picks n_1 < n_2 < ...
/// with n_k ||X_{n_k} - X||_inf <= 2^-k and sums Y = sum_k k |X_{n_k} - X|.
/// Selection stops when the prefix runs out or the terms fall below 1e-300.
inline domination_result domination_sequence(const std::vector<finite_rv>& seq,
                                             const finite_rv& x) {
  domination_result r{{}, {}, finite_rv::constant(x.space(), 0.0), 0.0, true};
  std::size_t k = 1;
  for (std::size_t n = 1; n <= seq.size() && k < 1000; ++n) {
    const finite_rv d = abs(seq[n - 1] - x);
    const double dist = max_norm(d);
    if (static_cast<double>(n) * dist > std::ldexp(1.0, -static_cast<int>(k))) continue;
    r.indices.push_back(n);
    r.y = r.y + static_cast<double>(k) * d;
    r.partial_sums.push_back(r.y);
    ++k;
    if (dist != 0.0 && dist < 1e-300) break;
  }
  if (r.indices.empty())
    throw insufficient_convergence_error(
        "no index n in the prefix satisfies n * ||X_n - X|| <= 1/2");
  // Omitted terms satisfy k ||.|| <= k 2^-k / n_k <= k 2^-k; their sum from K+1 on is
  // (K + 2) 2^-K.
  const double K = static_cast<double>(r.indices.size());
  r.truncation_bound = (K + 2.0) * std::ldexp(1.0, -static_cast<int>(r.indices.size()));
  for (std::size_t j = 0; j < r.indices.size(); ++j) {
    const double kk = static_cast<double>(j + 1);
    const finite_rv d = abs(seq[r.indices[j] - 1] - x);
    for (std::size_t i = 0; i < x.dim(); ++i)
      if (d[i] > r.y[i] / kk * (1.0 + 1e-15)) r.verified = false;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Randomised trial suites. Trial i draws from stream (seed, i), so results do
// not depend on scheduling.

struct trial_summary {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  bool passed() const { return failures == 0; }
};

namespace detail {

inline finite_space random_space(std::size_t k, stream_rng& rng) {
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) total += (x = rng.uniform(0.1, 1.0));
  for (auto& x : w) x /= total;
  // Push the rounding residue onto the largest weight.
  const double residue = 1.0 - std::accumulate(w.begin(), w.end(), 0.0);
  *std::max_element(w.begin(), w.end()) += residue;
  return finite_space(std::move(w));
}

inline finite_rv random_rv(const finite_space& s, double lo, double hi, stream_rng& rng) {
  std::vector<double> v(s.dim());
  for (auto& x : v) x = rng.uniform(lo, hi);
  return {s, std::move(v)};
}

struct interval_triple {
  finite_rv x, u, v;
};

inline interval_triple random_triple(std::size_t k, stream_rng& rng) {
  const auto s = random_space(k, rng);
  const finite_rv u = random_rv(s, -2.0, 2.0, rng);
  std::vector<double> v(k), x(k);
  for (std::size_t i = 0; i < k; ++i) {
    v[i] = u[i] + rng.uniform(0.0, 2.0);
    x[i] = std::clamp(u[i] + rng.uniform() * (v[i] - u[i]), u[i], v[i]);
  }
  return {finite_rv(s, std::move(x)), u, finite_rv(s, std::move(v))};
}

inline std::size_t count_failures(std::size_t trials, const auto& trial) {
  std::vector<char> failed(trials, 0);
  lawrisk::detail::parallel_for(trials, [&](std::size_t i) { failed[i] = trial(i) ? 0 : 1; });
  return static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
}

}  // namespace detail

/// Example-1 chains plus the implied semideviation norm bounds on random triples.
inline trial_summary run_example1_trials(std::size_t dim, std::size_t trials, std::uint64_t seed) {
  if (dim == 0) throw domain_error("dim must be positive");
  const auto failures = detail::count_failures(trials, [&](std::size_t i) {
    stream_rng rng(seed, i);
    const auto t = detail::random_triple(dim, rng);
    const auto chains = example1_bounds_check(t.x, t.u, t.v);
    const auto norms = example1_norm_bounds_check(t.x, t.u, t.v);
    return chains.all() && norms.upper && norms.lower;
  });
  return {"example1", trials, failures};
}

inline trial_summary run_example2_trials(std::size_t dim, double p, std::size_t trials,
                                         std::uint64_t seed) {
  if (dim == 0) throw domain_error("dim must be positive");
  const auto failures = detail::count_failures(trials, [&](std::size_t i) {
    stream_rng rng(seed, i);
    const auto t = detail::random_triple(dim, rng);
    return example2_bound_check(t.x, t.u, t.v, p);
  });
  return {"example2 p=" + format_real(p), trials, failures};
}

/// Random continuity-bound instance: X, Y >= 0 and Xn = X + eps * Y * r with
/// r uniform in (-1,1)^k. The functional is built by `make_rho` from the
/// trial's stream and dimension.
template <class MakeRho>
trial_summary run_continuity_trials(std::string name, std::size_t dim, double eps,
                                    std::size_t trials, std::uint64_t seed, MakeRho&& make_rho) {
  if (dim == 0) throw domain_error("dim must be positive");
  const auto failures = detail::count_failures(trials, [&](std::size_t i) {
    stream_rng rng(seed, i);
    const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(dim));
    const auto s = detail::random_space(std::min(k, dim), rng);
    const finite_rv x = detail::random_rv(s, -2.0, 2.0, rng);
    const finite_rv y = detail::random_rv(s, 0.0, 1.0, rng);
    std::vector<double> xn(s.dim());
    for (std::size_t j = 0; j < xn.size(); ++j) xn[j] = x[j] + eps * y[j] * rng.uniform(-1.0, 1.0);
    const convex_functional rho = make_rho(s.dim(), rng);
    return continuity_bound_check(rho, x, y, finite_rv(s, std::move(xn)), eps, rng.bits(), 16)
        .holds;
  });
  return {std::move(name) + " eps=" + format_real(eps), trials, failures};
}

inline convex_functional random_max_of_affine(std::size_t dim, stream_rng& rng,
                                              std::size_t pieces = 4) {
  std::vector<affine_piece> ps(pieces);
  for (auto& p : ps) {
    p.coefficients.resize(dim);
    for (auto& c : p.coefficients) c = rng.uniform(-2.0, 2.0);
    p.offset = rng.uniform(-1.0, 1.0);
  }
  return convex_functional::max_of_affine(std::move(ps));
}

/// X_n = X + decay^n D on a random space; checks the domination property.
inline trial_summary run_domination_trial(double decay, std::size_t len, std::size_t dim,
                                          std::uint64_t seed, domination_result* out = nullptr) {
  if (!(decay > 0.0 && decay < 1.0)) throw domain_error("decay must lie in (0,1)");
  if (len == 0 || dim == 0) throw domain_error("len and dim must be positive");
  stream_rng rng(seed, 0);
  const auto s = detail::random_space(dim, rng);
  const finite_rv x = detail::random_rv(s, -2.0, 2.0, rng);
  const finite_rv d = detail::random_rv(s, -1.0, 1.0, rng);
  std::vector<finite_rv> seq;
  seq.reserve(len);
  for (std::size_t n = 1; n <= len; ++n)
    seq.push_back(x + std::pow(decay, static_cast<double>(n)) * d);
  auto r = domination_sequence(seq, x);
  const bool ok = r.verified;
  if (out) *out = std::move(r);
  return {"domination", 1, ok ? 0u : 1u};
}

}  // namespace lawrisk::lab
