#pragma once

// Stationary ergodic sequences with a prescribed marginal law.
//
// Every kind pushes a stationary ergodic driver through the marginal's
// quantile function (a measurable factor map), so the marginal is exact and
// ergodicity is inherited:
//   iid     U_t iid uniform, X_t = F^{-1}(U_t)
//   ar1     Z_t = a Z_{t-1} + sqrt(1 - a^2) e_t with Z_1 ~ N(0,1), X_t = F^{-1}(Phi(Z_t))
//   markov  chain on m equiprobable quantile cells with transition
//           mix * (uniform matrix) + (1 - mix) * identity, X_t uniform within the cell

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "lawrisk/distribution.hpp"
#include "lawrisk/error.hpp"
#include "lawrisk/rng.hpp"
#include "lawrisk/special.hpp"

namespace lawrisk {

enum class process_kind { iid, ar1, markov };

/// The dependence structure of a process, without marginal or seed.
struct process_model {
  process_kind kind = process_kind::iid;
  double ar_coefficient = 0.0;  // ar1
  int states = 2;               // markov
  double mix = 1.0;             // markov

  static process_model iid() { return {}; }
  static process_model ar1(double a) { return {process_kind::ar1, a, 2, 1.0}; }
  static process_model markov(int m, double mix) { return {process_kind::markov, 0.0, m, mix}; }

  void validate() const {
    switch (kind) {
      case process_kind::iid: break;
      case process_kind::ar1:
        if (!(std::abs(ar_coefficient) < 1.0))
          throw domain_error("ar1 coefficient must lie in (-1,1)");
        break;
      case process_kind::markov:
        if (states < 2) throw domain_error("markov needs at least 2 states");
        if (!(mix > 0.0 && mix <= 1.0)) throw domain_error("markov mix must lie in (0,1]");
        break;
    }
  }

  /// Mini-language form: "iid", "ar1:0.8", "markov:4,0.5".
  std::string descriptor() const {
    std::ostringstream os;
    switch (kind) {
      case process_kind::iid: os << "iid"; break;
      case process_kind::ar1: os << "ar1:" << format_real(ar_coefficient); break;
      case process_kind::markov: os << "markov:" << states << ',' << format_real(mix); break;
    }
    return os.str();
  }

  bool operator==(const process_model&) const = default;
};

struct process_spec {
  process_model model;
  distribution marginal;
  std::uint64_t seed = 0;
};

namespace detail {

// F^{-1}(Phi(z)) without losing the tail: Phi(z) -> 1 is taken through the
// complement.
inline double gaussian_to_marginal(const distribution& d, double z) {
  if (z <= 0.0) {
    const double u = std::max(normal_cdf(z), std::numeric_limits<double>::denorm_min());
    return d.lower_quantile(u);
  }
  const double s = std::max(normal_cdf(-z), std::numeric_limits<double>::denorm_min());
  return d.upper_quantile(s);
}

}  // namespace detail

/// First n values of the process; stream `stream` of the spec's seed.
/// Deterministic in (spec, n, stream).
inline std::vector<double> generate(const process_spec& spec, std::size_t n,
                                    std::uint64_t stream = 0) {
  if (n == 0) throw domain_error("generate needs n >= 1");
  spec.model.validate();
  const distribution& f = spec.marginal;
  stream_rng rng(spec.seed, stream);
  std::vector<double> out;
  out.reserve(n);

  switch (spec.model.kind) {
    case process_kind::iid:
      for (std::size_t t = 0; t < n; ++t) out.push_back(f.quantile(rng.uniform()));
      break;
    case process_kind::ar1: {
      const double a = spec.model.ar_coefficient;
      if (a == 0.0) {
        // Degenerate chain: the Gaussian round trip is the identity on U.
        for (std::size_t t = 0; t < n; ++t) out.push_back(f.quantile(rng.uniform()));
        break;
      }
      const double innovation_scale = std::sqrt(1.0 - a * a);
      double z = normal_quantile(rng.uniform());
      out.push_back(detail::gaussian_to_marginal(f, z));
      for (std::size_t t = 1; t < n; ++t) {
        z = a * z + innovation_scale * normal_quantile(rng.uniform());
        out.push_back(detail::gaussian_to_marginal(f, z));
      }
      break;
    }
    case process_kind::markov: {
      const int m = spec.model.states;
      const double dm = static_cast<double>(m);
      auto draw_state = [&] { return std::min(m - 1, static_cast<int>(rng.uniform() * dm)); };
      int state = draw_state();
      for (std::size_t t = 0; t < n; ++t) {
        if (t > 0 && rng.uniform() < spec.model.mix) state = draw_state();
        const double u = (static_cast<double>(state) + rng.uniform()) / dm;
        out.push_back(f.quantile(std::min(u, 1.0 - 0x1.0p-53)));
      }
      break;
    }
  }
  return out;
}

struct birkhoff_result {
  bool passed;
  double final_mean;
  std::vector<double> running_means;
};

/// Running means of g(X_t); passes when the last one is within tol of target.
inline birkhoff_result birkhoff_check(std::span<const double> seq,
                                      const std::function<double(double)>& g, double target,
                                      double tol) {
  if (seq.empty()) throw domain_error("birkhoff_check needs a nonempty sequence");
  if (!std::isfinite(target)) throw domain_error("birkhoff_check target must be finite");
  birkhoff_result r;
  r.running_means.reserve(seq.size());
  compensated_sum s;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    s.add(g(seq[t]));
    r.running_means.push_back(s.value() / static_cast<double>(t + 1));
  }
  r.final_mean = r.running_means.back();
  r.passed = std::abs(r.final_mean - target) <= tol;
  return r;
}

}  // namespace lawrisk
