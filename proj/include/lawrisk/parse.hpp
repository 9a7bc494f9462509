#pragma once

// Text forms used by the CLI and configs:
//   distributions  uniform:a,b  normal:mu,sigma  lognormal:mu,sigma  pareto:alpha,xm
//                  point:c  empirical:<path>
//   measures       mean  es:p  es-minus:p  inter-es:p  stdev  semidev-upper
//                  semidev-lower  spectral:t1,l1;t2,l2;...  max
//   Orlicz         power:p  power-scaled:p  expm1  linear-exp:a
//   processes      iid  ar1:a  markov:m,mix
//
// Sample files hold one finite decimal per line, optionally preceded by a
// header line starting with '#'. Blank lines are ignored.

#include <charconv>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "lawrisk/distribution.hpp"
#include "lawrisk/error.hpp"
#include "lawrisk/measures.hpp"
#include "lawrisk/orlicz.hpp"
#include "lawrisk/processes.hpp"
#include "lawrisk/spectrum.hpp"

namespace lawrisk {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool to_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<double> numbers(std::string_view args, std::size_t expected,
                                   std::string_view form) {
  const auto parts = split(args, ',');
  if (parts.size() != expected)
    throw domain_error("'" + std::string(form) + "' expects " + std::to_string(expected) +
                       " comma-separated numbers");
  std::vector<double> v;
  for (auto p : parts) {
    double x;
    if (!to_double(p, x))
      throw domain_error("'" + std::string(form) + "': '" + std::string(p) + "' is not a number");
    v.push_back(x);
  }
  return v;
}

inline std::pair<std::string_view, std::string_view> head_args(std::string_view text) {
  text = trim(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return {text, {}};
  return {text.substr(0, colon), text.substr(colon + 1)};
}

inline void no_args(std::string_view head, std::string_view args) {
  if (!args.empty()) throw domain_error("'" + std::string(head) + "' takes no parameters");
}

}  // namespace detail

/// Finite reals, one per line. `path` is used in error messages.
inline std::vector<double> parse_samples(std::istream& in, const std::string& path) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = detail::trim(line);
    if (s.empty()) continue;
    if (lineno == 1 && s.front() == '#') continue;
    double x;
    if (!detail::to_double(s, x) || !std::isfinite(x))
      throw domain_error(path + ":" + std::to_string(lineno) + ": '" + std::string(s) +
                         "' is not a finite real");
    out.push_back(x);
  }
  if (out.empty()) throw domain_error(path + ": no samples");
  return out;
}

inline std::vector<double> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open sample file '" + path + "'");
  return parse_samples(in, path);
}

inline distribution parse_distribution(std::string_view text) {
  const auto [head, args] = detail::head_args(text);
  if (head == "uniform") {
    const auto v = detail::numbers(args, 2, "uniform:a,b");
    return uniform(v[0], v[1]);
  }
  if (head == "normal") {
    const auto v = detail::numbers(args, 2, "normal:mu,sigma");
    return normal(v[0], v[1]);
  }
  if (head == "lognormal") {
    const auto v = detail::numbers(args, 2, "lognormal:mu,sigma");
    return lognormal(v[0], v[1]);
  }
  if (head == "pareto") {
    const auto v = detail::numbers(args, 2, "pareto:alpha,xm");
    return pareto(v[0], v[1]);
  }
  if (head == "point") {
    const auto v = detail::numbers(args, 1, "point:c");
    if (!std::isfinite(v[0])) throw domain_error("point:c requires finite c");
    return point_mass(v[0]);
  }
  if (head == "empirical") {
    if (args.empty()) throw domain_error("'empirical:<path>' needs a file path");
    return empirical_from_samples(read_samples(std::string(args)));
  }
  throw domain_error("unknown distribution '" + std::string(text) + "'");
}

/// "t1,l1;t2,l2;..." with level l_i on (t_{i-1}, t_i], last t equal to 1.
inline spectrum parse_step_spectrum(std::string_view text) {
  std::vector<double> ts, ls;
  for (auto pair : detail::split(text, ';')) {
    const auto v = detail::numbers(pair, 2, "spectral:t,level;...");
    ts.push_back(v[0]);
    ls.push_back(v[1]);
  }
  return spectrum::step(std::move(ts), std::move(ls));
}

inline measure_id parse_measure(std::string_view text) {
  const auto [head, args] = detail::head_args(text);
  auto level = [&](std::string_view form) { return detail::numbers(args, 1, form)[0]; };
  if (head == "mean") return detail::no_args(head, args), measure_id::mean();
  if (head == "es") return measure_id::es(level("es:p"));
  if (head == "es-minus") return measure_id::es_minus(level("es-minus:p"));
  if (head == "inter-es") return measure_id::inter_es(level("inter-es:p"));
  if (head == "stdev") return detail::no_args(head, args), measure_id::stdev();
  if (head == "semidev-upper") return detail::no_args(head, args), measure_id::semidev_upper();
  if (head == "semidev-lower") return detail::no_args(head, args), measure_id::semidev_lower();
  if (head == "max") return detail::no_args(head, args), measure_id::sample_max();
  if (head == "spectral") {
    if (args.empty()) throw domain_error("'spectral:<t,l;...>' needs a step spectrum");
    return measure_id::spectral(parse_step_spectrum(args));
  }
  throw domain_error("unknown measure '" + std::string(text) + "'");
}

inline orlicz_function parse_orlicz(std::string_view text) {
  const auto [head, args] = detail::head_args(text);
  if (head == "power") return orlicz_function::power(detail::numbers(args, 1, "power:p")[0]);
  if (head == "power-scaled")
    return orlicz_function::power_scaled(detail::numbers(args, 1, "power-scaled:p")[0]);
  if (head == "expm1") return detail::no_args(head, args), orlicz_function::expm1();
  if (head == "linear-exp")
    return orlicz_function::linear_exp(detail::numbers(args, 1, "linear-exp:a")[0]);
  throw domain_error("unknown Orlicz function '" + std::string(text) + "'");
}

inline process_model parse_process(std::string_view text) {
  const auto [head, args] = detail::head_args(text);
  process_model m;
  if (head == "iid") {
    detail::no_args(head, args);
  } else if (head == "ar1") {
    m = process_model::ar1(detail::numbers(args, 1, "ar1:a")[0]);
  } else if (head == "markov") {
    const auto v = detail::numbers(args, 2, "markov:m,mix");
    if (v[0] != std::floor(v[0]) || v[0] > 1e6)
      throw domain_error("markov:m,mix requires an integer number of states");
    m = process_model::markov(static_cast<int>(v[0]), v[1]);
  } else {
    throw domain_error("unknown process '" + std::string(text) + "'");
  }
  m.validate();
  return m;
}

/// Comma-separated list of numbers, e.g. "0.1,0.5,1".
inline std::vector<double> parse_number_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  for (auto p : detail::split(text, ',')) {
    double x;
    if (!detail::to_double(p, x))
      throw domain_error(std::string(what) + ": '" + std::string(p) + "' is not a number");
    out.push_back(x);
  }
  return out;
}

}  // namespace lawrisk
