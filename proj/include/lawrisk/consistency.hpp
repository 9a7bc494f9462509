#pragma once

// Strong-consistency experiments: plug-in estimates rho_n = R_rho(empirical
// law of X_1..X_n) along a schedule of sample sizes, one long path per
// replication evaluated at each scheduled prefix.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <tuple>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lawrisk/detail/parallel.hpp"
#include "lawrisk/distribution.hpp"
#include "lawrisk/error.hpp"
#include "lawrisk/measures.hpp"
#include "lawrisk/orlicz.hpp"
#include "lawrisk/processes.hpp"

namespace lawrisk {

/// rho evaluated on the empirical law of the samples.
inline double empirical_estimate(const measure_id& m, std::span<const double> samples) {
  return evaluate(m, empirical_from_samples(samples));
}

struct replication_trajectory {
  std::uint64_t id = 0;
  std::vector<double> estimates;  // one per scheduled n

  bool operator==(const replication_trajectory&) const = default;
};

struct schedule_summary {
  std::size_t n = 0;
  double mae = 0.0;
  double max_err = 0.0;
  double frac_within_tol = 0.0;

  bool operator==(const schedule_summary&) const = default;
};

struct consistency_report {
  std::string measure;
  std::string dist;
  std::string process;
  std::uint64_t seed = 0;
  std::vector<std::size_t> schedule;
  double target = 0.0;
  std::string target_method;  // "closed-form", "exact" or "quadrature"
  double tol = 0.0;
  std::vector<replication_trajectory> replications;
  std::vector<schedule_summary> summary;

  bool operator==(const consistency_report&) const = default;
};

inline void validate_schedule(const std::vector<std::size_t>& schedule) {
  if (schedule.empty()) throw domain_error("schedule must contain at least one sample size");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] == 0) throw domain_error("schedule sample sizes must be positive");
    if (i > 0 && schedule[i] <= schedule[i - 1])
      throw domain_error("schedule must be strictly increasing");
  }
}

/// Estimates along the schedule for each replication r, using stream
/// (seed, r). No target is needed, so this also serves functionals whose
/// population value is infinite.
inline std::vector<replication_trajectory> simulate_trajectories(
    const measure_id& m, const process_spec& spec, const std::vector<std::size_t>& schedule,
    std::size_t replications) {
  validate_schedule(schedule);
  if (replications == 0) throw domain_error("replications must be at least 1");
  spec.model.validate();
  std::vector<replication_trajectory> out(replications);
  detail::parallel_for(replications, [&](std::size_t r) {
    const auto path = generate(spec, schedule.back(), r);
    auto& traj = out[r];
    traj.id = r;
    traj.estimates.reserve(schedule.size());
    for (std::size_t n : schedule)
      traj.estimates.push_back(
          empirical_estimate(m, std::span<const double>(path.data(), n)));
  });
  return out;
}

/// Per-n error summary, recomputed from the trajectories.
inline std::vector<schedule_summary> summarize(const std::vector<std::size_t>& schedule,
                                               const std::vector<replication_trajectory>& reps,
                                               double target, double tol) {
  std::vector<schedule_summary> out;
  for (std::size_t j = 0; j < schedule.size(); ++j) {
    schedule_summary s;
    s.n = schedule[j];
    double sum = 0.0;
    std::size_t within = 0;
    for (const auto& r : reps) {
      const double err = std::abs(r.estimates.at(j) - target);
      sum += err;
      s.max_err = std::max(s.max_err, err);
      if (err <= tol) ++within;
    }
    s.mae = sum / static_cast<double>(reps.size());
    s.frac_within_tol = static_cast<double>(within) / static_cast<double>(reps.size());
    out.push_back(s);
  }
  return out;
}

/// Target value rho(X) and how it was obtained.
inline std::pair<double, std::string> consistency_target(const measure_id& m,
                                                         const distribution& marginal) {
  if (auto v = closed_form(m, marginal)) return {*v, "closed-form"};
  try {
    return {evaluate(m, marginal), marginal.is_discrete() ? "exact" : "quadrature"};
  } catch (const non_integrable_error& e) {
    throw non_integrable_error(std::string("consistency target is not finite, refusing to run: ") +
                                   e.what(),
                               e.sign());
  }
}

inline consistency_report run_consistency(const measure_id& m, const distribution& marginal,
                                          const process_model& model,
                                          const std::vector<std::size_t>& schedule,
                                          std::size_t replications, std::uint64_t seed,
                                          double tol) {
  if (!(tol >= 0.0)) throw domain_error("tolerance must be nonnegative");
  consistency_report rep;
  std::tie(rep.target, rep.target_method) = consistency_target(m, marginal);
  rep.measure = m.name();
  rep.dist = marginal.descriptor();
  rep.process = model.descriptor();
  rep.seed = seed;
  rep.schedule = schedule;
  rep.tol = tol;
  rep.replications =
      simulate_trajectories(m, process_spec{model, marginal, seed}, schedule, replications);
  rep.summary = summarize(schedule, rep.replications, rep.target, tol);
  return rep;
}

/// Phi-weak diagnostics of the empirical laws of prefixes of one sampled path.
struct phi_weak_experiment {
  std::string dist;
  std::string phi;
  std::string process;
  std::uint64_t seed = 0;
  std::vector<std::size_t> schedule;
  double tol_w = 0.0;
  double tol_m = 0.0;
  std::vector<phi_weak_diagnostic> diagnostics;

  bool converged() const { return !diagnostics.empty() && diagnostics.back().converged; }
};

inline phi_weak_experiment run_phi_weak_experiment(const distribution& target,
                                                   const orlicz_function& phi,
                                                   const process_model& model,
                                                   const std::vector<std::size_t>& schedule,
                                                   std::uint64_t seed, double tol_w,
                                                   double tol_m) {
  validate_schedule(schedule);
  const auto path = generate(process_spec{model, target, seed}, schedule.back());
  std::vector<distribution> seq;
  seq.reserve(schedule.size());
  for (std::size_t n : schedule)
    seq.push_back(empirical_from_samples(std::span<const double>(path.data(), n)));
  phi_weak_experiment e{target.descriptor(), phi.name(), model.descriptor(), seed, schedule,
                        tol_w, tol_m, {}};
  e.diagnostics = phi_weak_check(seq, target, phi, tol_w, tol_m);
  return e;
}

// ---------------------------------------------------------------------------
// Serialisation

inline nlohmann::ordered_json to_json(const phi_weak_experiment& e) {
  nlohmann::ordered_json j;
  j["dist"] = e.dist;
  j["phi"] = e.phi;
  j["process"] = e.process;
  j["seed"] = e.seed;
  j["schedule"] = e.schedule;
  j["tol_w"] = e.tol_w;
  j["tol_m"] = e.tol_m;
  auto& diags = j["diagnostics"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < e.diagnostics.size(); ++i) {
    nlohmann::ordered_json d;
    d["n"] = e.schedule[i];
    d["levy_distance"] = e.diagnostics[i].levy_distance;
    d["moment_gap"] = e.diagnostics[i].moment_gap;
    d["converged"] = e.diagnostics[i].converged;
    diags.push_back(std::move(d));
  }
  j["converged"] = e.converged();
  return j;
}

inline nlohmann::ordered_json to_json(const consistency_report& r) {
  nlohmann::ordered_json j;
  j["measure"] = r.measure;
  j["dist"] = r.dist;
  j["process"] = r.process;
  j["seed"] = r.seed;
  j["schedule"] = r.schedule;
  j["target"] = r.target;
  j["target_method"] = r.target_method;
  j["tol"] = r.tol;
  auto& reps = j["replications"] = nlohmann::ordered_json::array();
  for (const auto& t : r.replications) {
    nlohmann::ordered_json e;
    e["id"] = t.id;
    e["estimates"] = t.estimates;
    reps.push_back(std::move(e));
  }
  auto& sum = j["summary"] = nlohmann::ordered_json::array();
  for (const auto& s : r.summary) {
    nlohmann::ordered_json e;
    e["n"] = s.n;
    e["mae"] = s.mae;
    e["max_err"] = s.max_err;
    e["frac_within_tol"] = s.frac_within_tol;
    sum.push_back(std::move(e));
  }
  return j;
}

inline consistency_report report_from_json(const nlohmann::ordered_json& j) {
  try {
    consistency_report r;
    r.measure = j.at("measure").get<std::string>();
    r.dist = j.at("dist").get<std::string>();
    r.process = j.at("process").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.schedule = j.at("schedule").get<std::vector<std::size_t>>();
    r.target = j.at("target").get<double>();
    r.target_method = j.value("target_method", std::string{});
    r.tol = j.value("tol", 0.0);
    for (const auto& e : j.at("replications"))
      r.replications.push_back(
          {e.at("id").get<std::uint64_t>(), e.at("estimates").get<std::vector<double>>()});
    for (const auto& e : j.at("summary"))
      r.summary.push_back({e.at("n").get<std::size_t>(), e.at("mae").get<double>(),
                           e.at("max_err").get<double>(), e.at("frac_within_tol").get<double>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw domain_error(std::string("malformed consistency report: ") + e.what());
  }
}

enum class report_format { json, csv };

inline std::string report_csv(const consistency_report& r) {
  std::string out = "replication,n,estimate,target,abs_error\n";
  char buf[160];
  for (const auto& t : r.replications) {
    for (std::size_t j = 0; j < r.schedule.size(); ++j) {
      const double est = t.estimates.at(j);
      std::snprintf(buf, sizeof buf, "%llu,%zu,%.17g,%.17g,%.17g\n",
                    static_cast<unsigned long long>(t.id), r.schedule[j], est, r.target,
                    std::abs(est - r.target));
      out += buf;
    }
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw io_error("failed writing '" + path + "'");
}

inline void export_report(const consistency_report& r, const std::string& path,
                          report_format format) {
  write_text_file(path, format == report_format::json ? to_json(r).dump(2) + "\n" : report_csv(r));
}

inline consistency_report import_report_json(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open '" + path + "' for reading");
  nlohmann::ordered_json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw domain_error(path + ": invalid JSON: " + e.what());
  }
  return report_from_json(j);
}

}  // namespace lawrisk
