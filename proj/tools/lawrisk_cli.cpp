// lawrisk command-line front end.
//
// Exit codes: 0 success, 1 validation or domain error, 2 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lawrisk/lawrisk.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kFooter = R"(Mini-languages:
  --dist      uniform:a,b   normal:mu,sigma   lognormal:mu,sigma   pareto:alpha,xm
              point:c       empirical:<path>  (one real per line, optional '#' header)
  --measure   mean  es:0.9  es-minus:0.1  inter-es:0.9  stdev  semidev-upper
              semidev-lower  max  spectral:<t1,l1;t2,l2;...>
              (level l_i on (t_{i-1}, t_i], last t = 1; e.g. spectral:0.5,0;1,2 = es:0.5)
  --phi       power:2  power-scaled:2  expm1  linear-exp:0.5
  --process   iid  ar1:0.8  markov:4,0.5

Examples:
  lawrisk eval --measure es:0.9 --dist uniform:-1,1
  lawrisk norm --phi power:2 --dist normal:0,1
  lawrisk consistency --measure inter-es:0.9 --dist uniform:-1,1 --process ar1:0.8 \
      --ns 100,1000,10000,100000 --reps 20 --seed 42 --tol 0.05 --out report.json
  lawrisk lab example2 --dim 8 --p 0.9 --trials 1000 --seed 7

Any flag set can also be given as a JSON object with --config <path>, e.g.
  {"measure": "es:0.9", "dist": "uniform:-1,1"}; command-line flags take precedence.)";

struct global_flags {
  bool json = false;
  std::string out;
  std::uint64_t seed = 42;
};

std::string fmt_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void emit(const global_flags& g, const json& j, const std::string& text) {
  const std::string body = g.json ? j.dump(2) + "\n" : text;
  if (g.out.empty()) {
    std::cout << body;
  } else {
    lawrisk::write_text_file(g.out, body);
  }
}

std::vector<std::size_t> parse_sizes(const std::string& text, const char* flag) {
  std::vector<std::size_t> out;
  for (double x : lawrisk::parse_number_list(text, flag)) {
    if (!(x >= 1.0) || x != static_cast<double>(static_cast<std::size_t>(x)))
      throw lawrisk::domain_error(std::string(flag) + ": sample sizes must be positive integers");
    out.push_back(static_cast<std::size_t>(x));
  }
  return out;
}

// Splices flags from a --config JSON object into argv, right after the
// subcommand names, so explicit flags given later on the command line win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw lawrisk::io_error("--config: cannot open '" + path + "'");
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw lawrisk::domain_error("--config: '" + path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw lawrisk::domain_error("--config: top level must be an object");

  std::vector<std::string> extra;
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
    } else if (value.is_string()) {
      extra.push_back(flag);
      extra.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      extra.push_back(flag);
      extra.push_back(value.dump());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& e : value) {
        if (!joined.empty()) joined += ',';
        joined += e.is_string() ? e.get<std::string>() : e.dump();
      }
      extra.push_back(flag);
      extra.push_back(joined);
    } else {
      throw lawrisk::domain_error("--config: unsupported value for '" + key + "'");
    }
  }

  static const std::vector<std::string> commands{
      "eval", "estimate", "norm", "young", "heart", "levy", "weak-check",
      "generate", "consistency", "lab"};
  static const std::vector<std::string> lab_commands{"example1", "example2", "continuity-bound",
                                                     "domination"};
  std::size_t insert_at = args.size();
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (std::find(commands.begin(), commands.end(), args[i]) != commands.end()) {
      insert_at = i + 1;
      if (args[i] == "lab" && i + 1 < args.size() &&
          std::find(lab_commands.begin(), lab_commands.end(), args[i + 1]) != lab_commands.end())
        insert_at = i + 2;
      break;
    }
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(insert_at), extra.begin(), extra.end());
  return args;
}

std::string trial_table(const std::vector<lawrisk::lab::trial_summary>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-32s trials=%-6zu failures=%-6zu %s\n", r.name.c_str(),
                  r.trials, r.failures, r.passed() ? "PASS" : "FAIL");
    os << buf;
  }
  return os.str();
}

json trial_json(const std::vector<lawrisk::lab::trial_summary>& rows) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"name", r.name}, {"trials", r.trials}, {"failures", r.failures},
                   {"passed", r.passed()}});
  return {{"results", arr}, {"passed", std::all_of(rows.begin(), rows.end(), [](const auto& r) {
                               return r.passed();
                             })}};
}

int run(int argc, char** argv) {
  using namespace lawrisk;

  CLI::App app{"Law-invariant risk, deviation and variability functionals", "lawrisk"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.footer(kFooter);
  app.set_version_flag("--version", std::string("lawrisk ") + version);
  app.require_subcommand(1);
  app.fallthrough();

  global_flags g;
  app.add_flag("--json", g.json, "Print machine-readable JSON");
  app.add_option("--out", g.out, "Write the result to this path instead of stdout");
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();

  std::string measure_text, dist_text, dist2_text, phi_text, process_text = "iid", samples_path;
  std::string ns_text, lambdas_text, eps_text = "0.1,0.5,1", csv_path;
  std::size_t reps = 20, n_values = 10, grid = 1000, dim = 8, trials = 1000, len = 64;
  double tol = 0.05, tol_w = 0.02, tol_m = 0.02, norm_tol = 1e-12, p = 0.9, decay = 0.25;

  auto* eval = app.add_subcommand("eval", "Evaluate a measure on a distribution");
  eval->add_option("--measure", measure_text, "Measure")->required();
  eval->add_option("--dist", dist_text, "Distribution")->required();

  auto* estimate = app.add_subcommand("estimate", "Empirical estimate from a sample file");
  estimate->add_option("--measure", measure_text, "Measure")->required();
  estimate->add_option("--samples", samples_path, "Sample file")->required();

  auto* norm = app.add_subcommand("norm", "Luxemburg norm");
  norm->add_option("--phi", phi_text, "Orlicz function")->required();
  norm->add_option("--dist", dist_text, "Distribution")->required();
  norm->add_option("--tol", norm_tol, "Relative tolerance")->capture_default_str();

  auto* young = app.add_subcommand("young", "Young-class membership E[Phi(|X|)] < inf");
  young->add_option("--phi", phi_text, "Orlicz function")->required();
  young->add_option("--dist", dist_text, "Distribution")->required();

  auto* heart = app.add_subcommand("heart", "Orlicz-heart probe over a list of scales");
  heart->add_option("--phi", phi_text, "Orlicz function")->required();
  heart->add_option("--dist", dist_text, "Distribution")->required();
  heart->add_option("--lambdas", lambdas_text, "Increasing scales, e.g. 0.5,1,2")->required();

  auto* levy = app.add_subcommand("levy", "Levy distance between two distributions");
  levy->add_option("--dist", dist_text, "First distribution")->required();
  levy->add_option("--dist2", dist2_text, "Second distribution")->required();
  levy->add_option("--grid", grid, "Grid size")->capture_default_str();

  auto* weak = app.add_subcommand("weak-check", "Phi-weak convergence of empirical laws");
  weak->add_option("--dist", dist_text, "Target distribution")->required();
  weak->add_option("--phi", phi_text, "Orlicz function")->required();
  weak->add_option("--ns", ns_text, "Sample sizes, e.g. 100,1000,10000")->required();
  weak->add_option("--process", process_text, "Sampling process")->capture_default_str();
  weak->add_option("--tol-w", tol_w, "Levy tolerance")->capture_default_str();
  weak->add_option("--tol-m", tol_m, "Moment-gap tolerance")->capture_default_str();

  auto* gen = app.add_subcommand("generate", "Sample a stationary process");
  gen->add_option("--process", process_text, "Process")->capture_default_str();
  gen->add_option("--dist", dist_text, "Marginal distribution")->required();
  gen->add_option("--n", n_values, "Number of values")->capture_default_str();

  auto* cons = app.add_subcommand("consistency", "Strong-consistency experiment");
  cons->add_option("--measure", measure_text, "Measure")->required();
  cons->add_option("--dist", dist_text, "Marginal distribution")->required();
  cons->add_option("--process", process_text, "Sampling process")->capture_default_str();
  cons->add_option("--ns", ns_text, "Increasing sample sizes")->required();
  cons->add_option("--reps", reps, "Replications")->capture_default_str();
  cons->add_option("--tol", tol, "Error tolerance for the summary")->capture_default_str();
  cons->add_option("--csv", csv_path, "Also write flat CSV rows here");

  auto* lab_cmd = app.add_subcommand("lab", "Finite-dimensional inequality checks");
  lab_cmd->require_subcommand(1);
  auto* ex1 = lab_cmd->add_subcommand("example1", "Deviation order-interval chains");
  auto* ex2 = lab_cmd->add_subcommand("example2", "Inter-ES order-interval bound");
  auto* cb = lab_cmd->add_subcommand("continuity-bound", "Convexity continuity bound");
  auto* dom = lab_cmd->add_subcommand("domination", "Dominating element of a convergent sequence");
  for (auto* c : {ex1, ex2, cb}) {
    c->add_option("--dim", dim, "Dimension")->capture_default_str();
    c->add_option("--trials", trials, "Trials")->capture_default_str();
  }
  ex2->add_option("--p", p, "Level")->capture_default_str();
  cb->add_option("--eps", eps_text, "Comma-separated eps values in (0,1]")->capture_default_str();
  dom->add_option("--decay", decay, "Geometric decay of |X_n - X|")->capture_default_str();
  dom->add_option("--len", len, "Sequence length")->capture_default_str();
  dom->add_option("--dim", dim, "Dimension")->capture_default_str();

  const auto args = expand_config(argc, argv);
  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  if (eval->parsed() || estimate->parsed()) {
    const auto m = parse_measure(measure_text);
    const auto d = eval->parsed() ? parse_distribution(dist_text)
                                  : empirical_from_samples(read_samples(samples_path));
    const double v = evaluate(m, d);
    emit(g, {{"measure", m.name()}, {"dist", d.descriptor()}, {"value", v}}, fmt_value(v) + "\n");
  } else if (norm->parsed()) {
    const auto phi = parse_orlicz(phi_text);
    const auto d = parse_distribution(dist_text);
    const double v = luxemburg_norm(d, phi, norm_tol);
    emit(g, {{"phi", phi.name()}, {"dist", d.descriptor()}, {"norm", v}}, fmt_value(v) + "\n");
  } else if (young->parsed()) {
    const auto phi = parse_orlicz(phi_text);
    const auto d = parse_distribution(dist_text);
    const double m = phi_moment(d, phi, 1.0);
    const bool member = std::isfinite(m);
    json j{{"phi", phi.name()}, {"dist", d.descriptor()}, {"member", member}};
    j["moment"] = member ? json(m) : json("inf");
    emit(g, j, std::string(member ? "true" : "false") + "\n");
  } else if (heart->parsed()) {
    const auto phi = parse_orlicz(phi_text);
    const auto d = parse_distribution(dist_text);
    const auto lambdas = parse_number_list(lambdas_text, "--lambdas");
    const auto r = heart_probe(d, phi, lambdas);
    json entries = json::array();
    std::ostringstream text;
    for (const auto& e : r.entries) {
      entries.push_back({{"lambda", e.lambda},
                         {"finite", e.finite},
                         {"moment", e.finite ? json(e.moment) : json("inf")}});
      text << "lambda=" << fmt_value(e.lambda) << "  "
           << (e.finite ? "finite  E=" + fmt_value(e.moment) : std::string("infinite")) << "\n";
    }
    text << "heart-consistent: " << (r.heart_consistent() ? "yes" : "no") << "\n";
    emit(g, {{"phi", phi.name()}, {"dist", d.descriptor()}, {"entries", entries},
             {"heart_consistent", r.heart_consistent()}},
         text.str());
  } else if (levy->parsed()) {
    const auto d1 = parse_distribution(dist_text);
    const auto d2 = parse_distribution(dist2_text);
    const double v = levy_distance(d1, d2, grid);
    emit(g, {{"dist", d1.descriptor()}, {"dist2", d2.descriptor()}, {"levy_distance", v}},
         fmt_value(v) + "\n");
  } else if (weak->parsed()) {
    const auto d = parse_distribution(dist_text);
    const auto phi = parse_orlicz(phi_text);
    const auto model = parse_process(process_text);
    const auto ns = parse_sizes(ns_text, "--ns");
    const auto e = run_phi_weak_experiment(d, phi, model, ns, g.seed, tol_w, tol_m);
    std::ostringstream text;
    for (std::size_t i = 0; i < ns.size(); ++i)
      text << "n=" << ns[i] << "  levy=" << fmt_value(e.diagnostics[i].levy_distance)
           << "  moment_gap=" << fmt_value(e.diagnostics[i].moment_gap) << "  "
           << (e.diagnostics[i].converged ? "converged" : "not converged") << "\n";
    emit(g, to_json(e), text.str());
  } else if (gen->parsed()) {
    const auto model = parse_process(process_text);
    const auto d = parse_distribution(dist_text);
    const auto xs = generate(process_spec{model, d, g.seed}, n_values);
    std::ostringstream text;
    text.precision(17);
    for (double x : xs) text << x << "\n";
    emit(g, {{"process", model.descriptor()}, {"dist", d.descriptor()}, {"seed", g.seed},
             {"values", xs}},
         text.str());
  } else if (cons->parsed()) {
    const auto m = parse_measure(measure_text);
    const auto d = parse_distribution(dist_text);
    const auto model = parse_process(process_text);
    const auto ns = parse_sizes(ns_text, "--ns");
    const auto report = run_consistency(m, d, model, ns, reps, g.seed, tol);
    if (!csv_path.empty()) export_report(report, csv_path, report_format::csv);
    std::ostringstream text;
    text << "measure " << report.measure << "  dist " << report.dist << "  process "
         << report.process << "\ntarget " << fmt_value(report.target) << " ("
         << report.target_method << ")\n";
    for (const auto& s : report.summary)
      text << "n=" << s.n << "  mae=" << fmt_value(s.mae) << "  max_err=" << fmt_value(s.max_err)
           << "  within_tol=" << fmt_value(s.frac_within_tol) << "\n";
    // A consistency run always produces a JSON report when --out is given.
    if (!g.out.empty()) {
      export_report(report, g.out, report_format::json);
      if (!g.json) std::cout << text.str();
    } else {
      emit(g, to_json(report), text.str());
    }
  } else if (ex1->parsed()) {
    const std::vector rows{lab::run_example1_trials(dim, trials, g.seed)};
    emit(g, trial_json(rows), trial_table(rows));
    return rows.front().passed() ? 0 : 1;
  } else if (ex2->parsed()) {
    const std::vector rows{lab::run_example2_trials(dim, p, trials, g.seed)};
    emit(g, trial_json(rows), trial_table(rows));
    return rows.front().passed() ? 0 : 1;
  } else if (cb->parsed()) {
    std::vector<lab::trial_summary> rows;
    for (double eps : parse_number_list(eps_text, "--eps")) {
      rows.push_back(lab::run_continuity_trials(
          "max-of-affine", dim, eps, trials, g.seed,
          [](std::size_t k, stream_rng& rng) { return lab::random_max_of_affine(k, rng); }));
      rows.push_back(lab::run_continuity_trials(
          "stdev", dim, eps, trials, g.seed,
          [](std::size_t, stream_rng&) { return lab::convex_functional::stdev(); }));
      rows.push_back(lab::run_continuity_trials(
          "inter-es:0.9", dim, eps, trials, g.seed,
          [](std::size_t, stream_rng&) { return lab::convex_functional::inter_es(0.9); }));
    }
    emit(g, trial_json(rows), trial_table(rows));
    return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.passed(); }) ? 0 : 1;
  } else if (dom->parsed()) {
    lab::domination_result r{{}, {}, lab::finite_rv::constant(lab::finite_space::uniform(1), 0.0),
                             0.0, false};
    const auto summary = lab::run_domination_trial(decay, len, dim, g.seed, &r);
    std::ostringstream text;
    text << "selected indices:";
    for (auto i : r.indices) text << ' ' << i;
    text << "\nmax Y: " << fmt_value(lab::max_norm(r.y))
         << "\ntruncation bound: " << fmt_value(r.truncation_bound)
         << "\n|X_nk - X| <= Y/k: " << (r.verified ? "PASS" : "FAIL") << "\n";
    emit(g, {{"decay", decay}, {"len", len}, {"dim", dim}, {"indices", r.indices},
             {"y", r.y.values()}, {"truncation_bound", r.truncation_bound},
             {"verified", r.verified}},
         text.str());
    return summary.passed() ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const lawrisk::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
