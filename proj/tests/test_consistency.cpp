#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "lawrisk/consistency.hpp"

using namespace lawrisk;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "lawrisk_test_consistency";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

consistency_report small_report() {
  return run_consistency(measure_id::inter_es(0.9), uniform(-1.0, 1.0), process_model::ar1(0.5), {10, 100, 1000},
                         4, 42, 0.1);
}

}  // namespace

TEST(EmpiricalEstimate, Examples) {
  const std::vector<double> a = {1.0, 3.0};
  EXPECT_EQ(empirical_estimate(measure_id::mean(), a), 2.0);
  EXPECT_EQ(empirical_estimate(measure_id::es(0.5), a), 3.0);
  const std::vector<double> b = {-1.0, 1.0};
  EXPECT_EQ(empirical_estimate(measure_id::inter_es(0.5), b), 2.0);
  EXPECT_THROW(empirical_estimate(measure_id::mean(), std::vector<double>{}), domain_error);
}

TEST(EmpiricalEstimate, SpectralIsTheLStatistic) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> z;
  const auto phi = spectrum::step({0.3, 0.9, 1.0}, {0.5, 1.0, 2.5});
  std::vector<double> xs(137);
  for (auto& x : xs) x = z(gen);
  auto sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const auto w = lstat_weights(phi, xs.size());
  double lsum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) lsum += w[i] * sorted[i];
  EXPECT_EQ(empirical_estimate(measure_id::spectral(phi), xs), lsum);
}

TEST(EmpiricalEstimate, PermutationInvariant) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> z;
  const std::vector<measure_id> ms = {measure_id::mean(),    measure_id::es(0.8),    measure_id::es_minus(0.2),
                                      measure_id::inter_es(0.6), measure_id::stdev(), measure_id::semidev_upper(),
                                      measure_id::semidev_lower(), measure_id::sample_max()};
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> xs(1 + gen() % 200);
    for (auto& x : xs) x = z(gen);
    auto ys = xs;
    std::shuffle(ys.begin(), ys.end(), gen);
    for (const auto& m : ms) EXPECT_EQ(empirical_estimate(m, xs), empirical_estimate(m, ys)) << m.name();
  }
}

TEST(RunConsistency, MeanUniformIid) {
  const auto r = run_consistency(measure_id::mean(), uniform(0.0, 1.0), process_model::iid(), {100, 10000}, 5, 42,
                                 0.01);
  EXPECT_EQ(r.target, 0.5);
  EXPECT_EQ(r.target_method, "closed-form");
  ASSERT_EQ(r.summary.size(), 2u);
  EXPECT_LE(r.summary[1].mae, 0.01);
}

TEST(RunConsistency, InterEsUniformIid) {
  const auto r = run_consistency(measure_id::inter_es(0.9), uniform(-1.0, 1.0), process_model::iid(),
                                 {100, 1000, 10000, 100000}, 20, 42, 0.02);
  EXPECT_NEAR(r.target, 1.8, 1e-15);
  EXPECT_LE(r.summary.back().mae, 0.02);
}

TEST(RunConsistency, ConstantMarginal) {
  const auto c = point_mass(2.5);
  const std::vector<measure_id> ms = {measure_id::mean(), measure_id::es(0.9), measure_id::inter_es(0.3),
                                      measure_id::stdev(), measure_id::semidev_lower(),
                                      measure_id::spectral(spectrum::step({0.5, 1.0}, {0.5, 1.5}))};
  for (const auto& model : {process_model::iid(), process_model::ar1(0.8), process_model::markov(3, 0.5)}) {
    for (const auto& m : ms) {
      const auto r = run_consistency(m, c, model, {1, 10, 100}, 3, 7, 0.0);
      EXPECT_EQ(r.target_method, "exact");
      for (const auto& t : r.replications)
        for (double e : t.estimates) EXPECT_EQ(e, evaluate(m, c)) << m.name() << " " << model.descriptor();
      for (const auto& s : r.summary) EXPECT_EQ(s.frac_within_tol, 1.0);
    }
  }
}

TEST(RunConsistency, ShapeAndDeterminism) {
  const auto a = small_report();
  ASSERT_EQ(a.replications.size(), 4u);
  for (std::size_t i = 0; i < a.replications.size(); ++i) {
    EXPECT_EQ(a.replications[i].id, i);
    EXPECT_EQ(a.replications[i].estimates.size(), a.schedule.size());
  }
  EXPECT_EQ(a.measure, "inter-es:0.9");
  EXPECT_EQ(a.dist, "uniform:-1,1");
  EXPECT_EQ(a.process, "ar1:0.5");
  EXPECT_EQ(a, small_report());
  EXPECT_EQ(to_json(a).dump(), to_json(small_report()).dump());
}

TEST(RunConsistency, PrefixReuse) {
  // Replication r's estimate at n is the functional on the first n draws of stream (seed, r).
  const auto r = small_report();
  const process_spec spec{process_model::ar1(0.5), uniform(-1.0, 1.0), 42};
  for (const auto& t : r.replications) {
    const auto path = generate(spec, 1000, t.id);
    for (std::size_t j = 0; j < r.schedule.size(); ++j)
      EXPECT_EQ(t.estimates[j], empirical_estimate(measure_id::inter_es(0.9),
                                                   std::span<const double>(path.data(), r.schedule[j])));
  }
}

TEST(RunConsistency, SummaryRecomputesFromTrajectories) {
  const auto r = small_report();
  for (std::size_t j = 0; j < r.schedule.size(); ++j) {
    double sum = 0.0, mx = 0.0, within = 0.0;
    for (const auto& t : r.replications) {
      const double e = std::abs(t.estimates[j] - r.target);
      sum += e;
      mx = std::max(mx, e);
      within += e <= r.tol ? 1.0 : 0.0;
    }
    EXPECT_EQ(r.summary[j].n, r.schedule[j]);
    EXPECT_DOUBLE_EQ(r.summary[j].mae, sum / r.replications.size());
    EXPECT_EQ(r.summary[j].max_err, mx);
    EXPECT_DOUBLE_EQ(r.summary[j].frac_within_tol, within / r.replications.size());
  }
}

TEST(RunConsistency, QuadratureTarget) {
  const auto r = run_consistency(measure_id::es(0.9), normal(0.0, 1.0), process_model::iid(), {100, 10000}, 4, 3,
                                 0.05);
  EXPECT_EQ(r.target_method, "quadrature");
  // ES_0.9 of N(0,1) = φ(z_0.9) / 0.1.
  const double z = 1.2815515655446004;
  EXPECT_NEAR(r.target, std::exp(-z * z / 2) / std::sqrt(2 * std::acos(-1.0)) / 0.1, 1e-10);
}

TEST(RunConsistency, Errors) {
  const auto u = uniform(0.0, 1.0);
  EXPECT_THROW(run_consistency(measure_id::mean(), u, process_model::iid(), {100, 100}, 2, 1, 0.1), domain_error);
  EXPECT_THROW(run_consistency(measure_id::mean(), u, process_model::iid(), {100, 10}, 2, 1, 0.1), domain_error);
  EXPECT_THROW(run_consistency(measure_id::mean(), u, process_model::iid(), {}, 2, 1, 0.1), domain_error);
  EXPECT_THROW(run_consistency(measure_id::mean(), u, process_model::iid(), {0, 10}, 2, 1, 0.1), domain_error);
  EXPECT_THROW(run_consistency(measure_id::mean(), u, process_model::iid(), {10}, 0, 1, 0.1), domain_error);
  EXPECT_THROW(run_consistency(measure_id::mean(), u, process_model::ar1(2.0), {10}, 1, 1, 0.1), domain_error);
  EXPECT_THROW(run_consistency(measure_id::mean(), u, process_model::iid(), {10}, 1, 1, -0.1), domain_error);
  // Non-finite targets are refused up front.
  try {
    run_consistency(measure_id::mean(), pareto(0.9, 1.0), process_model::iid(), {10}, 1, 1, 0.1);
    FAIL();
  } catch (const non_integrable_error& e) {
    EXPECT_NE(std::string(e.what()).find("refusing"), std::string::npos);
  }
  EXPECT_THROW(run_consistency(measure_id::sample_max(), lognormal(0.0, 1.0), process_model::iid(), {10}, 1, 1, 0.1),
               non_integrable_error);
}

TEST(RunConsistency, DependenceConvergesToSameTarget) {
  for (double a : {0.5, 0.8}) {
    const auto r = run_consistency(measure_id::inter_es(0.9), uniform(-1.0, 1.0), process_model::ar1(a),
                                   {100, 1000, 10000, 100000}, 10, 42, 0.05);
    EXPECT_LE(r.summary.back().mae, 0.05) << a;
    EXPECT_LT(r.summary.back().mae, r.summary.front().mae) << a;
  }
  const auto m = run_consistency(measure_id::stdev(), normal(0.0, 2.0), process_model::markov(4, 0.5),
                                 {100, 100000}, 5, 42, 0.05);
  EXPECT_LE(m.summary.back().mae, 0.05);
}

TEST(RunConsistency, MaxSampleWitnessKeepsGrowing) {
  const std::vector<std::size_t> schedule = {100, 1000, 10000, 100000};
  const auto reps =
      simulate_trajectories(measure_id::sample_max(), {process_model::iid(), lognormal(0.0, 1.0), 42}, schedule, 20);
  std::vector<double> mean(schedule.size(), 0.0);
  for (const auto& t : reps)
    for (std::size_t j = 0; j < schedule.size(); ++j) mean[j] += t.estimates[j] / reps.size();
  for (std::size_t j = 1; j < schedule.size(); ++j) EXPECT_GT(mean[j], mean[j - 1]);
  EXPECT_GE(mean.back(), 1.5 * mean.front());
  // Bounded support: the witness settles instead.
  const auto bounded = run_consistency(measure_id::sample_max(), uniform(0.0, 1.0), process_model::iid(),
                                       {100, 100000}, 5, 42, 1e-3);
  EXPECT_LE(bounded.summary.back().mae, 1e-3);
}

TEST(Export, JsonRoundTrip) {
  const auto r = small_report();
  const auto path = scratch("report.json");
  export_report(r, path.string(), report_format::json);
  EXPECT_EQ(import_report_json(path.string()), r);
  const auto j = nlohmann::ordered_json::parse(slurp(path));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  const std::vector<std::string> expected = {"measure", "dist",  "process",      "seed",   "schedule",
                                             "target",  "target_method", "tol", "replications", "summary"};
  EXPECT_EQ(keys, expected);
  EXPECT_EQ(j["replications"][0].begin().key(), "id");
  EXPECT_EQ(j["summary"][0].size(), 4u);
}

TEST(Export, CsvRowsAndErrors) {
  const auto r = small_report();
  const auto path = scratch("report.csv");
  export_report(r, path.string(), report_format::csv);
  std::istringstream in(slurp(path));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "replication,n,estimate,target,abs_error");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream row(line);
    std::string f;
    std::vector<std::string> fields;
    while (std::getline(row, f, ',')) fields.push_back(f);
    ASSERT_EQ(fields.size(), 5u);
    const double est = std::stod(fields[2]), target = std::stod(fields[3]), err = std::stod(fields[4]);
    EXPECT_EQ(err, std::abs(est - target));
    const auto rep = std::stoull(fields[0]);
    const auto n = std::stoull(fields[1]);
    const auto j = std::find(r.schedule.begin(), r.schedule.end(), n) - r.schedule.begin();
    EXPECT_EQ(est, r.replications.at(rep).estimates.at(j));
  }
  EXPECT_EQ(rows, r.replications.size() * r.schedule.size());
}

TEST(Export, IoErrorsCarryPath) {
  const auto r = small_report();
  try {
    export_report(r, "/nonexistent-dir/x/report.json", report_format::json);
    FAIL();
  } catch (const io_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/x/report.json"), std::string::npos);
  }
  EXPECT_THROW(import_report_json("/nonexistent-dir/none.json"), io_error);
  const auto bad = scratch("bad.json");
  write_text_file(bad.string(), "{\"measure\": 1");
  EXPECT_THROW(import_report_json(bad.string()), domain_error);
  write_text_file(bad.string(), "{\"measure\": \"mean\"}");
  EXPECT_THROW(import_report_json(bad.string()), domain_error);
}

TEST(PhiWeakExperiment, UniformSquares) {
  const auto e = run_phi_weak_experiment(uniform(0.0, 1.0), orlicz_function::power(2.0), process_model::iid(),
                                         {100, 1000, 10000, 100000}, 42, 0.02, 0.02);
  EXPECT_TRUE(e.converged());
  ASSERT_EQ(e.diagnostics.size(), 4u);
  const auto j = to_json(e);
  EXPECT_EQ(j["diagnostics"].size(), 4u);
  EXPECT_EQ(j["converged"], true);
  EXPECT_EQ(j.dump(), to_json(run_phi_weak_experiment(uniform(0.0, 1.0), orlicz_function::power(2.0),
                                                      process_model::iid(), {100, 1000, 10000, 100000}, 42, 0.02,
                                                      0.02))
                          .dump());
}
