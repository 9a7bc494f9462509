#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lawrisk/processes.hpp"
#include "oracles.hpp"

using namespace lawrisk;

namespace {

double ks_vs(const distribution& d, std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  return oracle::ks_statistic(xs, [&](double x) { return d.cdf(x); });
}

constexpr int bins = 10;
using histogram = std::array<double, bins * bins>;

histogram pair_histogram(const std::vector<double>& xs, std::size_t first, std::size_t last) {
  histogram h{};
  for (std::size_t t = first; t + 1 < last; ++t) {
    const int i = std::min(bins - 1, static_cast<int>(xs[t] * bins));
    const int j = std::min(bins - 1, static_cast<int>(xs[t + 1] * bins));
    h[i * bins + j] += 1.0;
  }
  const double total = static_cast<double>(last - first - 1);
  for (auto& v : h) v /= total;
  return h;
}

double l1(const histogram& a, const histogram& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

}  // namespace

TEST(ProcessModel, Validation) {
  const auto u = uniform(0.0, 1.0);
  EXPECT_THROW(generate({process_model::ar1(1.0), u, 1}, 10), domain_error);
  EXPECT_THROW(generate({process_model::ar1(-1.2), u, 1}, 10), domain_error);
  EXPECT_THROW(generate({process_model::markov(1, 0.5), u, 1}, 10), domain_error);
  EXPECT_THROW(generate({process_model::markov(4, 0.0), u, 1}, 10), domain_error);
  EXPECT_THROW(generate({process_model::markov(4, 1.5), u, 1}, 10), domain_error);
  EXPECT_THROW(generate({process_model::iid(), u, 1}, 0), domain_error);
  EXPECT_NO_THROW(generate({process_model::markov(2, 1.0), u, 1}, 10));
}

TEST(ProcessModel, Descriptors) {
  EXPECT_EQ(process_model::iid().descriptor(), "iid");
  EXPECT_EQ(process_model::ar1(0.8).descriptor(), "ar1:0.8");
  EXPECT_EQ(process_model::markov(4, 0.5).descriptor(), "markov:4,0.5");
}

TEST(Generate, Ar1WithZeroCoefficientMatchesIid) {
  for (const auto& m : {uniform(-1.0, 1.0), lognormal(0.0, 1.0)}) {
    const auto a = generate({process_model::iid(), m, 5}, 5000, 3);
    const auto b = generate({process_model::ar1(0.0), m, 5}, 5000, 3);
    EXPECT_EQ(a, b);
  }
}

TEST(Generate, Reproducible) {
  const auto m = normal(0.0, 1.0);
  for (const auto& model : {process_model::iid(), process_model::ar1(0.8), process_model::markov(4, 0.5)}) {
    const auto a = generate({model, m, 42}, 10000, 7);
    const auto b = generate({model, m, 42}, 10000, 7);
    EXPECT_EQ(a, b) << model.descriptor();
    // Prefixes agree with shorter runs.
    const auto c = generate({model, m, 42}, 100, 7);
    EXPECT_TRUE(std::equal(c.begin(), c.end(), a.begin())) << model.descriptor();
    // Other seeds and streams differ.
    EXPECT_NE(a, generate({model, m, 43}, 10000, 7));
    EXPECT_NE(a, generate({model, m, 42}, 10000, 8));
  }
}

TEST(Generate, IidKolmogorovSmirnov) {
  const auto u = uniform(0.0, 1.0);
  EXPECT_LE(ks_vs(u, generate({process_model::iid(), u, 42}, 100000)), 0.01);
}

TEST(Generate, MarginalCorrectnessEveryKind) {
  const std::vector<distribution> marginals = {uniform(0.0, 1.0), normal(1.0, 2.0), lognormal(0.0, 1.0),
                                               pareto(2.0, 1.0)};
  const std::vector<process_model> models = {process_model::iid(), process_model::ar1(0.5), process_model::ar1(0.8),
                                             process_model::ar1(-0.6), process_model::markov(4, 1.0),
                                             process_model::markov(4, 0.5), process_model::markov(7, 0.3)};
  for (const auto& m : marginals)
    for (const auto& model : models)
      EXPECT_LE(ks_vs(m, generate({model, m, 2024}, 100000)), 0.015) << model.descriptor() << " " << m.descriptor();
}

TEST(Generate, DiscreteMarginal) {
  const auto d = distribution::atomic({{-1.0, 0.2}, {0.0, 0.5}, {2.0, 0.3}});
  for (const auto& model : {process_model::iid(), process_model::ar1(0.7), process_model::markov(3, 0.4)}) {
    const auto xs = generate({model, d, 9}, 100000);
    std::array<double, 3> freq{};
    for (double x : xs) freq[x < -0.5 ? 0 : (x < 1.0 ? 1 : 2)] += 1.0 / xs.size();
    EXPECT_NEAR(freq[0], 0.2, 0.015) << model.descriptor();
    EXPECT_NEAR(freq[1], 0.5, 0.015) << model.descriptor();
    EXPECT_NEAR(freq[2], 0.3, 0.015) << model.descriptor();
  }
}

TEST(Generate, MarkovCellFrequencies) {
  const auto u = uniform(0.0, 1.0);
  const auto xs = generate({process_model::markov(4, 1.0), u, 42}, 100000);
  std::array<double, 4> freq{};
  for (double x : xs) freq[std::min(3, static_cast<int>(x * 4))] += 1.0 / xs.size();
  for (double f : freq) EXPECT_NEAR(f, 0.25, 0.01);
}

TEST(Generate, MarkovStickiness) {
  // With mix = 0.2 the chain keeps its cell with probability 0.8 + 0.2/m.
  const auto u = uniform(0.0, 1.0);
  const auto xs = generate({process_model::markov(4, 0.2), u, 1}, 100000);
  double stay = 0.0;
  for (std::size_t t = 1; t < xs.size(); ++t)
    stay += static_cast<int>(xs[t] * 4) == static_cast<int>(xs[t - 1] * 4) ? 1.0 : 0.0;
  EXPECT_NEAR(stay / (xs.size() - 1), 0.8 + 0.2 / 4, 0.01);
}

TEST(Generate, Ar1LagOneCorrelation) {
  // With a normal marginal the copula is the identity, so corr(X_t, X_{t+1}) = a.
  for (double a : {0.5, 0.8, -0.4}) {
    const auto xs = generate({process_model::ar1(a), normal(0.0, 1.0), 77}, 100000);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t t = 1; t < xs.size(); ++t) {
      sxy += xs[t] * xs[t - 1];
      sxx += xs[t - 1] * xs[t - 1];
    }
    EXPECT_NEAR(sxy / sxx, a, 0.02);
  }
}

TEST(Generate, Ar1ShiftStationarity) {
  const auto u = uniform(0.0, 1.0);
  const std::size_t n = 100000, k = 100;
  const auto xs = generate({process_model::ar1(0.8), u, 42}, n);
  EXPECT_LE(l1(pair_histogram(xs, 0, n), pair_histogram(xs, k, n)), 0.05);
  // A stronger variant: disjoint halves.
  EXPECT_LE(l1(pair_histogram(xs, 0, n / 2), pair_histogram(xs, n / 2, n)), 0.05);
}

TEST(Generate, Ar1FirstValueIsStationary) {
  // X_1 across many streams has the marginal law (no burn-in needed).
  const auto u = uniform(0.0, 1.0);
  std::vector<double> first;
  for (std::uint64_t s = 0; s < 20000; ++s) first.push_back(generate({process_model::ar1(0.95), u, 3}, 1, s)[0]);
  EXPECT_LE(ks_vs(u, first), 0.015);
}

TEST(Generate, ExtremeTailsStayFinite) {
  const auto xs = generate({process_model::ar1(0.99), pareto(1.2, 1.0), 8}, 100000);
  for (double x : xs) ASSERT_TRUE(std::isfinite(x));
}

TEST(Birkhoff, ConstantSequence) {
  const std::vector<double> xs(100, 3.25);
  const auto r = birkhoff_check(xs, [](double x) { return x; }, 3.25, 0.0);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.final_mean, 3.25);
  EXPECT_EQ(r.running_means.size(), 100u);
}

TEST(Birkhoff, IidSquares) {
  const auto xs = generate({process_model::iid(), uniform(0.0, 1.0), 42}, 100000);
  const auto r = birkhoff_check(xs, [](double x) { return x * x; }, 1.0 / 3.0, 0.01);
  EXPECT_TRUE(r.passed) << r.final_mean;
}

TEST(Birkhoff, DependentAverages) {
  const auto xs = generate({process_model::ar1(0.9), uniform(-1.0, 1.0), 42}, 100000);
  const auto r = birkhoff_check(xs, [](double x) { return x; }, 0.0, 0.02);
  EXPECT_TRUE(r.passed) << r.final_mean;
  const auto m = generate({process_model::markov(5, 0.3), uniform(-1.0, 1.0), 42}, 100000);
  EXPECT_TRUE(birkhoff_check(m, [](double x) { return x; }, 0.0, 0.02).passed);
}

TEST(Birkhoff, Errors) {
  const std::vector<double> empty;
  EXPECT_THROW(birkhoff_check(empty, [](double x) { return x; }, 0.0, 0.1), domain_error);
  const std::vector<double> one = {1.0};
  EXPECT_THROW(birkhoff_check(one, [](double x) { return x; }, INFINITY, 0.1), domain_error);
  EXPECT_FALSE(birkhoff_check(one, [](double x) { return x; }, 0.0, 0.5).passed);
}
