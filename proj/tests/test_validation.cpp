/*
 * Copyright 2026 The bsval Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "bsval/clustering.hpp"
#include "bsval/error.hpp"
#include "bsval/linalg.hpp"
#include "bsval/rng.hpp"
#include "bsval/samplers.hpp"
#include "bsval/validation.hpp"

namespace bsval {
namespace {

TEST(Chi2, HandComputedTable) {
  const std::vector<double> a = {10, 0}, b = {0, 10};
  EXPECT_DOUBLE_EQ(chi2_statistic(a, b), 20.0);
}

TEST(Chi2, IdenticalColumnsGiveZero) {
  const std::vector<double> a = {3, 7, 0, 12, 5};
  EXPECT_EQ(chi2_statistic(a, a), 0.0);
}

TEST(Chi2, RowPermutationInvariant) {
  const std::vector<double> a = {4, 9, 1, 6}, b = {8, 2, 3, 7};
  const std::vector<double> pa = {6, 1, 4, 9}, pb = {7, 3, 8, 2};
  EXPECT_DOUBLE_EQ(chi2_statistic(a, b), chi2_statistic(pa, pb));
}

// Oracle: with both column sums N, E = (a+b)/2 and the statistic reduces to
// sum (a-b)^2 / (a+b).
TEST(Chi2, EqualColumnSumsOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(20, 0.0), b(20, 0.0);
    for (int e = 0; e < 500; ++e) {
      a[rng.below(20)] += 1;
      b[rng.below(20)] += 1;
    }
    double oracle = 0.0;
    for (int i = 0; i < 20; ++i)
      if (a[i] + b[i] > 0) oracle += (a[i] - b[i]) * (a[i] - b[i]) / (a[i] + b[i]);
    EXPECT_NEAR(chi2_statistic(a, b), oracle, 1e-9 * oracle);
  }
}

// With expected counts N_i N_j / k, each cell contributes N_ij^2 k/(N_i N_j)
// - 2 N_ij + N_i N_j / k; summing gives the closed form used here.
TEST(Chi2, VerbatimFormulaOracle) {
  const std::vector<double> a = {5, 1, 4}, b = {2, 6, 2};
  const double k = 3.0;
  const double na = 10.0, nb = 10.0;
  double oracle = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double ni = a[i] + b[i];
    for (auto [nij, nj] : {std::pair{a[i], na}, std::pair{b[i], nb}}) {
      const double e = ni * nj / k;
      oracle += (nij - e) * (nij - e) / e;
    }
  }
  EXPECT_NEAR(chi2_statistic(a, b, Chi2Formula::VerbatimEq6), oracle, 1e-12);
}

TEST(Chi2, NonNegativeAndZeroOnlyWhenProportional) {
  const std::vector<double> a = {2, 4, 6}, b = {1, 2, 3};
  EXPECT_NEAR(chi2_statistic(a, b), 0.0, 1e-12);
  const std::vector<double> c = {1, 2, 4};
  EXPECT_GT(chi2_statistic(a, c), 0.0);
}

TEST(Chi2, Preconditions) {
  const std::vector<double> one = {5};
  EXPECT_THROW(chi2_statistic(one, one), Error);
  const std::vector<double> zero = {0, 0}, some = {1, 2};
  EXPECT_THROW(chi2_statistic(zero, some), Error);
  const std::vector<double> three = {1, 2, 3};
  EXPECT_THROW(chi2_statistic(some, three), Error);
}

TEST(Chi2, FormulaNames) {
  EXPECT_EQ(chi2_formula_from_name("standard"), Chi2Formula::Standard);
  EXPECT_EQ(chi2_formula_from_name("verbatim-eq6"), Chi2Formula::VerbatimEq6);
  EXPECT_EQ(chi2_formula_name(Chi2Formula::VerbatimEq6), "verbatim-eq6");
  EXPECT_THROW(chi2_formula_from_name("other"), Error);
}

TEST(GaussianFit, SimpleCases) {
  const std::vector<double> flat(10, 3.5);
  const GaussianSummary g = gaussian_fit(flat);
  EXPECT_EQ(g.center, 3.5);
  EXPECT_EQ(g.fwhm, 0.0);
  const std::vector<double> pair = {4, 6};
  EXPECT_DOUBLE_EQ(gaussian_fit(pair).center, 5.0);
  EXPECT_THROW(gaussian_fit(std::vector<double>{1.0}), Error);
}

TEST(GaussianFit, NormalSample) {
  Rng rng(21);
  std::vector<double> v(100000);
  for (double& x : v) x = 5.0 + rng.normal();
  for (GaussianMethod method : {GaussianMethod::Moments, GaussianMethod::HistogramLsq}) {
    const GaussianSummary g = gaussian_fit(v, method);
    EXPECT_NEAR(g.center, 5.0, 0.02) << gaussian_method_name(method);
    EXPECT_NEAR(g.fwhm, 2.3548, 0.02) << gaussian_method_name(method);
  }
  EXPECT_NEAR(kFwhmPerSigma, 2.0 * std::sqrt(2.0 * std::log(2.0)), 1e-15);
}

TEST(RMetrics, Definitions) {
  EXPECT_DOUBLE_EQ(r1_metric(0.0, 0.5, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(r1_metric(4.0, 4.0, 5.0), 1.0);
  EXPECT_THROW(r1_metric(2.0, 1.0, 2.0), Error);
  EXPECT_DOUBLE_EQ(r2_metric(3.0, 5.0, 2.0), 1.0);
  EXPECT_THROW(r2_metric(3.0, 5.0, 0.0), Error);
  EXPECT_THROW(r2_metric(3.0, 5.0, -1.0), Error);
}

TEST(RMetrics, ScaleCovariant) {
  const double c0 = 140, ct = 100, c1 = 95, b = 27, s = 3.7;
  EXPECT_NEAR(r1_metric(c0 * s, ct * s, c1 * s), r1_metric(c0, ct, c1), 1e-12);
  EXPECT_NEAR(r2_metric(ct * s, c1 * s, b * s), r2_metric(ct, c1, b), 1e-12);
}

class TrialsTest : public ::testing::Test {
 protected:
  const UnitaryMatrix u = haar_random_unitary(16, 1);
  const DistributionTable ideal = build_distribution(u, 4, ProbabilityLaw::ideal());
  const EventSet training = sample_exact(ideal, 1000, 2);
  const ClusterModel model = kmeans_fit(training, 100, 3);
};

TEST_F(TrialsTest, TrainingPoolGivesZero) {
  TrialOptions options;
  options.events_per_trial = 1000;
  options.trials = 1;
  const Chi2Ensemble e = chi2_trials(model, training, options);
  ASSERT_EQ(e.values.size(), 1u);
  EXPECT_NEAR(e.values[0], 0.0, 1e-12);
  EXPECT_FALSE(e.fitted);
}

TEST_F(TrialsTest, DeterministicAndThreadIndependent) {
  const EventSet pool = sample_mcmc(ideal, 20000, McmcConfig{1000, 20, 4});
  TrialOptions options;
  options.trials = 200;
  options.seed = 5;
  const Chi2Ensemble one = chi2_trials(model, pool, options);
  options.threads = 3;
  const Chi2Ensemble three = chi2_trials(model, pool, options);
  EXPECT_EQ(one.values, three.values);
  for (double v : one.values) EXPECT_GE(v, 0.0);
  EXPECT_TRUE(one.fitted);
}

TEST_F(TrialsTest, SameLawDifferentSeedsAgree) {
  const EventSet pool_a = sample_mcmc(ideal, 100000, McmcConfig{1000, 100, 6});
  const EventSet pool_b = sample_mcmc(ideal, 100000, McmcConfig{1000, 100, 7});
  TrialOptions options;
  options.trials = 1000;
  options.seed = 8;
  const Chi2Ensemble a = chi2_trials(model, pool_a, options);
  options.seed = 9;
  const Chi2Ensemble b = chi2_trials(model, pool_b, options);
  EXPECT_LT(std::abs(a.gaussian.center - b.gaussian.center),
            std::min(a.gaussian.fwhm, b.gaussian.fwhm));
}

TEST_F(TrialsTest, SingleClusterIsAlwaysZero) {
  const ClusterModel one = kmeans_fit(training, 1, 3);
  TrialOptions options;
  options.trials = 20;
  const Chi2Ensemble e = chi2_trials(one, sample_exact(ideal, 5000, 10), options);
  for (double v : e.values) EXPECT_EQ(v, 0.0);
}

TEST_F(TrialsTest, PoolTooSmall) {
  TrialOptions options;
  options.events_per_trial = 2000;
  EXPECT_THROW(chi2_trials(model, training, options), Error);
}

TEST(LeastSquaresSlope, Lines) {
  std::vector<double> y(100);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 3.0 - 0.25 * static_cast<double>(i);
  EXPECT_NEAR(least_squares_slope(y), -0.25, 1e-12);
  EXPECT_THROW(least_squares_slope(std::vector<double>{1.0}), Error);
}

// A constant summand gives a cumulative sum that is an exact line, so the
// fitted slope equals the per-event mean.
TEST(LeastSquaresSlope, ConstantStreamMatchesMean) {
  std::vector<double> cum(5000);
  double acc = 0.0;
  for (double& v : cum) v = (acc += 0.731);
  EXPECT_NEAR(least_squares_slope(cum), 0.731, 1e-9);
}

// For i.i.d. summands the slope is a weighted mean sum_j w_j s_j with
// sum_j w_j = 1; its spread around the plain mean is bounded by sigma
// sqrt(sum w_j^2) ~ sigma sqrt(6/(5N)).
TEST(LeastSquaresSlope, IidStreamNearMean) {
  Rng rng(31);
  const std::size_t n = 10000;
  std::vector<double> cum(n);
  double acc = 0.0, sum = 0.0;
  for (double& v : cum) {
    const double s = 0.4 + rng.normal();
    sum += s;
    v = (acc += s);
  }
  const double bound = 5.0 * std::sqrt(6.0 / (5.0 * n));
  EXPECT_NEAR(least_squares_slope(cum), sum / n, bound);
}

TEST_F(TrialsTest, BayesianTraceMatchesTable) {
  const EventSet events = sample_exact(ideal, 2000, 11);
  const BayesianTrace trace = bayesian_lnx(events, ideal);
  ASSERT_EQ(trace.cumulative_lnx.size(), 2000u);
  const double first = std::log(ideal.probs[events.indices[0]] * 1820.0);
  EXPECT_NEAR(trace.cumulative_lnx[0], first, 1e-12);
  EXPECT_GT(trace.slope, 0.0);
  EXPECT_EQ(trace.skipped, 0u);

  // Uniform draws: slope near the table expectation, which is negative.
  const auto uniform = build_distribution(u, 4, ProbabilityLaw::uniform());
  double expected = 0.0;
  for (double p : ideal.probs) expected += std::log(p * 1820.0) / 1820.0;
  const BayesianTrace ut = bayesian_lnx(sample_exact(uniform, 100000, 12), ideal);
  EXPECT_LT(expected, 0.0);
  EXPECT_NEAR(ut.slope, expected, 0.05);

  EXPECT_THROW(bayesian_lnx(events, uniform), Error);
}

}  // namespace
}  // namespace bsval
