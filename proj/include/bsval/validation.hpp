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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bsval/clustering.hpp"
#include "bsval/distribution.hpp"
#include "bsval/samplers.hpp"

namespace bsval {

/// Standard: E_ij = N_i N_j / N_total. VerbatimEq6: E_ij = N_i N_j / k,
/// kept for comparison with the published formula; it does not conserve
/// the total count.
enum class Chi2Formula { Standard, VerbatimEq6 };

std::string chi2_formula_name(Chi2Formula formula);  // "standard" / "verbatim-eq6"
Chi2Formula chi2_formula_from_name(const std::string& name);

/// Two-sample contingency statistic over k clusters. Rows where both
/// counts are zero contribute nothing.
double chi2_statistic(std::span<const double> first, std::span<const double> second,
                      Chi2Formula formula = Chi2Formula::Standard);

enum class GaussianMethod { Moments, HistogramLsq };

std::string gaussian_method_name(GaussianMethod method);
GaussianMethod gaussian_method_from_name(const std::string& name);

struct GaussianSummary {
  double center = 0.0;
  double fwhm = 0.0;
  double center_stderr = 0.0;  // sample sd / sqrt(count)
  GaussianMethod method = GaussianMethod::Moments;
};

/// 2 sqrt(2 ln 2)
inline constexpr double kFwhmPerSigma = 2.3548200450309493;

/// Moments: mean and sample standard deviation. HistogramLsq: least-squares
/// parabola through log bin counts (weighted by counts), which is the
/// closed-form Gaussian fit of a histogram.
GaussianSummary gaussian_fit(std::span<const double> values,
                             GaussianMethod method = GaussianMethod::Moments);

struct Chi2Ensemble {
  std::vector<double> values;
  std::size_t trials = 0;
  std::size_t events_per_trial = 0;
  double x_ind = 0.0;
  Chi2Formula formula = Chi2Formula::Standard;
  bool fitted = false;  // false when fewer than two trials were run
  GaussianSummary gaussian;
};

struct TrialOptions {
  std::size_t events_per_trial = 1000;
  std::size_t trials = 5000;
  std::uint64_t seed = 0;
  Chi2Formula formula = Chi2Formula::Standard;
  GaussianMethod gaussian = GaussianMethod::Moments;
  int threads = 1;
};

/// Repeated chi-square tests of pool subsamples against the model's bona
/// fide member counts. Trial t draws events_per_trial events without
/// replacement using sub-seed (seed, t). A single-cluster model makes
/// every statistic 0.
Chi2Ensemble chi2_trials(const ClusterModel& model, const EventSet& pool,
                         const TrialOptions& options);

/// Same, with the cluster index of every pattern precomputed (see
/// assign_all_patterns). Lets callers share one assignment across pools.
Chi2Ensemble chi2_trials(const ClusterModel& model, std::span<const int> pattern_clusters,
                         const EventSet& pool, const TrialOptions& options);

/// (c1 - c_0.947) / (c1 - c0)
double r1_metric(double c0, double c947, double c1);
/// (c1 - c_0.947) / b_0.947
double r2_metric(double c947, double c1, double b947);

struct BayesianTrace {
  std::vector<double> cumulative_lnx;
  double slope = 0.0;
  std::size_t n_events = 0;
  std::size_t skipped = 0;  // events with zero ideal probability
};

/// Cumulative log-odds of the ideal sampler against the collision-free
/// uniform reference, ln(Pr(Q)/Pr_QCFS * C(m, n)) per event, and the
/// least-squares slope of the cumulative curve against the event index.
BayesianTrace bayesian_lnx(const EventSet& events, const DistributionTable& ideal_table);

/// Least-squares slope of y against x = 1, 2, ..., y.size().
double least_squares_slope(std::span<const double> y);

}  // namespace bsval
