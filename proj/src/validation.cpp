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

#include "bsval/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "bsval/error.hpp"
#include "bsval/parallel.hpp"
#include "bsval/rng.hpp"

namespace bsval {

std::string chi2_formula_name(Chi2Formula formula) {
  return formula == Chi2Formula::Standard ? "standard" : "verbatim-eq6";
}

Chi2Formula chi2_formula_from_name(const std::string& name) {
  if (name == "standard") return Chi2Formula::Standard;
  if (name == "verbatim-eq6") return Chi2Formula::VerbatimEq6;
  throw_config("unknown chi2 formula '" + name + "'");
}

double chi2_statistic(std::span<const double> first, std::span<const double> second,
                      Chi2Formula formula) {
  if (first.size() != second.size()) throw_invalid("chi2: column lengths differ");
  const std::size_t k = first.size();
  if (k < 2) throw_invalid("chi2: need at least two clusters");
  const double col1 = std::accumulate(first.begin(), first.end(), 0.0);
  const double col2 = std::accumulate(second.begin(), second.end(), 0.0);
  if (!(col1 > 0.0) || !(col2 > 0.0)) throw_invalid("chi2: a sampler column sums to zero");
  const double norm = formula == Chi2Formula::Standard ? col1 + col2 : static_cast<double>(k);
  double chi2 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double row = first[i] + second[i];
    if (row == 0.0) continue;
    const double e1 = row * col1 / norm;
    const double e2 = row * col2 / norm;
    chi2 += (first[i] - e1) * (first[i] - e1) / e1 + (second[i] - e2) * (second[i] - e2) / e2;
  }
  return chi2;
}

std::string gaussian_method_name(GaussianMethod method) {
  return method == GaussianMethod::Moments ? "moments" : "histogram-lsq";
}

GaussianMethod gaussian_method_from_name(const std::string& name) {
  if (name == "moments") return GaussianMethod::Moments;
  if (name == "histogram-lsq") return GaussianMethod::HistogramLsq;
  throw_config("unknown gaussian fit method '" + name + "'");
}

namespace {

GaussianSummary moments_fit(std::span<const double> values) {
  const auto count = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (count - 1.0));
  GaussianSummary out;
  out.center = mean;
  out.fwhm = kFwhmPerSigma * sd;
  out.center_stderr = sd / std::sqrt(count);
  out.method = GaussianMethod::Moments;
  return out;
}

// Weighted fit of ln(count) = a + b t + c t^2 on bin centres t; the
// Gaussian has mean -b / 2c and variance -1 / 2c.
GaussianSummary histogram_fit(std::span<const double> values) {
  GaussianSummary base = moments_fit(values);
  base.method = GaussianMethod::HistogramLsq;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi == lo) return base;

  const auto bins = static_cast<std::size_t>(
      std::clamp(std::ceil(std::sqrt(static_cast<double>(values.size()))), 5.0, 200.0));
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> counts(bins, 0.0);
  for (double v : values)
    ++counts[std::min(bins - 1, static_cast<std::size_t>((v - lo) / width))];

  // Centre the abscissa for conditioning.
  const double shift = base.center;
  const double scale = base.fwhm > 0 ? base.fwhm : 1.0;
  double s[5] = {0, 0, 0, 0, 0};
  double r[3] = {0, 0, 0};
  for (std::size_t b = 0; b < bins; ++b) {
    if (counts[b] <= 0.0) continue;
    const double t = (lo + (static_cast<double>(b) + 0.5) * width - shift) / scale;
    const double w = counts[b];
    const double y = std::log(counts[b]);
    double tp = 1.0;
    for (int p = 0; p < 5; ++p) {
      s[p] += w * tp;
      if (p < 3) r[p] += w * tp * y;
      tp *= t;
    }
  }
  // Normal equations, 3x3, Cramer's rule.
  const double a[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
  const auto det3 = [](const double mtx[3][3]) {
    return mtx[0][0] * (mtx[1][1] * mtx[2][2] - mtx[1][2] * mtx[2][1]) -
           mtx[0][1] * (mtx[1][0] * mtx[2][2] - mtx[1][2] * mtx[2][0]) +
           mtx[0][2] * (mtx[1][0] * mtx[2][1] - mtx[1][1] * mtx[2][0]);
  };
  const double det = det3(a);
  if (std::abs(det) < 1e-300) return base;
  double coef[3];
  for (int c = 0; c < 3; ++c) {
    double mod[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mod[i][j] = j == c ? r[i] : a[i][j];
    coef[c] = det3(mod) / det;
  }
  if (!(coef[2] < 0.0)) return base;
  const double mean_t = -coef[1] / (2.0 * coef[2]);
  const double sigma_t = std::sqrt(-1.0 / (2.0 * coef[2]));
  GaussianSummary out = base;
  out.center = shift + mean_t * scale;
  out.fwhm = kFwhmPerSigma * sigma_t * scale;
  return out;
}

}  // namespace

GaussianSummary gaussian_fit(std::span<const double> values, GaussianMethod method) {
  if (values.size() < 2)
    throw_invalid("gaussian_fit: need at least 2 values, got " + std::to_string(values.size()));
  return method == GaussianMethod::Moments ? moments_fit(values) : histogram_fit(values);
}

Chi2Ensemble chi2_trials(const ClusterModel& model, std::span<const int> pattern_clusters,
                         const EventSet& pool, const TrialOptions& options) {
  if (pool.m != model.m) throw_invalid("chi2_trials: pool and model mode counts differ");
  if (options.events_per_trial < 1 || options.trials < 1)
    throw_invalid("chi2_trials: events_per_trial and trials must be >= 1");
  if (pool.size() < options.events_per_trial)
    throw_invalid(fmt::format("chi2_trials: pool of {} events is smaller than {} per trial",
                              pool.size(), options.events_per_trial));
  if (model.member_counts.size() != static_cast<std::size_t>(model.k))
    throw_invalid("chi2_trials: model is not fitted");

  std::vector<int> pool_clusters(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const std::uint32_t index = pool.indices[i];
    if (index >= pattern_clusters.size()) throw_invalid("chi2_trials: event outside assignment table");
    pool_clusters[i] = pattern_clusters[index];
  }
  std::vector<double> bona_fide(model.member_counts.begin(), model.member_counts.end());

  Chi2Ensemble out;
  out.trials = options.trials;
  out.events_per_trial = options.events_per_trial;
  out.x_ind = pool.law.kind == LawKind::Ideal ? 1.0 : pool.law.x_ind;
  out.formula = options.formula;
  out.values.assign(options.trials, 0.0);

  const int workers = std::max(1, options.threads);
  // Each worker owns a scratch permutation of pool positions. Draws are a
  // partial Fisher-Yates shuffle that is undone afterwards, so a trial's
  // sample depends only on its sub-seed.
  std::vector<std::vector<std::uint32_t>> scratch(static_cast<std::size_t>(workers));
  const std::size_t per_worker_count = options.trials;
  if (model.k == 1) {
    if (out.values.size() >= 2) {
      out.gaussian = gaussian_fit(out.values, options.gaussian);
      out.fitted = true;
    }
    return out;
  }
  parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t w) {
    auto& order = scratch[w];
    order.resize(pool.size());
    std::iota(order.begin(), order.end(), 0u);
    std::vector<std::pair<std::size_t, std::size_t>> swaps;
    swaps.reserve(options.events_per_trial);
    std::vector<double> counts(static_cast<std::size_t>(model.k));
    const std::size_t begin = per_worker_count * w / workers;
    const std::size_t end = per_worker_count * (w + 1) / workers;
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(t)));
      std::fill(counts.begin(), counts.end(), 0.0);
      swaps.clear();
      for (std::size_t d = 0; d < options.events_per_trial; ++d) {
        const std::size_t pick = d + static_cast<std::size_t>(rng.below(pool.size() - d));
        std::swap(order[d], order[pick]);
        swaps.emplace_back(d, pick);
        counts[pool_clusters[order[d]]] += 1.0;
      }
      for (auto it = swaps.rbegin(); it != swaps.rend(); ++it) std::swap(order[it->first], order[it->second]);
      out.values[t] = chi2_statistic(bona_fide, counts, options.formula);
    }
  });

  if (out.values.size() >= 2) {
    out.gaussian = gaussian_fit(out.values, options.gaussian);
    out.fitted = true;
  }
  return out;
}

Chi2Ensemble chi2_trials(const ClusterModel& model, const EventSet& pool,
                         const TrialOptions& options) {
  const std::vector<int> clusters = assign_all_patterns(model, pool.n, options.threads);
  return chi2_trials(model, clusters, pool, options);
}

double r1_metric(double c0, double c947, double c1) {
  if (c1 == c0) throw_invalid("r1: degenerate ensemble, c1 equals c0");
  return (c1 - c947) / (c1 - c0);
}

double r2_metric(double c947, double c1, double b947) {
  if (!(b947 > 0.0)) throw_invalid("r2: FWHM at the threshold must be positive");
  return (c1 - c947) / b947;
}

double least_squares_slope(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 2) throw_invalid("least_squares_slope: need at least 2 points");
  const double mean_x = (static_cast<double>(n) + 1.0) / 2.0;
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i + 1) - mean_x;
    sxy += dx * (y[i] - mean_y);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

BayesianTrace bayesian_lnx(const EventSet& events, const DistributionTable& ideal_table) {
  if (events.m != ideal_table.m || events.n != ideal_table.n)
    throw_invalid("bayesian_lnx: events and table have different (m, n)");
  if (ideal_table.law.kind != LawKind::Ideal)
    throw_invalid("bayesian_lnx: reference table must use the ideal law");
  if (!(ideal_table.cfs_mass > 0.0)) throw_invalid("bayesian_lnx: table has no collision-free mass");
  const double log_space = std::log(static_cast<double>(binomial(events.m, events.n)));

  BayesianTrace trace;
  trace.cumulative_lnx.reserve(events.size());
  double acc = 0.0;
  for (std::uint32_t index : events.indices) {
    const double pr_q = ideal_table.unconditioned(index);
    if (!(pr_q > 0.0)) {
      ++trace.skipped;
      continue;
    }
    acc += std::log(pr_q / ideal_table.cfs_mass) + log_space;
    trace.cumulative_lnx.push_back(acc);
  }
  trace.n_events = trace.cumulative_lnx.size();
  if (trace.cumulative_lnx.size() >= 2) trace.slope = least_squares_slope(trace.cumulative_lnx);
  return trace;
}

}  // namespace bsval
