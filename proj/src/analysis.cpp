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

#include "bsval/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bsval/error.hpp"

namespace bsval {

namespace {

constexpr double kShellTolerance = 1e-9;

}  // namespace

SortedDistribution::SortedDistribution(const DistributionTable& table) : base_(&table) {
  if (table.size() == 0) throw_invalid("SortedDistribution: empty table");
  order_.resize(table.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    return table.probs[a] > table.probs[b];
  });
}

std::vector<double> cumulative_probability(const SortedDistribution& sorted) {
  const auto& probs = sorted.base().probs;
  std::vector<double> out;
  out.reserve(probs.size());
  double acc = 0.0;
  for (std::size_t i : sorted.order()) {
    acc += probs[i];
    out.push_back(acc);
  }
  return out;
}

std::vector<double> mean_l2_curve(const SortedDistribution& sorted) {
  const DistributionTable& table = sorted.base();
  const OutputPattern& top = table.patterns[sorted.top()];
  std::vector<double> out;
  out.reserve(table.size());
  double weighted = 0.0;
  double mass = 0.0;
  for (std::size_t i : sorted.order()) {
    const double p = table.probs[i];
    weighted += std::sqrt(static_cast<double>(squared_l2(table.patterns[i], top))) * p;
    mass += p;
    out.push_back(mass > 0.0 ? weighted / mass : 0.0);
  }
  return out;
}

ShellProbability shell_probability(const DistributionTable& table, ShellComparator comparator,
                                   double threshold) {
  const SortedDistribution sorted(table);
  const OutputPattern& top = table.patterns[sorted.top()];
  const double limit = threshold * threshold;
  ShellProbability out;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double d2 = squared_l2(table.patterns[i], top);
    const bool inside = comparator == ShellComparator::AtMost ? d2 <= limit + kShellTolerance
                                                              : d2 >= limit - kShellTolerance;
    if (!inside) continue;
    ++out.count;
    out.total_prob += table.probs[i];
  }
  if (out.count == 0) throw_invalid("shell_probability: no pattern lies in the requested shell");
  out.mean_prob = out.total_prob / static_cast<double>(out.count);
  out.fraction_of_space = static_cast<double>(out.count) / static_cast<double>(table.size());
  return out;
}

std::map<int, ShellBin> l2_shell_histogram(const DistributionTable& table) {
  const SortedDistribution sorted(table);
  const OutputPattern& top = table.patterns[sorted.top()];
  std::map<int, ShellBin> out;
  for (int l = 0; l <= table.n; ++l) out[l] = ShellBin{};
  for (std::size_t i = 0; i < table.size(); ++i) {
    const int l = table.n - shared_modes(table.patterns[i], top);
    auto& bin = out[l];
    ++bin.count;
    bin.total_prob += table.probs[i];
  }
  return out;
}

double total_variation_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw_invalid("total_variation_distance: sizes " + std::to_string(p.size()) + " and " +
                  std::to_string(q.size()) + " differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

double total_variation_distance(const DistributionTable& p, const DistributionTable& q) {
  if (p.m != q.m || p.n != q.n)
    throw_invalid("total_variation_distance: tables cover different (m, n)");
  return total_variation_distance(p.probs, q.probs);
}

double unconditioned_tvd(const DistributionTable& p, const DistributionTable& q) {
  if (p.m != q.m || p.n != q.n) throw_invalid("unconditioned_tvd: tables cover different (m, n)");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p.unconditioned(i) - q.unconditioned(i));
  return 0.5 * acc;
}

}  // namespace bsval
