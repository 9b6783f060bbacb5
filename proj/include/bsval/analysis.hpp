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
#include <map>
#include <vector>

#include "bsval/distribution.hpp"

namespace bsval {

/// Pattern indices of a table ordered by descending probability, ties in
/// lexicographic order. Holds a reference; the table must outlive it.
class SortedDistribution {
 public:
  explicit SortedDistribution(const DistributionTable& table);

  const DistributionTable& base() const { return *base_; }
  const std::vector<std::size_t>& order() const { return order_; }
  /// Index of the most probable pattern (T_1).
  std::size_t top() const { return order_.front(); }

 private:
  const DistributionTable* base_;
  std::vector<std::size_t> order_;
};

/// Prefix sums of the descending probabilities.
std::vector<double> cumulative_probability(const SortedDistribution& sorted);

/// Probability-weighted mean L2 distance from T_1 over the top N outputs,
/// for N = 1 ... C(m, n).
std::vector<double> mean_l2_curve(const SortedDistribution& sorted);

enum class ShellComparator { AtMost, AtLeast };

struct ShellProbability {
  double total_prob = 0.0;
  double mean_prob = 0.0;          // total_prob / patterns in the shell
  double fraction_of_space = 0.0;  // patterns in the shell / C(m, n)
  std::size_t count = 0;
};

/// Aggregate probability of patterns whose L2 distance from T_1 is at most
/// (or at least) `threshold`. Distances are compared on L2^2 with a 1e-9
/// tolerance. Throws when the shell is empty.
ShellProbability shell_probability(const DistributionTable& table, ShellComparator comparator,
                                   double threshold);

struct ShellBin {
  std::size_t count = 0;
  double total_prob = 0.0;
};

/// Patterns grouped by l, where L2(T, T_1) = sqrt(2 l), l = 0..n.
std::map<int, ShellBin> l2_shell_histogram(const DistributionTable& table);

/// Half the L1 distance between two tables over the same (m, n).
double total_variation_distance(const DistributionTable& p, const DistributionTable& q);

/// Same on raw probability vectors of equal length.
double total_variation_distance(std::span<const double> p, std::span<const double> q);

/// Half the L1 distance between the raw (pre-conditioning) law values over
/// the collision-free patterns. Used for cutoff-versus-exact comparisons,
/// where renormalising each table separately hides the truncation order.
double unconditioned_tvd(const DistributionTable& p, const DistributionTable& q);

}  // namespace bsval
