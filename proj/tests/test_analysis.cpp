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

#include <gtest/gtest.h>

#include "bsval/analysis.hpp"
#include "bsval/error.hpp"
#include "bsval/linalg.hpp"

namespace bsval {
namespace {

class AnalysisTest : public ::testing::Test {
 protected:
  const UnitaryMatrix u = haar_random_unitary(16, 1);
  const DistributionTable ideal = build_distribution(u, 4, ProbabilityLaw::ideal());
  const DistributionTable classical = build_distribution(u, 4, ProbabilityLaw::partial(0.0));
  const DistributionTable uniform = build_distribution(u, 4, ProbabilityLaw::uniform());
};

TEST_F(AnalysisTest, SortedOrderAndTies) {
  const SortedDistribution s(ideal);
  for (std::size_t i = 1; i < s.order().size(); ++i)
    ASSERT_GE(ideal.probs[s.order()[i - 1]], ideal.probs[s.order()[i]]);
  // All ties: lexicographic order is kept.
  const SortedDistribution flat(uniform);
  EXPECT_EQ(flat.top(), 0u);
  for (std::size_t i = 0; i < flat.order().size(); ++i) ASSERT_EQ(flat.order()[i], i);
}

TEST_F(AnalysisTest, CumulativeCurves) {
  const auto flat = cumulative_probability(SortedDistribution(uniform));
  for (std::size_t i = 0; i < flat.size(); ++i) ASSERT_NEAR(flat[i], (i + 1) / 1820.0, 1e-12);
  const auto q = cumulative_probability(SortedDistribution(ideal));
  const auto c = cumulative_probability(SortedDistribution(classical));
  EXPECT_NEAR(q.back(), 1.0, 1e-9);
  for (std::size_t i = 1; i < q.size(); ++i) ASSERT_GE(q[i], q[i - 1]);
  for (std::size_t i = 0; i < 91; ++i) EXPECT_GT(q[i], c[i]) << i;
}

TEST_F(AnalysisTest, MeanL2Curve) {
  const SortedDistribution s(ideal);
  const auto curve = mean_l2_curve(s);
  ASSERT_EQ(curve.size(), 1820u);
  EXPECT_EQ(curve[0], 0.0);
  for (double v : curve) {
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, std::sqrt(8.0) + 1e-12);
  }
  // The last point is the table-wide weighted mean distance from T_1.
  const OutputPattern& top = ideal.patterns[s.top()];
  double mean = 0.0;
  for (std::size_t i = 0; i < ideal.size(); ++i)
    mean += ideal.probs[i] * std::sqrt(static_cast<double>(squared_l2(ideal.patterns[i], top)));
  EXPECT_NEAR(curve.back(), mean, 1e-9);
}

TEST_F(AnalysisTest, ShellCombinatorics) {
  const ShellProbability inner = shell_probability(ideal, ShellComparator::AtMost, std::sqrt(2.0));
  EXPECT_EQ(inner.count, 49u);
  EXPECT_DOUBLE_EQ(inner.fraction_of_space, 49.0 / 1820.0);
  EXPECT_NEAR(inner.mean_prob, inner.total_prob / 49.0, 1e-15);

  const auto hist = l2_shell_histogram(ideal);
  std::size_t total = 0;
  for (int l = 0; l <= 4; ++l) {
    EXPECT_EQ(hist.at(l).count, binomial(4, l) * binomial(12, l)) << l;
    total += hist.at(l).count;
  }
  EXPECT_EQ(hist.at(0).count, 1u);
  EXPECT_EQ(hist.at(1).count, 48u);
  EXPECT_EQ(total, 1820u);

  const ShellProbability outer = shell_probability(ideal, ShellComparator::AtLeast, std::sqrt(6.0));
  EXPECT_EQ(outer.count, hist.at(3).count + hist.at(4).count);
  EXPECT_THROW(shell_probability(ideal, ShellComparator::AtLeast, 4.0), Error);
}

TEST_F(AnalysisTest, TvdMetric) {
  EXPECT_EQ(total_variation_distance(ideal, ideal), 0.0);
  const double ab = total_variation_distance(ideal, classical);
  EXPECT_DOUBLE_EQ(ab, total_variation_distance(classical, ideal));
  EXPECT_LE(ab, total_variation_distance(ideal, uniform) + total_variation_distance(uniform, classical) + 1e-15);
  const std::vector<double> p = {0.5, 0.5, 0.0, 0.0}, q = {0.0, 0.0, 0.25, 0.75};
  EXPECT_DOUBLE_EQ(total_variation_distance(p, q), 1.0);
  const auto small = build_distribution(haar_random_unitary(8, 1), 4, ProbabilityLaw::ideal());
  EXPECT_THROW(total_variation_distance(ideal, small), Error);
}

TEST(Tvd, ApproxCutoffTwoGrowsWithX) {
  const UnitaryMatrix u = haar_random_unitary(16, 2);
  double previous = -1.0;
  for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const double d = total_variation_distance(build_distribution(u, 4, ProbabilityLaw::approx(x, 2)),
                                              build_distribution(u, 4, ProbabilityLaw::partial(x)));
    EXPECT_GT(d, previous) << x;
    previous = d;
  }
}

}  // namespace
}  // namespace bsval
