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
#include <filesystem>

#include <gtest/gtest.h>

#include "bsval/analysis.hpp"
#include "bsval/error.hpp"
#include "bsval/linalg.hpp"
#include "bsval/samplers.hpp"

namespace bsval {
namespace {

std::vector<double> frequencies(const EventSet& events, std::size_t size) {
  std::vector<double> f(size, 0.0);
  for (std::uint32_t i : events.indices) f[i] += 1.0;
  for (double& v : f) v /= static_cast<double>(events.size());
  return f;
}

// Share of patterns whose count lies within 5 binomial sigma of the table.
double within_five_sigma(const EventSet& events, const DistributionTable& table) {
  const auto f = frequencies(events, table.size());
  const double n = static_cast<double>(events.size());
  std::size_t ok = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double p = table.probs[i];
    const double sigma = std::sqrt(n * p * (1 - p));
    if (std::abs(f[i] * n - n * p) <= 5 * sigma + 1e-9) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(table.size());
}

class SamplerTest : public ::testing::Test {
 protected:
  const UnitaryMatrix u = haar_random_unitary(16, 1);
  const DistributionTable uniform = build_distribution(u, 4, ProbabilityLaw::uniform());
  const DistributionTable ideal = build_distribution(u, 4, ProbabilityLaw::ideal());
};

TEST(SampleExact, SinglePatternTable) {
  const auto t = build_distribution(haar_random_unitary(3, 1), 3, ProbabilityLaw::ideal());
  const EventSet e = sample_exact(t, 50, 1);
  for (std::size_t i = 0; i < e.size(); ++i) EXPECT_EQ(e.event(i).to_string(), "0-1-2");
}

TEST_F(SamplerTest, ExactUniformFrequencies) {
  const EventSet e = sample_exact(uniform, 100000, 3);
  EXPECT_EQ(within_five_sigma(e, uniform), 1.0);
}

TEST_F(SamplerTest, ExactIdealTvd) {
  const EventSet e = sample_exact(ideal, 100000, 4);
  EXPECT_LT(total_variation_distance(frequencies(e, ideal.size()), ideal.probs), 0.05);
  EXPECT_EQ(e.method, SamplingMethod::Exact);
}

TEST_F(SamplerTest, McmcUniformAcceptsEverything) {
  const EventSet e = sample_mcmc(uniform, 100000, McmcConfig{1000, 100, 5});
  EXPECT_DOUBLE_EQ(e.acceptance_rate, 1.0);
  EXPECT_EQ(within_five_sigma(e, uniform), 1.0);
}

TEST_F(SamplerTest, McmcIdealTvd) {
  const EventSet e = sample_mcmc(ideal, 100000, McmcConfig{1000, 100, 1});
  EXPECT_LT(total_variation_distance(frequencies(e, ideal.size()), ideal.probs), 0.05);
}

TEST_F(SamplerTest, McmcPartialWithinBands) {
  const auto partial = build_distribution(u, 4, ProbabilityLaw::partial(0.5));
  const EventSet e = sample_mcmc(partial, 100000, McmcConfig{1000, 100, 6});
  EXPECT_GE(within_five_sigma(e, partial), 0.99);
}

TEST_F(SamplerTest, Reproducible) {
  const McmcConfig config{200, 10, 77};
  EXPECT_EQ(sample_mcmc(ideal, 5000, config).indices, sample_mcmc(ideal, 5000, config).indices);
  EXPECT_EQ(sample_exact(ideal, 5000, 8).indices, sample_exact(ideal, 5000, 8).indices);
  EXPECT_NE(sample_exact(ideal, 5000, 8).indices, sample_exact(ideal, 5000, 9).indices);
}

TEST_F(SamplerTest, ChainsIndependentOfThreads) {
  const McmcConfig config{100, 10, 3};
  const EventSet one = sample_mcmc_chains(ideal, 4000, config, 4, 1);
  const EventSet four = sample_mcmc_chains(ideal, 4000, config, 4, 4);
  EXPECT_EQ(one.size(), 4000u);
  EXPECT_EQ(one.indices, four.indices);
}

TEST_F(SamplerTest, Preconditions) {
  EXPECT_THROW(sample_mcmc(ideal, 10, McmcConfig{0, 0, 1}), Error);
  DistributionTable empty;
  EXPECT_THROW(sample_exact(empty, 10, 1), Error);
}

TEST_F(SamplerTest, CsvRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "bsval_events_test";
  std::filesystem::create_directories(dir);
  const EventSet e = sample_mcmc(ideal, 300, McmcConfig{10, 2, 12});
  write_events(e, dir / "e.csv", dir / "e.json");
  const EventSet back = read_events_csv(dir / "e.csv", 16, 4);
  EXPECT_EQ(back.indices, e.indices);
  const auto sidecar = events_sidecar(e);
  for (const char* key : {"law", "x_ind", "method", "seed", "burn_in", "thinning"})
    EXPECT_TRUE(sidecar.contains(key)) << key;
  EXPECT_THROW(read_events_csv(dir / "e.csv", 16, 5), Error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace bsval
