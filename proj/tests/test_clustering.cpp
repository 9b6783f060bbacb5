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
#include <set>

#include <gtest/gtest.h>

#include "bsval/clustering.hpp"
#include "bsval/error.hpp"
#include "bsval/linalg.hpp"
#include "bsval/rng.hpp"
#include "bsval/samplers.hpp"

namespace bsval {
namespace {

EventSet ideal_events(std::size_t count, std::uint64_t seed) {
  const auto table = build_distribution(haar_random_unitary(16, 1), 4, ProbabilityLaw::ideal());
  return sample_exact(table, count, seed);
}

PointSet two_blobs(std::uint64_t seed) {
  Rng rng(seed);
  PointSet points(2);
  for (int i = 0; i < 200; ++i) {
    const double cx = i % 2 == 0 ? -10.0 : 10.0;
    const double p[2] = {cx + rng.normal(), rng.normal()};
    points.add(p);
  }
  return points;
}

TEST(Distance, OccupationVectors) {
  const auto a = OutputPattern({0, 1, 2, 3}, 16).occupation();
  EXPECT_EQ(l2_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(l2_distance(a, OutputPattern({0, 1, 2, 4}, 16).occupation()), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(l2_distance(a, OutputPattern({4, 5, 6, 7}, 16).occupation()), std::sqrt(8.0));
  EXPECT_THROW(l2_distance(a, std::vector<double>(3)), Error);
}

TEST(NearestCentroid, TiesGoToLowestIndex) {
  Centroids c(9, std::vector<double>{100.0, 100.0});
  c[2] = {1.0, 0.0};
  c[7] = {-1.0, 0.0};
  EXPECT_EQ(nearest_centroid(c, std::vector<double>{0.0, 0.0}), 2);
  EXPECT_EQ(nearest_centroid(c, std::vector<double>{-1.0, 0.0}), 7);
}

TEST(KMeansPP, SingleCentroidIsAnEvent) {
  const EventSet e = ideal_events(50, 2);
  const Centroids c = kmeanspp_init(e, 1, 3);
  ASSERT_EQ(c.size(), 1u);
  bool found = false;
  for (std::size_t i = 0; i < e.size(); ++i) found |= e.event(i).occupation() == c[0];
  EXPECT_TRUE(found);
}

TEST(KMeansPP, SecondCentroidIsTheOtherPoint) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PointSet points(2);
    const double a[2] = {0.0, 0.0}, b[2] = {50.0, 50.0};
    for (int i = 0; i < 5; ++i) points.add(a);
    for (int i = 0; i < 5; ++i) points.add(b);
    const Centroids c = kmeanspp_init(points, 2, seed);
    EXPECT_NE(c[0], c[1]);
  }
}

TEST(KMeansPP, HundredDistinctCentroids) {
  const EventSet e = ideal_events(1000, 4);
  const Centroids c = kmeanspp_init(e, 100, 5);
  EXPECT_EQ(std::set<std::vector<double>>(c.begin(), c.end()).size(), 100u);
}

TEST(KMeansPP, TooFewDistinctEvents) {
  const EventSet e = ideal_events(5, 6);
  EXPECT_THROW(kmeanspp_init(e, 6, 1), Error);
}

TEST(KMeans, OneClusterPerDistinctEvent) {
  const auto table = build_distribution(haar_random_unitary(6, 3), 2, ProbabilityLaw::uniform());
  const EventSet e = sample_exact(table, 400, 1);
  std::set<std::uint32_t> distinct(e.indices.begin(), e.indices.end());
  const ClusterModel model = kmeans_fit(e, static_cast<int>(distinct.size()), 2);
  for (double r : model.radii) EXPECT_EQ(r, 0.0);
  for (std::size_t c : model.member_counts) EXPECT_GT(c, 0u);
}

TEST(KMeans, SingleClusterIsTheMean) {
  const EventSet e = ideal_events(300, 7);
  const ClusterModel model = kmeans_fit(e, 1, 1);
  std::vector<double> mean(16, 0.0);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto occ = e.event(i).occupation();
    for (int j = 0; j < 16; ++j) mean[j] += occ[j] / 300.0;
  }
  for (int j = 0; j < 16; ++j) EXPECT_NEAR(model.centroids[0][j], mean[j], 1e-12);
  EXPECT_EQ(model.member_counts[0], 300u);
}

TEST(KMeans, RecoversBlobsAndWcssNeverIncreases) {
  const PointSet points = two_blobs(9);
  const ClusterModel model = kmeans_fit(points, 2, 4);
  for (std::size_t i = 1; i < model.wcss_history.size(); ++i)
    EXPECT_LE(model.wcss_history[i], model.wcss_history[i - 1] + 1e-9);
  const int even = nearest_centroid(model.centroids, points[0]);
  for (std::size_t i = 0; i < points.size(); ++i)
    EXPECT_EQ(nearest_centroid(model.centroids, points[i]) == even, i % 2 == 0);
  EXPECT_EQ(model.member_counts[0] + model.member_counts[1], 200u);
}

TEST(KMeans, ConvergedModelIsSelfConsistent) {
  const EventSet e = ideal_events(1000, 10);
  const ClusterModel model = kmeans_fit(e, 100, 11);
  ASSERT_LT(model.iterations_used, 300);
  std::vector<std::size_t> counts(100, 0);
  for (std::size_t i = 0; i < e.size(); ++i) ++counts[assign(model, e.event(i))];
  EXPECT_EQ(counts, model.member_counts);
  EXPECT_EQ(model.training_size(), 1000u);
  const auto cum = cumulative_member_counts(model);
  for (std::size_t i = 1; i < cum.size(); ++i) EXPECT_LE(cum[i - 1], cum[i]);
  EXPECT_EQ(cum.back(), 1000u);
}

TEST(KMeans, Reproducible) {
  const EventSet e = ideal_events(500, 12);
  const ClusterModel a = kmeans_fit(e, 30, 13);
  const ClusterModel b = kmeans_fit(e, 30, 13);
  EXPECT_EQ(a.centroids, b.centroids);
  EXPECT_EQ(a.member_counts, b.member_counts);
}

TEST(Assign, CentroidMapsToItsCluster) {
  const EventSet e = ideal_events(400, 14);
  const ClusterModel model = kmeans_fit(e, 20, 15);
  for (int c = 0; c < model.k; ++c)
    EXPECT_EQ(nearest_centroid(model.centroids, model.centroids[static_cast<std::size_t>(c)]), c);
  const auto all = assign_all_patterns(model, 4, 2);
  EXPECT_EQ(all.size(), 1820u);
  const auto patterns = enumerate_collision_free(16, 4);
  for (std::size_t i = 0; i < all.size(); i += 37) EXPECT_EQ(all[i], assign(model, patterns[i]));
}

TEST(ClusterModel, JsonRoundTrip) {
  const ClusterModel model = kmeans_fit(ideal_events(300, 16), 10, 17);
  const auto j = cluster_model_to_json(model);
  for (const char* key : {"k", "m", "centroids", "member_counts", "radii", "seed", "iterations_used"})
    EXPECT_TRUE(j.contains(key)) << key;
  const ClusterModel back = cluster_model_from_json(j);
  EXPECT_EQ(back.centroids, model.centroids);
  EXPECT_EQ(back.member_counts, model.member_counts);
}

}  // namespace
}  // namespace bsval
