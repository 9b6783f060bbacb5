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
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "bsval/pattern.hpp"
#include "bsval/samplers.hpp"

namespace bsval {

/// Row-major point cloud in R^dim. Duplicate rows carry multiplicity.
class PointSet {
 public:
  explicit PointSet(std::size_t dim) : dim_(dim) {}

  static PointSet from_events(const EventSet& events);

  void add(std::span<const double> point);
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ ? coords_.size() / dim_ : 0; }
  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }

 private:
  std::size_t dim_;
  std::vector<double> coords_;
};

/// Euclidean distance; patterns are embedded as 0/1 occupation vectors.
double l2_distance(std::span<const double> p, std::span<const double> q);
double squared_l2_distance(std::span<const double> p, std::span<const double> q);

using Centroids = std::vector<std::vector<double>>;

/// Index of the nearest centroid; among (numerically) equal distances the
/// lowest index wins.
int nearest_centroid(const Centroids& centroids, std::span<const double> point);

/// k-means++ seeding: the first centroid is a uniform draw, each further
/// one is drawn with probability proportional to the squared distance to
/// the nearest centroid chosen so far.
Centroids kmeanspp_init(const PointSet& points, int k, std::uint64_t seed);
Centroids kmeanspp_init(const EventSet& events, int k, std::uint64_t seed);

struct KMeansOptions {
  int max_iter = 300;
  double tol = 1e-6;  // max centroid shift
};

struct ClusterModel {
  int k = 0;
  int m = 0;
  Centroids centroids;
  std::vector<std::size_t> member_counts;
  std::vector<double> radii;
  std::uint64_t seed = 0;
  int iterations_used = 0;
  /// Within-cluster sum of squares after seeding and after each iteration.
  std::vector<double> wcss_history;

  std::size_t training_size() const;
};

/// k-means++ seeding followed by Lloyd iterations. A cluster that empties
/// is re-seeded at the point farthest from its current nearest centroid.
ClusterModel kmeans_fit(const PointSet& points, int k, std::uint64_t seed,
                        const KMeansOptions& options = {});
ClusterModel kmeans_fit(const EventSet& events, int k, std::uint64_t seed,
                        const KMeansOptions& options = {});

int assign(const ClusterModel& model, const OutputPattern& event);

/// Cluster index of every pattern in the (m, n) lexicographic enumeration.
std::vector<int> assign_all_patterns(const ClusterModel& model, int photons, int threads = 1);

/// Member counts sorted ascending and accumulated.
std::vector<std::size_t> cumulative_member_counts(const ClusterModel& model);

nlohmann::json cluster_model_to_json(const ClusterModel& model);
ClusterModel cluster_model_from_json(const nlohmann::json& j);

}  // namespace bsval
