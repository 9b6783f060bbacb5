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

#include "bsval/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "bsval/error.hpp"
#include "bsval/parallel.hpp"
#include "bsval/rng.hpp"

namespace bsval {

namespace {

// Distances closer than this are treated as ties.
constexpr double kTieTolerance = 1e-12;

std::size_t distinct_points(const PointSet& points) {
  std::set<std::vector<double>> seen;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto p = points[i];
    seen.emplace(p.begin(), p.end());
  }
  return seen.size();
}

void check_fit_input(const PointSet& points, int k) {
  if (k < 1) throw_invalid("k-means: k must be >= 1");
  const std::size_t distinct = distinct_points(points);
  if (distinct < static_cast<std::size_t>(k))
    throw_invalid("k-means: only " + std::to_string(distinct) + " distinct events for k = " +
                  std::to_string(k));
}

double wcss(const PointSet& points, const Centroids& centroids, const std::vector<int>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    total += squared_l2_distance(points[i], centroids[labels[i]]);
  return total;
}

}  // namespace

PointSet PointSet::from_events(const EventSet& events) {
  PointSet points(static_cast<std::size_t>(events.m));
  PatternIndexer indexer(events.m, events.n);
  std::vector<int> modes(static_cast<std::size_t>(events.n));
  std::vector<double> occ(static_cast<std::size_t>(events.m));
  for (std::uint32_t index : events.indices) {
    indexer.unrank(index, modes);
    std::fill(occ.begin(), occ.end(), 0.0);
    for (int mode : modes) occ[mode] = 1.0;
    points.add(occ);
  }
  return points;
}

void PointSet::add(std::span<const double> point) {
  if (point.size() != dim_) throw_invalid("PointSet: dimension mismatch");
  coords_.insert(coords_.end(), point.begin(), point.end());
}

double squared_l2_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw_invalid("l2_distance: lengths " + std::to_string(p.size()) + " and " +
                  std::to_string(q.size()) + " differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - q[i];
    acc += d * d;
  }
  return acc;
}

double l2_distance(std::span<const double> p, std::span<const double> q) {
  return std::sqrt(squared_l2_distance(p, q));
}

int nearest_centroid(const Centroids& centroids, std::span<const double> point) {
  if (centroids.empty()) throw_invalid("nearest_centroid: no centroids");
  std::vector<double> dist(centroids.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    dist[c] = squared_l2_distance(point, centroids[c]);
    best = std::min(best, dist[c]);
  }
  for (std::size_t c = 0; c < centroids.size(); ++c)
    if (dist[c] <= best + kTieTolerance) return static_cast<int>(c);
  return 0;
}

Centroids kmeanspp_init(const PointSet& points, int k, std::uint64_t seed) {
  check_fit_input(points, k);
  Rng rng(seed);
  Centroids centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  const std::size_t first = static_cast<std::size_t>(rng.below(points.size()));
  centroids.emplace_back(points[first].begin(), points[first].end());

  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    d2[i] = squared_l2_distance(points[i], centroids.front());

  while (centroids.size() < static_cast<std::size_t>(k)) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    if (!(total > 0.0)) throw_numerical("kmeanspp_init: all remaining events coincide with centroids");
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t chosen = points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (d2[i] <= 0.0) continue;
      acc += d2[i];
      chosen = i;
      if (acc > target) break;
    }
    centroids.emplace_back(points[chosen].begin(), points[chosen].end());
    for (std::size_t i = 0; i < points.size(); ++i)
      d2[i] = std::min(d2[i], squared_l2_distance(points[i], centroids.back()));
  }
  return centroids;
}

Centroids kmeanspp_init(const EventSet& events, int k, std::uint64_t seed) {
  return kmeanspp_init(PointSet::from_events(events), k, seed);
}

ClusterModel kmeans_fit(const PointSet& points, int k, std::uint64_t seed,
                        const KMeansOptions& options) {
  if (options.max_iter < 1) throw_invalid("kmeans_fit: max_iter must be >= 1");
  ClusterModel model;
  model.k = k;
  model.m = static_cast<int>(points.dim());
  model.seed = seed;
  model.centroids = kmeanspp_init(points, k, seed);

  const std::size_t count = points.size();
  const std::size_t dim = points.dim();
  std::vector<int> labels(count);
  const auto assign_all = [&] {
    for (std::size_t i = 0; i < count; ++i) labels[i] = nearest_centroid(model.centroids, points[i]);
  };

  assign_all();
  model.wcss_history.push_back(wcss(points, model.centroids, labels));

  for (int iter = 0; iter < options.max_iter; ++iter) {
    model.iterations_used = iter + 1;
    Centroids next(static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < count; ++i) {
      auto p = points[i];
      auto& c = next[labels[i]];
      for (std::size_t d = 0; d < dim; ++d) c[d] += p[d];
      ++sizes[labels[i]];
    }
    for (std::size_t c = 0; c < next.size(); ++c) {
      if (sizes[c] == 0) continue;
      for (double& v : next[c]) v /= static_cast<double>(sizes[c]);
    }
    // Empty clusters take the point farthest from its own centroid.
    for (std::size_t c = 0; c < next.size(); ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < count; ++i) {
        const double d = squared_l2_distance(points[i], next[labels[i]]);
        if (sizes[labels[i]] > 1 && d > far_d) {
          far_d = d;
          far = i;
        }
      }
      next[c].assign(points[far].begin(), points[far].end());
      --sizes[labels[far]];
      labels[far] = static_cast<int>(c);
      sizes[c] = 1;
    }

    double shift = 0.0;
    for (std::size_t c = 0; c < next.size(); ++c)
      shift = std::max(shift, l2_distance(next[c], model.centroids[c]));
    model.centroids = std::move(next);

    const std::vector<int> previous = labels;
    assign_all();
    const double current = wcss(points, model.centroids, labels);
    if (current > model.wcss_history.back() * (1.0 + 1e-12) + 1e-12)
      throw_numerical("kmeans_fit: within-cluster sum of squares increased");
    model.wcss_history.push_back(current);
    if (shift < options.tol || labels == previous) break;
  }

  model.member_counts.assign(static_cast<std::size_t>(k), 0);
  model.radii.assign(static_cast<std::size_t>(k), 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    ++model.member_counts[labels[i]];
    model.radii[labels[i]] =
        std::max(model.radii[labels[i]], l2_distance(points[i], model.centroids[labels[i]]));
  }
  return model;
}

ClusterModel kmeans_fit(const EventSet& events, int k, std::uint64_t seed,
                        const KMeansOptions& options) {
  return kmeans_fit(PointSet::from_events(events), k, seed, options);
}

std::size_t ClusterModel::training_size() const {
  return std::accumulate(member_counts.begin(), member_counts.end(), std::size_t{0});
}

int assign(const ClusterModel& model, const OutputPattern& event) {
  if (event.mode_count() != model.m)
    throw_invalid("assign: event has " + std::to_string(event.mode_count()) +
                  " modes, model has " + std::to_string(model.m));
  return nearest_centroid(model.centroids, event.occupation());
}

std::vector<int> assign_all_patterns(const ClusterModel& model, int photons, int threads) {
  PatternIndexer indexer(model.m, photons);
  std::vector<int> out(indexer.size());
  parallel_for(out.size(), threads, [&](std::size_t r) {
    std::vector<int> modes(static_cast<std::size_t>(photons));
    indexer.unrank(r, modes);
    std::vector<double> occ(static_cast<std::size_t>(model.m), 0.0);
    for (int mode : modes) occ[mode] = 1.0;
    out[r] = nearest_centroid(model.centroids, occ);
  });
  return out;
}

std::vector<std::size_t> cumulative_member_counts(const ClusterModel& model) {
  std::vector<std::size_t> sorted = model.member_counts;
  std::sort(sorted.begin(), sorted.end());
  std::partial_sum(sorted.begin(), sorted.end(), sorted.begin());
  return sorted;
}

nlohmann::json cluster_model_to_json(const ClusterModel& model) {
  nlohmann::json j;
  j["k"] = model.k;
  j["m"] = model.m;
  j["centroids"] = model.centroids;
  j["member_counts"] = model.member_counts;
  j["radii"] = model.radii;
  j["seed"] = model.seed;
  j["iterations_used"] = model.iterations_used;
  return j;
}

ClusterModel cluster_model_from_json(const nlohmann::json& j) {
  try {
    ClusterModel model;
    model.k = j.at("k").get<int>();
    model.m = j.at("m").get<int>();
    model.centroids = j.at("centroids").get<Centroids>();
    model.member_counts = j.at("member_counts").get<std::vector<std::size_t>>();
    model.radii = j.at("radii").get<std::vector<double>>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.iterations_used = j.at("iterations_used").get<int>();
    if (model.centroids.size() != static_cast<std::size_t>(model.k) ||
        model.member_counts.size() != static_cast<std::size_t>(model.k))
      throw_invalid("cluster model: array lengths disagree with k");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw_invalid(std::string("cluster model: ") + e.what());
  }
}

}  // namespace bsval
