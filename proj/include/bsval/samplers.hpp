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
#include <string>
#include <vector>

#include <json.hpp>

#include "bsval/distribution.hpp"
#include "bsval/pattern.hpp"

namespace bsval {

enum class SamplingMethod { Exact, Mcmc };

std::string method_name(SamplingMethod method);

struct McmcConfig {
  std::size_t burn_in = 1000;
  std::size_t thinning = 100;
  std::uint64_t seed = 0;
};

/// Sampled collision-free events. Each event is stored as its index in
/// the lexicographic (m, n) enumeration, so every event is valid by
/// construction.
struct EventSet {
  int m = 0;
  int n = 0;
  std::vector<std::uint32_t> indices;
  ProbabilityLaw law;
  std::string law_label;
  std::uint64_t seed = 0;
  SamplingMethod method = SamplingMethod::Exact;
  McmcConfig mcmc;             // meaningful for Mcmc only
  double acceptance_rate = 0;  // Mcmc only

  std::size_t size() const { return indices.size(); }
  OutputPattern event(std::size_t i) const;
};

/// i.i.d. inverse-CDF draws over the table's lexicographic order.
EventSet sample_exact(const DistributionTable& table, std::size_t count, std::uint64_t seed);

/// Metropolis chain over collision-free patterns. A move swaps one occupied
/// mode for one empty mode, both uniform, and is accepted with
/// min(1, p'/p). Keeps every `thinning`-th state after `burn_in` steps.
EventSet sample_mcmc(const DistributionTable& table, std::size_t count, const McmcConfig& config);

/// Independent chains with sub-seeds derived from (config.seed, chain);
/// events are concatenated in chain order.
EventSet sample_mcmc_chains(const DistributionTable& table, std::size_t count,
                            const McmcConfig& config, int chains, int threads);

/// CSV `event_index,pattern` plus a JSON provenance sidecar.
void write_events(const EventSet& events, const std::filesystem::path& csv_path,
                  const std::filesystem::path& json_path);
nlohmann::json events_sidecar(const EventSet& events);

/// Reads an events CSV written by write_events; (m, n) come from the caller.
EventSet read_events_csv(const std::filesystem::path& csv_path, int mode_count, int photons);

}  // namespace bsval
