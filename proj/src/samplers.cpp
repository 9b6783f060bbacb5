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

#include "bsval/samplers.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "bsval/error.hpp"
#include "bsval/parallel.hpp"
#include "bsval/rng.hpp"

namespace bsval {

std::string method_name(SamplingMethod method) {
  return method == SamplingMethod::Exact ? "exact" : "mcmc";
}

OutputPattern EventSet::event(std::size_t i) const {
  return lex_unrank(indices.at(i), m, n);
}

namespace {

void check_table(const DistributionTable& table) {
  if (table.size() == 0) throw_invalid("sampler: empty distribution table");
  if (table.size() > std::numeric_limits<std::uint32_t>::max())
    throw_invalid("sampler: table too large for 32-bit event indices");
}

EventSet empty_events(const DistributionTable& table, std::uint64_t seed, SamplingMethod method) {
  EventSet out;
  out.m = table.m;
  out.n = table.n;
  out.law = table.law;
  out.law_label = table.law.label();
  out.seed = seed;
  out.method = method;
  return out;
}

}  // namespace

EventSet sample_exact(const DistributionTable& table, std::size_t count, std::uint64_t seed) {
  check_table(table);
  std::vector<double> cdf(table.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    acc += table.probs[i];
    cdf[i] = acc;
  }
  EventSet out = empty_events(table, seed, SamplingMethod::Exact);
  out.indices.reserve(count);
  Rng rng(seed);
  for (std::size_t draw = 0; draw < count; ++draw) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    // Guard against u landing on the final bucket boundary or a trailing
    // zero-probability entry.
    std::size_t idx = std::min<std::size_t>(it - cdf.begin(), table.size() - 1);
    while (table.probs[idx] == 0.0 && idx > 0) --idx;
    out.indices.push_back(static_cast<std::uint32_t>(idx));
  }
  return out;
}

EventSet sample_mcmc(const DistributionTable& table, std::size_t count, const McmcConfig& config) {
  check_table(table);
  if (config.thinning < 1) throw_invalid("sample_mcmc: thinning must be >= 1");
  const int m = table.m;
  const int n = table.n;
  PatternIndexer indexer(m, n);
  Rng rng(config.seed);

  std::vector<int> modes(static_cast<std::size_t>(n));
  std::size_t state = static_cast<std::size_t>(rng.below(table.size()));
  if (table.probs[state] == 0.0)
    state = static_cast<std::size_t>(
        std::max_element(table.probs.begin(), table.probs.end()) - table.probs.begin());
  indexer.unrank(state, modes);
  double p_state = table.probs[state];

  std::vector<char> occupied(static_cast<std::size_t>(m), 0);
  for (int mode : modes) occupied[mode] = 1;

  EventSet out = empty_events(table, config.seed, SamplingMethod::Mcmc);
  out.mcmc = config;
  out.indices.reserve(count);

  std::vector<int> proposal(modes.size());
  std::size_t accepted = 0;
  std::size_t steps = 0;
  const auto step = [&]() {
    ++steps;
    if (n == m) return;  // single pattern, nothing to move
    const auto slot = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n)));
    auto target = static_cast<int>(rng.below(static_cast<std::uint64_t>(m - n)));
    int to = 0;
    for (;; ++to) {
      if (occupied[to]) continue;
      if (target-- == 0) break;
    }
    const int from = modes[slot];
    proposal = modes;
    proposal[slot] = to;
    std::sort(proposal.begin(), proposal.end());
    const std::size_t next = indexer.rank(proposal);
    const double p_next = table.probs[next];
    bool accept = p_next >= p_state;
    if (!accept && p_next > 0.0) accept = rng.uniform() * p_state < p_next;
    if (!accept) return;
    ++accepted;
    modes.swap(proposal);
    occupied[from] = 0;
    occupied[to] = 1;
    state = next;
    p_state = p_next;
  };

  for (std::size_t i = 0; i < config.burn_in; ++i) step();
  while (out.indices.size() < count) {
    for (std::size_t i = 0; i < config.thinning; ++i) step();
    out.indices.push_back(static_cast<std::uint32_t>(state));
  }
  out.acceptance_rate = steps ? static_cast<double>(accepted) / static_cast<double>(steps) : 1.0;
  return out;
}

EventSet sample_mcmc_chains(const DistributionTable& table, std::size_t count,
                            const McmcConfig& config, int chains, int threads) {
  if (chains < 1) throw_invalid("sample_mcmc_chains: need at least one chain");
  std::vector<EventSet> parts(static_cast<std::size_t>(chains));
  parallel_for(parts.size(), threads, [&](std::size_t c) {
    McmcConfig sub = config;
    sub.seed = derive_seed(config.seed, static_cast<std::uint64_t>(c));
    const std::size_t share = count * (c + 1) / parts.size() - count * c / parts.size();
    parts[c] = sample_mcmc(table, share, sub);
  });
  EventSet out = empty_events(table, config.seed, SamplingMethod::Mcmc);
  out.mcmc = config;
  double rate = 0.0;
  for (const EventSet& part : parts) {
    out.indices.insert(out.indices.end(), part.indices.begin(), part.indices.end());
    rate += part.acceptance_rate;
  }
  out.acceptance_rate = rate / static_cast<double>(parts.size());
  return out;
}

nlohmann::json events_sidecar(const EventSet& events) {
  nlohmann::json j;
  j["m"] = events.m;
  j["n"] = events.n;
  j["count"] = events.size();
  j["law"] = law_to_json(events.law);
  j["law_label"] = events.law_label;
  j["x_ind"] = events.law.x_ind;
  j["method"] = method_name(events.method);
  j["seed"] = events.seed;
  if (events.method == SamplingMethod::Mcmc) {
    j["burn_in"] = events.mcmc.burn_in;
    j["thinning"] = events.mcmc.thinning;
    j["acceptance_rate"] = events.acceptance_rate;
  }
  return j;
}

void write_events(const EventSet& events, const std::filesystem::path& csv_path,
                  const std::filesystem::path& json_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw_io("cannot open " + csv_path.string() + " for writing");
  csv << "event_index,pattern\n";
  PatternIndexer indexer(events.m, events.n);
  std::vector<int> modes(static_cast<std::size_t>(events.n));
  for (std::size_t i = 0; i < events.size(); ++i) {
    indexer.unrank(events.indices[i], modes);
    csv << i << ',';
    for (std::size_t k = 0; k < modes.size(); ++k) {
      if (k) csv << '-';
      csv << modes[k];
    }
    csv << '\n';
  }
  if (!csv) throw_io("write failed: " + csv_path.string());
  std::ofstream side(json_path);
  if (!side) throw_io("cannot open " + json_path.string() + " for writing");
  side << events_sidecar(events).dump(2) << '\n';
}

EventSet read_events_csv(const std::filesystem::path& csv_path, int mode_count, int photons) {
  std::ifstream in(csv_path);
  if (!in) throw_io("cannot open " + csv_path.string());
  PatternIndexer indexer(mode_count, photons);
  EventSet out;
  out.m = mode_count;
  out.n = photons;
  out.law_label = "file " + csv_path.filename().string();
  std::string line;
  std::getline(in, line);
  if (line.rfind("event_index,pattern", 0) != 0)
    throw_io(csv_path.string() + ": missing 'event_index,pattern' header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw_io(csv_path.string() + ": malformed row '" + line + "'");
    const OutputPattern pattern = OutputPattern::parse(line.substr(comma + 1), mode_count);
    if (pattern.photons() != photons)
      throw_invalid(csv_path.string() + ": event " + pattern.to_string() + " has wrong photon number");
    out.indices.push_back(static_cast<std::uint32_t>(indexer.rank(pattern.modes())));
  }
  return out;
}

}  // namespace bsval
