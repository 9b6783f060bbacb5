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

#include "bsval/distribution.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "bsval/error.hpp"
#include "bsval/model.hpp"
#include "bsval/parallel.hpp"

namespace bsval {

std::string ProbabilityLaw::kind_name() const {
  switch (kind) {
    case LawKind::Ideal: return "ideal";
    case LawKind::Partial: return "partial";
    case LawKind::Approx: return "approx";
    case LawKind::Uniform: return "uniform";
    case LawKind::FullyDistinguishable: return "fully-distinguishable";
  }
  return "unknown";
}

std::string ProbabilityLaw::label() const {
  switch (kind) {
    case LawKind::Partial: return fmt::format("partial x={}", x_ind);
    case LawKind::Approx: return fmt::format("approx x={} cutoff={}", x_ind, n_cutoff);
    default: return kind_name();
  }
}

nlohmann::json law_to_json(const ProbabilityLaw& law) {
  nlohmann::json j;
  j["kind"] = law.kind_name();
  if (law.kind == LawKind::Partial || law.kind == LawKind::Approx) j["x_ind"] = law.x_ind;
  if (law.kind == LawKind::Approx) j["n_cutoff"] = law.n_cutoff;
  return j;
}

ProbabilityLaw law_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    ProbabilityLaw law;
    if (kind == "ideal") {
      law = ProbabilityLaw::ideal();
    } else if (kind == "partial") {
      law = ProbabilityLaw::partial(j.at("x_ind").get<double>());
    } else if (kind == "approx") {
      law = ProbabilityLaw::approx(j.value("x_ind", 1.0), j.at("n_cutoff").get<int>());
    } else if (kind == "uniform") {
      law = ProbabilityLaw::uniform();
    } else if (kind == "fully-distinguishable") {
      law = ProbabilityLaw::fully_distinguishable();
    } else {
      throw_config("unknown law kind '" + kind + "'");
    }
    if (!(law.x_ind >= 0.0 && law.x_ind <= 1.0))
      throw_config("law x_ind must lie in [0, 1]");
    return law;
  } catch (const nlohmann::json::exception& e) {
    throw_config(std::string("law: ") + e.what());
  }
}

std::size_t DistributionTable::index_of(const OutputPattern& pattern) const {
  if (pattern.mode_count() != m || pattern.photons() != n)
    throw_invalid("pattern " + pattern.to_string() + " does not belong to this table");
  return PatternIndexer(m, n).rank(pattern.modes());
}

namespace {

bool is_cutoff_truncation(const ProbabilityLaw& law, int photons) {
  return law.kind == LawKind::Approx && law.n_cutoff < photons;
}

}  // namespace

DistributionTable build_distribution(const UnitaryMatrix& u, int photons, const ProbabilityLaw& law,
                                     const TableOptions& options) {
  const int m = static_cast<int>(u.dim());
  if (photons < 1 || photons > m)
    throw_invalid("build_distribution: need 1 <= n <= m, got n = " + std::to_string(photons));
  if (binomial(m, photons) > kMaxTableSize)
    throw_invalid(fmt::format("build_distribution: C({}, {}) exceeds the enumeration bound {}", m,
                              photons, kMaxTableSize));

  DistributionTable table;
  table.m = m;
  table.n = photons;
  table.law = law;
  OutputPattern input = options.input_modes ? OutputPattern(*options.input_modes, m)
                                            : OutputPattern::leading(photons, m);
  if (input.photons() != photons)
    throw_invalid("build_distribution: input pattern has the wrong photon number");
  table.input_modes.assign(input.modes().begin(), input.modes().end());
  table.patterns = enumerate_collision_free(m, photons);
  const std::size_t count = table.patterns.size();
  std::vector<double> raw(count, 0.0);

  switch (law.kind) {
    case LawKind::Uniform:
      std::fill(raw.begin(), raw.end(), 1.0 / static_cast<double>(count));
      break;
    case LawKind::Ideal:
      parallel_for(count, options.threads, [&](std::size_t i) {
        raw[i] = ideal_probability(u, input, table.patterns[i]);
      });
      break;
    case LawKind::Partial:
    case LawKind::Approx:
    case LawKind::FullyDistinguishable: {
      const double x = law.kind == LawKind::FullyDistinguishable ? 0.0 : law.x_ind;
      const int order = law.kind == LawKind::Approx ? law.n_cutoff : photons;
      if (law.kind == LawKind::Approx && (order < 0 || order > photons))
        throw_invalid(fmt::format("build_distribution: n_cutoff {} outside [0, {}]", order, photons));
      const InterferenceKernel kernel(photons, x, order);
      parallel_for(count, options.threads, [&](std::size_t i) {
        raw[i] = kernel.evaluate(submatrix_collision_free(u, input, table.patterns[i]));
      });
      break;
    }
  }

  const bool truncation = is_cutoff_truncation(law, photons);
  for (double& p : raw) {
    if (p >= 0.0) continue;
    if (truncation) {
      ++table.truncation_clamps;
    } else {
      if (p < -kNegativeRoundingTolerance)
        throw_numerical(fmt::format("{} table: probability {} below the rounding tolerance",
                                    law.label(), p));
      ++table.rounding_clamps;
    }
    p = 0.0;
  }
  if (static_cast<double>(table.rounding_clamps) > kMaxRoundingClampFraction * count)
    throw_numerical(fmt::format("{} table: {} of {} entries clamped, above the {} budget",
                                law.label(), table.rounding_clamps, count,
                                kMaxRoundingClampFraction));

  double mass = 0.0;
  for (double p : raw) mass += p;
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw_numerical(law.label() + " table: collision-free mass is not positive");
  table.cfs_mass = law.kind == LawKind::Uniform ? 1.0 : mass;
  table.probs.resize(count);
  for (std::size_t i = 0; i < count; ++i) table.probs[i] = raw[i] / mass;
  return table;
}

nlohmann::json table_sidecar(const DistributionTable& table, std::uint64_t seed) {
  nlohmann::json j;
  j["m"] = table.m;
  j["n"] = table.n;
  j["law"] = table.law.kind_name();
  j["x_ind"] = table.law.kind == LawKind::FullyDistinguishable ? 0.0
               : table.law.kind == LawKind::Ideal             ? 1.0
                                                               : table.law.x_ind;
  if (table.law.kind == LawKind::Approx) {
    j["n_cutoff"] = table.law.n_cutoff;
  } else {
    j["n_cutoff"] = nullptr;
  }
  j["cfs_mass"] = table.cfs_mass;
  j["seed"] = seed;
  j["input_modes"] = table.input_modes;
  j["conditioned"] = true;
  j["rounding_clamps"] = table.rounding_clamps;
  j["truncation_clamps"] = table.truncation_clamps;
  return j;
}

void write_table(const DistributionTable& table, const std::filesystem::path& csv_path,
                 const std::filesystem::path& json_path, std::uint64_t seed) {
  std::ofstream csv(csv_path);
  if (!csv) throw_io("cannot open " + csv_path.string() + " for writing");
  csv << "pattern,prob\n";
  for (std::size_t i = 0; i < table.size(); ++i)
    csv << table.patterns[i].to_string() << ',' << fmt::format("{}", table.probs[i]) << '\n';
  if (!csv) throw_io("write failed: " + csv_path.string());

  std::ofstream side(json_path);
  if (!side) throw_io("cannot open " + json_path.string() + " for writing");
  side << table_sidecar(table, seed).dump(2) << '\n';
  if (!side) throw_io("write failed: " + json_path.string());
}

}  // namespace bsval
