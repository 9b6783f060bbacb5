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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsval/linalg.hpp"
#include "bsval/pattern.hpp"

namespace bsval {

enum class LawKind {
  Ideal,
  Partial,
  Approx,
  Uniform,
  FullyDistinguishable,
};

/// Output-probability law used to fill a DistributionTable.
struct ProbabilityLaw {
  LawKind kind = LawKind::Ideal;
  double x_ind = 1.0;
  int n_cutoff = -1;  // Approx only

  static ProbabilityLaw ideal() { return {LawKind::Ideal, 1.0, -1}; }
  static ProbabilityLaw partial(double x) { return {LawKind::Partial, x, -1}; }
  static ProbabilityLaw approx(double x, int cutoff) { return {LawKind::Approx, x, cutoff}; }
  static ProbabilityLaw uniform() { return {LawKind::Uniform, 0.0, -1}; }
  static ProbabilityLaw fully_distinguishable() { return {LawKind::FullyDistinguishable, 0.0, -1}; }

  /// "ideal", "partial x=0.947", "approx x=1 cutoff=3", ...
  std::string label() const;
  /// "ideal", "partial", "approx", "uniform", "fully-distinguishable".
  std::string kind_name() const;

  bool operator==(const ProbabilityLaw&) const = default;
};

nlohmann::json law_to_json(const ProbabilityLaw& law);
/// Accepts {"kind": ..., "x_ind": ..., "n_cutoff": ...}; throws a config error.
ProbabilityLaw law_from_json(const nlohmann::json& j);

/// Exhaustive enumeration bound on C(m, n).
inline constexpr std::uint64_t kMaxTableSize = 1'000'000;

/// Fraction of entries allowed to be rounding-clamped before the table is
/// rejected as a kernel failure.
inline constexpr double kMaxRoundingClampFraction = 1e-3;

/// Rounding noise tolerated below zero for exact laws.
inline constexpr double kNegativeRoundingTolerance = 1e-12;

/// Probabilities of every collision-free pattern under one law,
/// conditioned on the collision-free sector.
struct DistributionTable {
  int m = 0;
  int n = 0;
  ProbabilityLaw law;
  std::vector<int> input_modes;
  std::vector<OutputPattern> patterns;  // lexicographic
  std::vector<double> probs;            // sums to 1
  double cfs_mass = 0.0;                // sum before conditioning
  std::size_t rounding_clamps = 0;      // exact laws: tiny negatives set to 0
  std::size_t truncation_clamps = 0;    // cutoff laws: negative truncations set to 0

  std::size_t size() const { return probs.size(); }
  std::size_t index_of(const OutputPattern& pattern) const;
  /// Probability before conditioning, probs[i] * cfs_mass.
  double unconditioned(std::size_t i) const { return probs[i] * cfs_mass; }
};

struct TableOptions {
  /// Occupied input modes; defaults to {0, ..., n-1}.
  std::optional<std::vector<int>> input_modes;
  int threads = 1;
};

/// Builds the conditioned table. Throws a numerical error when the clamp
/// budget is breached or the collision-free mass vanishes.
DistributionTable build_distribution(const UnitaryMatrix& u, int photons, const ProbabilityLaw& law,
                                     const TableOptions& options = {});

/// CSV `pattern,prob` plus a JSON sidecar carrying the provenance.
void write_table(const DistributionTable& table, const std::filesystem::path& csv_path,
                 const std::filesystem::path& json_path, std::uint64_t seed);

nlohmann::json table_sidecar(const DistributionTable& table, std::uint64_t seed);

}  // namespace bsval
