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
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bsval/distribution.hpp"
#include "bsval/samplers.hpp"
#include "bsval/validation.hpp"

namespace bsval {

/// Fully resolved run configuration. Every field has a default; a JSON
/// object with any subset of the keys overrides them.
struct ExperimentConfig {
  int m = 16;
  int n = 4;
  int k = 100;
  std::uint64_t seed = 1;

  ProbabilityLaw bona_fide = ProbabilityLaw::ideal();
  SamplingMethod bona_fide_method = SamplingMethod::Exact;
  std::size_t bona_fide_events = 1000;

  std::vector<double> test_grid = {0.0, 0.2, 0.4, 0.6, 0.8, 0.947, 1.0};
  double threshold_x = 0.947;
  std::size_t pool_size = 100000;
  std::size_t events_per_trial = 1000;
  std::size_t trials = 5000;
  McmcConfig mcmc;  // seed is derived, the stored value is ignored

  Chi2Formula chi2_formula = Chi2Formula::Standard;
  GaussianMethod gaussian_method = GaussianMethod::Moments;
  int max_iter = 300;
  double tol = 1e-6;

  std::vector<int> input_modes;  // empty: {0, ..., n-1}
  std::string matrix_path;       // empty: Haar draw from the matrix sub-seed
  int threads = 1;

  std::vector<int> k_list = {30, 50, 100, 120, 150};
  std::vector<int> cutoff_list;  // empty: {n, n-1, n-2}
  std::vector<double> analysis_grid;  // empty: 0, 0.05, ..., 1 plus threshold_x

  // Single-stage commands (table, sample).
  ProbabilityLaw law = ProbabilityLaw::ideal();
  SamplingMethod method = SamplingMethod::Mcmc;
  std::size_t count = 100000;
  std::string events_path;  // clusters: fit these events instead of sampling
};

/// Applies overrides to the defaults, fills derived defaults and validates.
/// Throws a config error on unknown keys, bad types or violated bounds.
ExperimentConfig resolve_config(const nlohmann::json& overrides);

nlohmann::json config_to_json(const ExperimentConfig& config);

/// Named sub-seeds of the master seed.
struct StageSeeds {
  std::uint64_t matrix;
  std::uint64_t mcmc;
  std::uint64_t bona_fide;
  std::uint64_t clustering;
  std::uint64_t trials;
};
StageSeeds stage_seeds(std::uint64_t master);

/// Sub-seed for the pool (or trials) belonging to one indistinguishability.
std::uint64_t grid_seed(std::uint64_t stage_seed, double x_ind);

const std::vector<std::string>& command_names();

/// Runs one command and writes its report directory (manifest.json,
/// summary.json and the data files). Returns the summary.
nlohmann::json run_command(std::string_view command, const ExperimentConfig& config,
                           const std::filesystem::path& out_dir);

nlohmann::json cmd_matrix(const ExperimentConfig& config, const std::filesystem::path& out_dir);
nlohmann::json cmd_table(const ExperimentConfig& config, const std::filesystem::path& out_dir);
nlohmann::json cmd_sample(const ExperimentConfig& config, const std::filesystem::path& out_dir);
nlohmann::json cmd_clusters(const ExperimentConfig& config, const std::filesystem::path& out_dir);
nlohmann::json cmd_figure1(const ExperimentConfig& config, const std::filesystem::path& out_dir);
nlohmann::json cmd_ksweep(const ExperimentConfig& config, const std::filesystem::path& out_dir);
nlohmann::json cmd_bonafide_sweep(const ExperimentConfig& config,
                                  const std::filesystem::path& out_dir);
nlohmann::json cmd_bayes(const ExperimentConfig& config, const std::filesystem::path& out_dir);
nlohmann::json cmd_analysis(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace bsval
