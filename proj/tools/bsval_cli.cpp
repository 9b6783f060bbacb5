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

// Command-line runner for the bsval experiments. Every subcommand resolves a
// JSON configuration (file, then flags) and writes a report directory.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bsval/bsval.h"

namespace {

using nlohmann::json;

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<int> threads;
  bool chi2_verbatim = false;
  std::optional<int> m, n, k, max_iter;
  std::optional<long long> trials, events_per_trial, pool_size, bona_fide_events, count;
  std::optional<long long> burn_in, thinning;
  std::optional<double> x_ind, threshold_x;
  std::optional<int> cutoff;
  std::optional<std::string> law, bona_fide, method, bona_fide_method, gaussian, matrix, events;
  std::vector<double> test_grid, analysis_grid;
  std::vector<int> k_list, cutoff_list, input_modes;
};

void add_flags(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config_path, "JSON configuration file");
  sub.add_option("--seed", f.seed, "master seed");
  sub.add_option("--out", f.out_dir, "report directory")->required();
  sub.add_option("--threads", f.threads, "worker threads (1 = sequential)");
  sub.add_flag("--chi2-verbatim", f.chi2_verbatim, "normalise expected counts by k as printed");
  sub.add_option("-m,--modes", f.m, "number of modes");
  sub.add_option("-n,--photons", f.n, "number of photons");
  sub.add_option("-k,--clusters", f.k, "number of clusters");
  sub.add_option("--max-iter", f.max_iter, "k-means iteration cap");
  sub.add_option("--trials", f.trials, "chi2 trials per grid point");
  sub.add_option("--events-per-trial", f.events_per_trial, "test events per trial");
  sub.add_option("--pool-size", f.pool_size, "MCMC pool size per grid point");
  sub.add_option("--bona-fide-events", f.bona_fide_events, "bona fide training events");
  sub.add_option("--count", f.count, "events to draw (sample)");
  sub.add_option("--burn-in", f.burn_in, "MCMC burn-in steps");
  sub.add_option("--thinning", f.thinning, "MCMC thinning interval");
  sub.add_option("--x-ind", f.x_ind, "indistinguishability for table/sample laws");
  sub.add_option("--cutoff", f.cutoff, "n_cutoff for approx laws");
  sub.add_option("--threshold-x", f.threshold_x, "threshold x_ind");
  sub.add_option("--law", f.law, "ideal|partial|approx|uniform|fully-distinguishable");
  sub.add_option("--bona-fide", f.bona_fide, "bona fide law (same names as --law)");
  sub.add_option("--method", f.method, "exact|mcmc (sample)");
  sub.add_option("--bona-fide-method", f.bona_fide_method, "exact|mcmc");
  sub.add_option("--gaussian", f.gaussian, "moments|histogram-lsq");
  sub.add_option("--matrix", f.matrix, "unitary JSON file instead of a Haar draw");
  sub.add_option("--events", f.events, "events CSV for clusters");
  sub.add_option("--test-grid", f.test_grid, "x_ind grid")->delimiter(',');
  sub.add_option("--analysis-grid", f.analysis_grid, "x_ind grid for analysis")->delimiter(',');
  sub.add_option("--k-list", f.k_list, "cluster counts for ksweep")->delimiter(',');
  sub.add_option("--cutoff-list", f.cutoff_list, "cutoffs for bonafide-sweep")->delimiter(',');
  sub.add_option("--input-modes", f.input_modes, "occupied input modes")->delimiter(',');
}

json law_json(const std::string& name, std::optional<double> x, std::optional<int> cutoff) {
  json j{{"kind", name}};
  if (x) j["x_ind"] = *x;
  if (cutoff) j["n_cutoff"] = *cutoff;
  return j;
}

json merge_config(const Flags& f) {
  json c = json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw CLI::ValidationError("--config", "cannot read " + f.config_path);
    try {
      c = json::parse(in);
    } catch (const json::parse_error& e) {
      throw CLI::ValidationError("--config", e.what());
    }
  }
  const auto set = [&c](const char* key, const auto& v) {
    if (v) c[key] = *v;
  };
  set("seed", f.seed);
  set("threads", f.threads);
  set("m", f.m);
  set("n", f.n);
  set("k", f.k);
  set("max_iter", f.max_iter);
  set("trials", f.trials);
  set("events_per_trial", f.events_per_trial);
  set("pool_size", f.pool_size);
  set("bona_fide_events", f.bona_fide_events);
  set("count", f.count);
  set("threshold_x", f.threshold_x);
  set("method", f.method);
  set("bona_fide_method", f.bona_fide_method);
  set("gaussian_method", f.gaussian);
  set("matrix_path", f.matrix);
  set("events_path", f.events);
  if (f.burn_in) c["mcmc"]["burn_in"] = *f.burn_in;
  if (f.thinning) c["mcmc"]["thinning"] = *f.thinning;
  if (f.chi2_verbatim) c["chi2_formula"] = "verbatim-eq6";
  if (f.law) c["law"] = law_json(*f.law, f.x_ind, f.cutoff);
  if (f.bona_fide) c["bona_fide"] = law_json(*f.bona_fide, f.x_ind, f.cutoff);
  if (!f.test_grid.empty()) c["test_grid"] = f.test_grid;
  if (!f.analysis_grid.empty()) c["analysis_grid"] = f.analysis_grid;
  if (!f.k_list.empty()) c["k_list"] = f.k_list;
  if (!f.cutoff_list.empty()) c["cutoff_list"] = f.cutoff_list;
  if (!f.input_modes.empty()) c["input_modes"] = f.input_modes;
  return c;
}

int exit_code(bsv_status status) {
  switch (status) {
    case BSV_OK: return 0;
    case BSV_ERR_CONFIG:
    case BSV_ERR_INVALID_ARGUMENT: return 2;
    case BSV_ERR_NUMERICAL: return 3;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bsval: cluster-based validation of boson samplers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bsv_version()));

  Flags flags;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"matrix", "write a Haar random unitary"},
      {"table", "tabulate a collision-free output distribution"},
      {"sample", "draw events from a distribution"},
      {"clusters", "fit k-means++ clusters to bona fide events"},
      {"figure1", "chi2 centers and Bayesian slopes against x_ind"},
      {"ksweep", "r1 and r2 against the cluster count"},
      {"bonafide-sweep", "r1 and r2 for several bona fide samplers"},
      {"bayes", "cumulative Bayesian log-odds against x_ind"},
      {"analysis", "probability structure of the output distribution"},
  };
  for (const auto& [name, help] : commands) add_flags(*app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string config;
  try {
    config = merge_config(flags).dump();
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  bsv_report* report = nullptr;
  const bsv_status status =
      bsv_run_command(command.c_str(), config.c_str(), flags.out_dir.c_str(), &report);
  if (status != BSV_OK) {
    std::cerr << "error: " << bsv_last_error() << '\n';
    return exit_code(status);
  }
  std::cout << bsv_report_summary(report) << '\n';
  bsv_report_free(report);
  return 0;
}
