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

#include "bsval/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>

#include <fmt/format.h>

#include "bsval/analysis.hpp"
#include "bsval/clustering.hpp"
#include "bsval/error.hpp"
#include "bsval/linalg.hpp"
#include "bsval/model.hpp"
#include "bsval/parallel.hpp"
#include "bsval/rng.hpp"

namespace bsval {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "m",          "n",           "k",              "seed",
      "bona_fide",  "bona_fide_method", "bona_fide_events", "test_grid",
      "threshold_x", "pool_size",  "events_per_trial", "trials",
      "mcmc",       "chi2_formula", "gaussian_method", "max_iter",
      "tol",        "input_modes", "matrix_path",    "threads",
      "k_list",     "cutoff_list", "analysis_grid",  "law",
      "method",     "count",       "events_path"};
  return keys;
}

SamplingMethod method_from_name(const std::string& name) {
  if (name == "exact") return SamplingMethod::Exact;
  if (name == "mcmc") return SamplingMethod::Mcmc;
  throw_config("unknown sampling method '" + name + "'");
}

template <class T>
void read_positive(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  const auto v = j.at(key).get<long long>();
  if (v < 1) throw_config(fmt::format("'{}' must be >= 1, got {}", key, v));
  field = static_cast<T>(v);
}

void validate(const ExperimentConfig& c) {
  if (c.n < 1 || c.m < 1 || c.n > c.m)
    throw_config(fmt::format("need 1 <= n <= m, got n = {}, m = {}", c.n, c.m));
  if (binomial(c.m, c.n) > kMaxTableSize)
    throw_config(fmt::format("C({}, {}) = {} exceeds the enumeration bound {}", c.m, c.n,
                             binomial(c.m, c.n), kMaxTableSize));
  if (c.k < 1) throw_config("'k' must be >= 1");
  if (c.threads < 1) throw_config("'threads' must be >= 1");
  if (c.mcmc.thinning < 1) throw_config("'mcmc.thinning' must be >= 1");
  if (c.max_iter < 1) throw_config("'max_iter' must be >= 1");
  if (!(c.tol > 0.0)) throw_config("'tol' must be positive");
  const auto check_grid = [](const std::vector<double>& grid, const char* name) {
    if (grid.empty()) throw_config(fmt::format("'{}' must not be empty", name));
    for (double x : grid)
      if (!(x >= 0.0 && x <= 1.0)) throw_config(fmt::format("'{}' value {} outside [0, 1]", name, x));
  };
  check_grid(c.test_grid, "test_grid");
  check_grid(c.analysis_grid, "analysis_grid");
  if (!(c.threshold_x >= 0.0 && c.threshold_x <= 1.0)) throw_config("'threshold_x' outside [0, 1]");
  for (int k : c.k_list)
    if (k < 1) throw_config("'k_list' entries must be >= 1");
  for (int cutoff : c.cutoff_list)
    if (cutoff < 0 || cutoff > c.n)
      throw_config(fmt::format("'cutoff_list' entry {} outside [0, n = {}]", cutoff, c.n));
  if (c.bona_fide.kind == LawKind::Approx && (c.bona_fide.n_cutoff < 0 || c.bona_fide.n_cutoff > c.n))
    throw_config("bona fide cutoff outside [0, n]");
  if (c.law.kind == LawKind::Approx && (c.law.n_cutoff < 0 || c.law.n_cutoff > c.n))
    throw_config("law cutoff outside [0, n]");
  if (!c.input_modes.empty()) {
    if (static_cast<int>(c.input_modes.size()) != c.n)
      throw_config("'input_modes' must list exactly n modes");
    try {
      OutputPattern(c.input_modes, c.m);
    } catch (const Error& e) {
      throw_config(std::string("'input_modes': ") + e.what());
    }
  }
}

}  // namespace

ExperimentConfig resolve_config(const json& overrides) {
  ExperimentConfig c;
  if (overrides.is_null()) {
    // defaults only
  } else if (!overrides.is_object()) {
    throw_config("configuration must be a JSON object");
  }
  try {
    const json& j = overrides.is_object() ? overrides : json::object();
    for (const auto& [key, value] : j.items())
      if (!known_keys().contains(key)) throw_config("unknown configuration key '" + key + "'");

    if (j.contains("m")) c.m = j.at("m").get<int>();
    if (j.contains("n")) c.n = j.at("n").get<int>();
    if (j.contains("k")) c.k = j.at("k").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("bona_fide")) c.bona_fide = law_from_json(j.at("bona_fide"));
    if (j.contains("bona_fide_method"))
      c.bona_fide_method = method_from_name(j.at("bona_fide_method").get<std::string>());
    read_positive(j, "bona_fide_events", c.bona_fide_events);
    if (j.contains("test_grid")) c.test_grid = j.at("test_grid").get<std::vector<double>>();
    if (j.contains("threshold_x")) c.threshold_x = j.at("threshold_x").get<double>();
    read_positive(j, "pool_size", c.pool_size);
    read_positive(j, "events_per_trial", c.events_per_trial);
    read_positive(j, "trials", c.trials);
    if (j.contains("mcmc")) {
      const json& mc = j.at("mcmc");
      for (const auto& [key, value] : mc.items())
        if (key != "burn_in" && key != "thinning")
          throw_config("unknown configuration key 'mcmc." + key + "'");
      if (mc.contains("burn_in")) {
        const auto v = mc.at("burn_in").get<long long>();
        if (v < 0) throw_config("'mcmc.burn_in' must be >= 0");
        c.mcmc.burn_in = static_cast<std::size_t>(v);
      }
      read_positive(mc, "thinning", c.mcmc.thinning);
    }
    if (j.contains("chi2_formula"))
      c.chi2_formula = chi2_formula_from_name(j.at("chi2_formula").get<std::string>());
    if (j.contains("gaussian_method"))
      c.gaussian_method = gaussian_method_from_name(j.at("gaussian_method").get<std::string>());
    if (j.contains("max_iter")) c.max_iter = j.at("max_iter").get<int>();
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("input_modes")) c.input_modes = j.at("input_modes").get<std::vector<int>>();
    if (j.contains("matrix_path")) c.matrix_path = j.at("matrix_path").get<std::string>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    if (j.contains("k_list")) c.k_list = j.at("k_list").get<std::vector<int>>();
    if (j.contains("cutoff_list")) c.cutoff_list = j.at("cutoff_list").get<std::vector<int>>();
    if (j.contains("analysis_grid"))
      c.analysis_grid = j.at("analysis_grid").get<std::vector<double>>();
    if (j.contains("law")) c.law = law_from_json(j.at("law"));
    if (j.contains("method")) c.method = method_from_name(j.at("method").get<std::string>());
    read_positive(j, "count", c.count);
    if (j.contains("events_path")) c.events_path = j.at("events_path").get<std::string>();
  } catch (const json::exception& e) {
    throw_config(std::string("configuration: ") + e.what());
  }

  if (c.cutoff_list.empty())
    for (int cutoff = c.n; cutoff >= std::max(0, c.n - 2); --cutoff) c.cutoff_list.push_back(cutoff);
  if (c.analysis_grid.empty()) {
    for (int i = 0; i <= 20; ++i) c.analysis_grid.push_back(i / 20.0);
    c.analysis_grid.push_back(c.threshold_x);
    std::sort(c.analysis_grid.begin(), c.analysis_grid.end());
    c.analysis_grid.erase(std::unique(c.analysis_grid.begin(), c.analysis_grid.end()),
                          c.analysis_grid.end());
  }
  validate(c);
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["m"] = c.m;
  j["n"] = c.n;
  j["k"] = c.k;
  j["seed"] = c.seed;
  j["bona_fide"] = law_to_json(c.bona_fide);
  j["bona_fide_method"] = method_name(c.bona_fide_method);
  j["bona_fide_events"] = c.bona_fide_events;
  j["test_grid"] = c.test_grid;
  j["threshold_x"] = c.threshold_x;
  j["pool_size"] = c.pool_size;
  j["events_per_trial"] = c.events_per_trial;
  j["trials"] = c.trials;
  j["mcmc"] = {{"burn_in", c.mcmc.burn_in}, {"thinning", c.mcmc.thinning}};
  j["chi2_formula"] = chi2_formula_name(c.chi2_formula);
  j["gaussian_method"] = gaussian_method_name(c.gaussian_method);
  j["max_iter"] = c.max_iter;
  j["tol"] = c.tol;
  j["input_modes"] = c.input_modes;
  j["matrix_path"] = c.matrix_path;
  j["threads"] = c.threads;
  j["k_list"] = c.k_list;
  j["cutoff_list"] = c.cutoff_list;
  j["analysis_grid"] = c.analysis_grid;
  j["law"] = law_to_json(c.law);
  j["method"] = method_name(c.method);
  j["count"] = c.count;
  j["events_path"] = c.events_path;
  return j;
}

StageSeeds stage_seeds(std::uint64_t master) {
  return {derive_seed(master, "matrix"), derive_seed(master, "mcmc"),
          derive_seed(master, "bona-fide"), derive_seed(master, "clustering"),
          derive_seed(master, "trials")};
}

std::uint64_t grid_seed(std::uint64_t stage_seed, double x_ind) {
  return derive_seed(stage_seed, std::bit_cast<std::uint64_t>(x_ind));
}

// ---------------------------------------------------------------------------
// Shared pipeline pieces

namespace {

std::string num(double v) { return fmt::format("{}", v); }

/// Report directory: data files plus manifest.json and summary.json.
class Report {
 public:
  Report(std::string command, const ExperimentConfig& config, fs::path dir)
      : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw_io("cannot create report directory " + dir_.string() + ": " + ec.message());
    manifest_["command"] = std::move(command);
    manifest_["tool"] = "bsval 0.1.0";
    manifest_["config"] = config_to_json(config);
    manifest_["files"] = json::array();
    manifest_["notes"] = json::array();
  }

  void note(const std::string& text) { manifest_["notes"].push_back(text); }

  std::ofstream open(const std::string& name, const std::string& description) {
    std::ofstream out(dir_ / name);
    if (!out) throw_io("cannot open " + (dir_ / name).string() + " for writing");
    manifest_["files"].push_back({{"name", name}, {"description", description}});
    return out;
  }

  void write_json(const std::string& name, const json& j, const std::string& description) {
    auto out = open(name, description);
    out << j.dump(2) << '\n';
    if (!out) throw_io("write failed: " + (dir_ / name).string());
  }

  void register_file(const std::string& name, const std::string& description) {
    manifest_["files"].push_back({{"name", name}, {"description", description}});
  }

  const fs::path& dir() const { return dir_; }

  json finish(json summary) {
    write_json("summary.json", summary, "numeric results of the run");
    std::ofstream out(dir_ / "manifest.json");
    if (!out) throw_io("cannot write manifest in " + dir_.string());
    out << manifest_.dump(2) << '\n';
    return summary;
  }

 private:
  fs::path dir_;
  json manifest_;
};

void write_curve(Report& report, const std::string& name, const std::string& description,
                 const std::vector<double>& values) {
  auto out = report.open(name, description);
  out << "index,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) out << i + 1 << ',' << num(values[i]) << '\n';
}

void require_interference_scale(const ExperimentConfig& c, const char* what) {
  if (c.n > kMaxInterferencePhotons)
    throw_config(fmt::format("{} needs partially distinguishable tables, limited to n <= {} "
                             "(n! permutation sum); got n = {}",
                             what, kMaxInterferencePhotons, c.n));
}

bool law_needs_interference(const ProbabilityLaw& law) {
  return law.kind == LawKind::Partial || law.kind == LawKind::Approx ||
         law.kind == LawKind::FullyDistinguishable;
}

UnitaryMatrix obtain_matrix(const ExperimentConfig& c, const StageSeeds& seeds) {
  if (c.matrix_path.empty()) return haar_random_unitary(static_cast<std::size_t>(c.m), seeds.matrix);
  UnitaryMatrix u = load_matrix_json(c.matrix_path);
  if (static_cast<int>(u.dim()) != c.m)
    throw_config(fmt::format("matrix file {} has m = {}, configuration has m = {}", c.matrix_path,
                             u.dim(), c.m));
  return u;
}

TableOptions table_options(const ExperimentConfig& c, int threads) {
  TableOptions options;
  if (!c.input_modes.empty()) options.input_modes = c.input_modes;
  options.threads = threads;
  return options;
}

struct GridPool {
  double x_ind = 0.0;
  DistributionTable table;
  EventSet pool;
};

std::vector<GridPool> build_pools(const UnitaryMatrix& u, const ExperimentConfig& c,
                                  const StageSeeds& seeds, const std::vector<double>& xs) {
  std::vector<GridPool> pools(xs.size());
  parallel_for(xs.size(), c.threads, [&](std::size_t i) {
    GridPool& gp = pools[i];
    gp.x_ind = xs[i];
    gp.table = build_distribution(u, c.n, ProbabilityLaw::partial(xs[i]), table_options(c, 1));
    McmcConfig mc = c.mcmc;
    mc.seed = grid_seed(seeds.mcmc, xs[i]);
    gp.pool = sample_mcmc(gp.table, c.pool_size, mc);
  });
  return pools;
}

struct BonaFide {
  DistributionTable table;
  EventSet events;
};

BonaFide make_bona_fide(const UnitaryMatrix& u, const ExperimentConfig& c, const StageSeeds& seeds,
                        const ProbabilityLaw& law, int threads) {
  BonaFide bf;
  bf.table = build_distribution(u, c.n, law, table_options(c, threads));
  if (c.bona_fide_method == SamplingMethod::Exact) {
    bf.events = sample_exact(bf.table, c.bona_fide_events, seeds.bona_fide);
  } else {
    McmcConfig mc = c.mcmc;
    mc.seed = seeds.bona_fide;
    bf.events = sample_mcmc(bf.table, c.bona_fide_events, mc);
  }
  return bf;
}

ClusterModel fit_clusters(const EventSet& events, int k, const ExperimentConfig& c,
                          const StageSeeds& seeds) {
  return kmeans_fit(events, k, derive_seed(seeds.clustering, static_cast<std::uint64_t>(k)),
                    KMeansOptions{c.max_iter, c.tol});
}

TrialOptions trial_options(const ExperimentConfig& c, const StageSeeds& seeds, double x) {
  TrialOptions t;
  t.events_per_trial = c.events_per_trial;
  t.trials = c.trials;
  t.seed = grid_seed(seeds.trials, x);
  t.formula = c.chi2_formula;
  t.gaussian = c.gaussian_method;
  t.threads = 1;
  return t;
}

std::vector<Chi2Ensemble> run_ensembles(const ClusterModel& model, const std::vector<GridPool>& pools,
                                        const ExperimentConfig& c, const StageSeeds& seeds) {
  const std::vector<int> clusters = assign_all_patterns(model, c.n, c.threads);
  std::vector<Chi2Ensemble> out(pools.size());
  parallel_for(pools.size(), c.threads, [&](std::size_t i) {
    out[i] = chi2_trials(model, clusters, pools[i].pool, trial_options(c, seeds, pools[i].x_ind));
  });
  return out;
}

json ensemble_json(const Chi2Ensemble& e) {
  json j;
  j["x_ind"] = e.x_ind;
  j["trials"] = e.trials;
  if (e.fitted) {
    j["center"] = e.gaussian.center;
    j["fwhm"] = e.gaussian.fwhm;
    j["center_stderr"] = e.gaussian.center_stderr;
    j["method"] = gaussian_method_name(e.gaussian.method);
  } else {
    j["center"] = nullptr;
    j["fwhm"] = nullptr;
    j["fit_error"] = "gaussian fit needs at least 2 trials";
  }
  return j;
}

std::optional<std::size_t> grid_index(const std::vector<double>& xs, double x) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i] == x) return i;
  return std::nullopt;
}

/// r1 / r2 from the ensembles at x = 0, threshold and 1, when present.
json r_metrics(const std::vector<double>& xs, const std::vector<Chi2Ensemble>& ens,
               double threshold) {
  json j;
  const auto i0 = grid_index(xs, 0.0);
  const auto it = grid_index(xs, threshold);
  const auto i1 = grid_index(xs, 1.0);
  if (!i0 || !it || !i1) {
    j["available"] = false;
    j["reason"] = "grid lacks x = 0, the threshold or x = 1";
    return j;
  }
  j["available"] = true;
  if (!ens[*i0].fitted || !ens[*it].fitted || !ens[*i1].fitted) {
    j["degenerate"] = true;
    j["reason"] = "fewer than 2 trials per ensemble";
    return j;
  }
  const double c0 = ens[*i0].gaussian.center;
  const double ct = ens[*it].gaussian.center;
  const double c1 = ens[*i1].gaussian.center;
  const double bt = ens[*it].gaussian.fwhm;
  j["c0"] = c0;
  j["c_threshold"] = ct;
  j["c1"] = c1;
  j["b_threshold"] = bt;
  j["degenerate"] = false;
  try {
    j["r1"] = r1_metric(c0, ct, c1);
  } catch (const Error& e) {
    j["r1"] = nullptr;
    j["degenerate"] = true;
    j["reason"] = e.what();
  }
  try {
    j["r2"] = r2_metric(ct, c1, bt);
  } catch (const Error& e) {
    j["r2"] = nullptr;
    j["degenerate"] = true;
    j["reason"] = e.what();
  }
  return j;
}

/// Expected per-event log-odds under a law q: sum_T q(T) ln(C(m,n) p(T)).
double expected_bayes_slope(const DistributionTable& law, const DistributionTable& ideal) {
  const double log_space = std::log(static_cast<double>(ideal.size()));
  double acc = 0.0;
  for (std::size_t i = 0; i < law.size(); ++i)
    if (law.probs[i] > 0.0 && ideal.probs[i] > 0.0)
      acc += law.probs[i] * (std::log(ideal.probs[i]) + log_space);
  return acc;
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

std::vector<double> with_anchor_points(std::vector<double> xs, double threshold) {
  for (double x : {0.0, threshold, 1.0})
    if (!grid_index(xs, x)) xs.push_back(x);
  std::sort(xs.begin(), xs.end());
  return xs;
}

void common_notes(Report& report, const ExperimentConfig& c) {
  report.note("chi2 formula: " + chi2_formula_name(c.chi2_formula) +
              (c.chi2_formula == Chi2Formula::Standard
                   ? " (E_ij = N_i N_j / N_total; the published /k normalisation is available "
                     "as verbatim-eq6)"
                   : " (E_ij = N_i N_j / k as printed; does not conserve the total count)"));
  report.note("distributions are conditioned on the collision-free sector; input modes " +
              (c.input_modes.empty() ? std::string("{0..n-1}") : std::string("as configured")));
  report.note("trial events are drawn without replacement within a trial, independently "
              "across trials");
  report.note("the bona fide column of each chi2 table is the training member counts");
}

}  // namespace

// ---------------------------------------------------------------------------
// Commands

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"matrix", "table",  "sample",
                                                 "clusters", "figure1", "ksweep",
                                                 "bonafide-sweep", "bayes", "analysis"};
  return names;
}

json cmd_matrix(const ExperimentConfig& c, const fs::path& out_dir) {
  const StageSeeds seeds = stage_seeds(c.seed);
  Report report("matrix", c, out_dir);
  const UnitaryMatrix u = obtain_matrix(c, seeds);
  save_matrix_json(u, report.dir() / "matrix.json");
  report.register_file("matrix.json", "interferometer unitary (m, re, im)");
  json summary;
  summary["command"] = "matrix";
  summary["m"] = u.dim();
  summary["matrix_seed"] = seeds.matrix;
  summary["unitarity_residual"] = unitarity_residual(u.matrix());
  return report.finish(summary);
}

json cmd_table(const ExperimentConfig& c, const fs::path& out_dir) {
  if (law_needs_interference(c.law)) require_interference_scale(c, "table");
  const StageSeeds seeds = stage_seeds(c.seed);
  Report report("table", c, out_dir);
  const UnitaryMatrix u = obtain_matrix(c, seeds);
  const DistributionTable table = build_distribution(u, c.n, c.law, table_options(c, c.threads));
  write_table(table, report.dir() / "table.csv", report.dir() / "table.json", c.seed);
  report.register_file("table.csv", "pattern,prob over all collision-free patterns");
  report.register_file("table.json", "table provenance sidecar");
  report.note("distributions are conditioned on the collision-free sector");
  json summary = table_sidecar(table, c.seed);
  summary["command"] = "table";
  summary["size"] = table.size();
  return report.finish(summary);
}

json cmd_sample(const ExperimentConfig& c, const fs::path& out_dir) {
  if (law_needs_interference(c.law)) require_interference_scale(c, "sample");
  const StageSeeds seeds = stage_seeds(c.seed);
  Report report("sample", c, out_dir);
  const UnitaryMatrix u = obtain_matrix(c, seeds);
  const DistributionTable table = build_distribution(u, c.n, c.law, table_options(c, c.threads));
  EventSet events;
  if (c.method == SamplingMethod::Exact) {
    events = sample_exact(table, c.count, seeds.mcmc);
  } else {
    McmcConfig mc = c.mcmc;
    mc.seed = seeds.mcmc;
    events = sample_mcmc(table, c.count, mc);
  }
  write_events(events, report.dir() / "events.csv", report.dir() / "events.json");
  report.register_file("events.csv", "event_index,pattern");
  report.register_file("events.json", "event provenance sidecar");

  std::vector<double> empirical(table.size(), 0.0);
  for (std::uint32_t idx : events.indices) empirical[idx] += 1.0;
  for (double& v : empirical) v /= static_cast<double>(events.size());
  json summary = events_sidecar(events);
  summary["command"] = "sample";
  summary["tvd_to_table"] = total_variation_distance(empirical, table.probs);
  return report.finish(summary);
}

json cmd_clusters(const ExperimentConfig& c, const fs::path& out_dir) {
  if (law_needs_interference(c.bona_fide)) require_interference_scale(c, "clusters");
  const StageSeeds seeds = stage_seeds(c.seed);
  Report report("clusters", c, out_dir);
  EventSet events;
  if (!c.events_path.empty()) {
    events = read_events_csv(c.events_path, c.m, c.n);
  } else {
    const UnitaryMatrix u = obtain_matrix(c, seeds);
    events = make_bona_fide(u, c, seeds, c.bona_fide, c.threads).events;
  }
  const ClusterModel model = fit_clusters(events, c.k, c, seeds);
  report.write_json("clusters.json", cluster_model_to_json(model), "fitted k-means++ cluster model");
  {
    auto out = report.open("cumulative_members.csv",
                           "training events per cluster, sorted ascending and accumulated");
    out << "index,value\n";
    const auto cum = cumulative_member_counts(model);
    for (std::size_t i = 0; i < cum.size(); ++i) out << i + 1 << ',' << cum[i] << '\n';
  }
  json summary;
  summary["command"] = "clusters";
  summary["k"] = model.k;
  summary["training_events"] = model.training_size();
  summary["iterations_used"] = model.iterations_used;
  summary["wcss_initial"] = model.wcss_history.front();
  summary["wcss_final"] = model.wcss_history.back();
  return report.finish(summary);
}

json cmd_figure1(const ExperimentConfig& c, const fs::path& out_dir) {
  require_interference_scale(c, "figure1");
  const StageSeeds seeds = stage_seeds(c.seed);
  Report report("figure1", c, out_dir);
  common_notes(report, c);
  const UnitaryMatrix u = obtain_matrix(c, seeds);

  const BonaFide bf = make_bona_fide(u, c, seeds, c.bona_fide, c.threads);
  const ClusterModel model = fit_clusters(bf.events, c.k, c, seeds);
  const DistributionTable ideal = build_distribution(u, c.n, ProbabilityLaw::ideal(),
                                                     table_options(c, c.threads));
  const std::vector<GridPool> pools = build_pools(u, c, seeds, c.test_grid);
  const std::vector<Chi2Ensemble> ens = run_ensembles(model, pools, c, seeds);

  std::vector<BayesianTrace> traces(pools.size());
  parallel_for(pools.size(), c.threads,
               [&](std::size_t i) { traces[i] = bayesian_lnx(pools[i].pool, ideal); });

  json grid = json::array();
  std::vector<double> centers, slopes;
  for (std::size_t i = 0; i < pools.size(); ++i) {
    {
      auto out = report.open(fmt::format("chi2_x{}.csv", num(pools[i].x_ind)),
                             "chi2 value per trial at x_ind = " + num(pools[i].x_ind));
      out << "trial_index,chi2\n";
      for (std::size_t t = 0; t < ens[i].values.size(); ++t)
        out << t << ',' << num(ens[i].values[t]) << '\n';
    }
    json row = ensemble_json(ens[i]);
    row["k"] = model.k;
    row["seed"] = trial_options(c, seeds, pools[i].x_ind).seed;
    row["chi2_formula"] = chi2_formula_name(c.chi2_formula);
    row["bayes_slope"] = traces[i].slope;
    row["bayes_expected_slope"] = expected_bayes_slope(pools[i].table, ideal);
    row["pool_acceptance_rate"] = pools[i].pool.acceptance_rate;
    grid.push_back(row);
    if (ens[i].fitted) centers.push_back(ens[i].gaussian.center);
    slopes.push_back(traces[i].slope);
  }
  {
    auto out = report.open("centers.csv", "Gaussian center and FWHM against x_ind");
    out << "x_ind,center,fwhm,center_stderr,bayes_slope\n";
    for (std::size_t i = 0; i < pools.size(); ++i) {
      if (!ens[i].fitted) continue;
      out << num(pools[i].x_ind) << ',' << num(ens[i].gaussian.center) << ','
          << num(ens[i].gaussian.fwhm) << ',' << num(ens[i].gaussian.center_stderr) << ','
          << num(traces[i].slope) << '\n';
    }
  }

  json summary;
  summary["command"] = "figure1";
  summary["bona_fide"] = bf.table.law.label();
  summary["chi2_formula"] = chi2_formula_name(c.chi2_formula);
  summary["k"] = model.k;
  summary["grid"] = grid;
  if (const auto it = grid_index(c.test_grid, c.threshold_x); it && ens[*it].fitted) {
    summary["threshold"] = {{"x_ind", c.threshold_x},
                            {"center", ens[*it].gaussian.center},
                            {"fwhm", ens[*it].gaussian.fwhm},
                            {"center_stderr", ens[*it].gaussian.center_stderr},
                            {"bayes_slope", traces[*it].slope}};
  }
  summary["r_metrics"] = r_metrics(c.test_grid, ens, c.threshold_x);
  summary["centers_increasing"] = centers.size() == pools.size() && strictly_increasing(centers);
  summary["bayes_slopes_increasing"] = strictly_increasing(slopes);
  return report.finish(summary);
}

json cmd_ksweep(const ExperimentConfig& c, const fs::path& out_dir) {
  require_interference_scale(c, "ksweep");
  const StageSeeds seeds = stage_seeds(c.seed);
  Report report("ksweep", c, out_dir);
  common_notes(report, c);
  const UnitaryMatrix u = obtain_matrix(c, seeds);
  const BonaFide bf = make_bona_fide(u, c, seeds, c.bona_fide, c.threads);
  const std::vector<double> xs = {0.0, c.threshold_x, 1.0};
  const std::vector<GridPool> pools = build_pools(u, c, seeds, xs);

  json rows = json::array();
  auto table_out = report.open("ksweep.csv", "r1 and r2 against k");
  table_out << "k,r1,r2,c0,c_threshold,c1,b_threshold\n";
  for (int k : c.k_list) {
    const ClusterModel model = fit_clusters(bf.events, k, c, seeds);
    const std::vector<Chi2Ensemble> ens = run_ensembles(model, pools, c, seeds);
    json r = r_metrics(xs, ens, c.threshold_x);
    r["k"] = k;
    const auto cum = cumulative_member_counts(model);
    r["cumulative_members_final"] = cum.back();
    rows.push_back(r);
    const auto field = [&](const char* key) {
      return r.contains(key) && !r[key].is_null() ? num(r[key].get<double>()) : std::string();
    };
    table_out << k << ',' << field("r1") << ',' << field("r2") << ',' << field("c0") << ','
              << field("c_threshold") << ',' << field("c1") << ',' << field("b_threshold") << '\n';

    auto out = report.open(fmt::format("cumulative_members_k{}.csv", k),
                           "sorted cumulative training events per cluster for k = " +
                               std::to_string(k));
    out << "index,value\n";
    for (std::size_t i = 0; i < cum.size(); ++i) out << i + 1 << ',' << cum[i] << '\n';
  }
  json summary;
  summary["command"] = "ksweep";
  summary["bona_fide"] = bf.table.law.label();
  summary["rows"] = rows;
  return report.finish(summary);
}

json cmd_bonafide_sweep(const ExperimentConfig& c, const fs::path& out_dir) {
  require_interference_scale(c, "bonafide-sweep");
  const StageSeeds seeds = stage_seeds(c.seed);
  Report report("bonafide-sweep", c, out_dir);
  common_notes(report, c);
  report.note("bona fide events for every law share one sampling seed (coupled draws)");
  const UnitaryMatrix u = obtain_matrix(c, seeds);
  const std::vector<double> xs = with_anchor_points(c.test_grid, c.threshold_x);
  const std::vector<GridPool> pools = build_pools(u, c, seeds, xs);

  const double bf_x = c.bona_fide.kind == LawKind::Approx ? c.bona_fide.x_ind : 1.0;
  std::vector<ProbabilityLaw> laws = {ProbabilityLaw::ideal()};
  for (int cutoff : c.cutoff_list) laws.push_back(ProbabilityLaw::approx(bf_x, cutoff));
  laws.push_back(ProbabilityLaw::uniform());
  laws.push_back(ProbabilityLaw::fully_distinguishable());

  json rows = json::array();
  auto table_out = report.open("bonafide.csv", "r1 and r2 for each bona fide law");
  table_out << "law,n_cutoff,r1,r2,c0,c_threshold,c1,b_threshold\n";
  for (const ProbabilityLaw& law : laws) {
    const BonaFide bf = make_bona_fide(u, c, seeds, law, c.threads);
    const ClusterModel model = fit_clusters(bf.events, c.k, c, seeds);
    const std::vector<Chi2Ensemble> ens = run_ensembles(model, pools, c, seeds);
    json r = r_metrics(xs, ens, c.threshold_x);
    r["law"] = law.label();
    r["kind"] = law.kind_name();
    r["n_cutoff"] = law.kind == LawKind::Approx ? json(law.n_cutoff) : json(nullptr);
    r["truncation_clamps"] = bf.table.truncation_clamps;
    json centers = json::array();
    for (const auto& e : ens) centers.push_back(ensemble_json(e));
    r["centers"] = centers;
    rows.push_back(r);

    const auto field = [&](const char* key) {
      return r.contains(key) && !r[key].is_null() ? num(r[key].get<double>()) : std::string();
    };
    table_out << '"' << law.label() << "\","
              << (law.kind == LawKind::Approx ? std::to_string(law.n_cutoff) : std::string())
              << ',' << field("r1") << ',' << field("r2") << ',' << field("c0") << ','
              << field("c_threshold") << ',' << field("c1") << ',' << field("b_threshold") << '\n';

    std::string slug = law.kind_name();
    if (law.kind == LawKind::Approx) slug += fmt::format("_cutoff{}", law.n_cutoff);
    auto out = report.open("centers_" + slug + ".csv", "Gaussian centers for bona fide " + law.label());
    out << "x_ind,center,fwhm,center_stderr\n";
    for (std::size_t i = 0; i < ens.size(); ++i) {
      if (!ens[i].fitted) continue;
      out << num(xs[i]) << ',' << num(ens[i].gaussian.center) << ',' << num(ens[i].gaussian.fwhm)
          << ',' << num(ens[i].gaussian.center_stderr) << '\n';
    }
  }
  json summary;
  summary["command"] = "bonafide-sweep";
  summary["grid"] = xs;
  summary["rows"] = rows;
  return report.finish(summary);
}

json cmd_bayes(const ExperimentConfig& c, const fs::path& out_dir) {
  require_interference_scale(c, "bayes");
  const StageSeeds seeds = stage_seeds(c.seed);
  Report report("bayes", c, out_dir);
  report.note("reference sampler: collision-free uniform, Pr_C-CFS / Pr(C_i) = C(m, n)");
  const UnitaryMatrix u = obtain_matrix(c, seeds);
  const DistributionTable ideal = build_distribution(u, c.n, ProbabilityLaw::ideal(),
                                                     table_options(c, c.threads));
  const std::vector<GridPool> pools = build_pools(u, c, seeds, c.test_grid);
  std::vector<BayesianTrace> traces(pools.size());
  parallel_for(pools.size(), c.threads,
               [&](std::size_t i) { traces[i] = bayesian_lnx(pools[i].pool, ideal); });

  json grid = json::array();
  std::vector<double> slopes;
  for (std::size_t i = 0; i < pools.size(); ++i) {
    auto out = report.open(fmt::format("bayes_x{}.csv", num(pools[i].x_ind)),
                           "cumulative lnX at x_ind = " + num(pools[i].x_ind));
    out << "event_index,cumulative_lnx\n";
    for (std::size_t e = 0; e < traces[i].cumulative_lnx.size(); ++e)
      out << e << ',' << num(traces[i].cumulative_lnx[e]) << '\n';
    grid.push_back({{"x_ind", pools[i].x_ind},
                    {"slope", traces[i].slope},
                    {"expected_slope", expected_bayes_slope(pools[i].table, ideal)},
                    {"n_events", traces[i].n_events},
                    {"skipped", traces[i].skipped}});
    slopes.push_back(traces[i].slope);
  }
  json summary;
  summary["command"] = "bayes";
  summary["cfs_mass"] = ideal.cfs_mass;
  summary["grid"] = grid;
  summary["slopes_increasing"] = strictly_increasing(slopes);
  return report.finish(summary);
}

json cmd_analysis(const ExperimentConfig& c, const fs::path& out_dir) {
  require_interference_scale(c, "analysis");
  const StageSeeds seeds = stage_seeds(c.seed);
  Report report("analysis", c, out_dir);
  report.note("shell probabilities are reported both as total and as mean per pattern");
  report.note("distances are measured from T_1, the most probable pattern of each table");
  report.note("tvd.csv compares raw law values on collision-free patterns; tvd_conditioned.csv "
              "compares the separately conditioned tables");
  const UnitaryMatrix u = obtain_matrix(c, seeds);
  const std::vector<double>& xs = c.analysis_grid;
  const int n = c.n;

  struct PerX {
    DistributionTable partial;
    std::vector<DistributionTable> approx;  // cutoff 0..n-1
  };
  std::vector<PerX> tables(xs.size());
  parallel_for(xs.size(), c.threads, [&](std::size_t i) {
    tables[i].partial = build_distribution(u, n, ProbabilityLaw::partial(xs[i]), table_options(c, 1));
    for (int cutoff = 0; cutoff < n; ++cutoff)
      tables[i].approx.push_back(
          build_distribution(u, n, ProbabilityLaw::approx(xs[i], cutoff), table_options(c, 1)));
  });

  const double inner = std::sqrt(2.0);
  const double outer = std::sqrt(2.0 * (n - 1));
  const auto pct = [](double v) { return fmt::format("{:.2f}%", 100.0 * v); };

  json shells = json::object();
  json histograms = json::object();
  json summary_rows = json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const DistributionTable& t = tables[i].partial;
    const SortedDistribution sorted(t);
    const std::string tag = num(xs[i]);
    const auto cum = cumulative_probability(sorted);
    write_curve(report, "cumulative_x" + tag + ".csv",
                "cumulative probability of outputs sorted high to low, x_ind = " + tag, cum);
    const auto l2 = mean_l2_curve(sorted);
    write_curve(report, "mean_l2_x" + tag + ".csv",
                "probability-weighted mean L2 distance from T_1, x_ind = " + tag, l2);

    const ShellProbability in = shell_probability(t, ShellComparator::AtMost, inner);
    const ShellProbability out = shell_probability(t, ShellComparator::AtLeast, outer);
    const auto shell_json = [&](const ShellProbability& s) {
      return json{{"total_prob", s.total_prob},
                  {"mean_prob", s.mean_prob},
                  {"fraction_of_space", s.fraction_of_space},
                  {"count", s.count},
                  {"total_prob_percent", pct(s.total_prob)},
                  {"mean_prob_percent", pct(s.mean_prob)},
                  {"fraction_percent", pct(s.fraction_of_space)}};
    };
    shells[tag] = {{"inner", shell_json(in)}, {"outer", shell_json(out)}};

    json hist = json::object();
    for (const auto& [l, bin] : l2_shell_histogram(t))
      hist[std::to_string(l)] = {{"count", bin.count}, {"total_prob", bin.total_prob}};
    histograms[tag] = hist;

    const std::size_t top5 = std::max<std::size_t>(1, t.size() / 20);
    json tvd = json::array(), tvd_conditioned = json::array();
    for (int cutoff = 0; cutoff < n; ++cutoff) {
      tvd.push_back(unconditioned_tvd(tables[i].approx[cutoff], t));
      tvd_conditioned.push_back(total_variation_distance(tables[i].approx[cutoff], t));
    }
    summary_rows.push_back({{"x_ind", xs[i]},
                            {"top5pct_probability", cum[top5 - 1]},
                            {"mean_l2_at_30pct", l2[std::max<std::size_t>(1, t.size() * 3 / 10) - 1]},
                            {"mean_l2_full", l2.back()},
                            {"inner_mean_prob", in.mean_prob},
                            {"inner_total_prob", in.total_prob},
                            {"outer_mean_prob", out.mean_prob},
                            {"outer_total_prob", out.total_prob},
                            {"tvd_by_cutoff", tvd},
                            {"tvd_conditioned_by_cutoff", tvd_conditioned}});
  }
  report.write_json("shells.json", {{"inner_threshold", inner}, {"outer_threshold", outer},
                                    {"by_x", shells}},
                    "shell probabilities around T_1 (L2 <= sqrt2 and L2 >= sqrt(2(n-1)))");
  report.write_json("shell_histogram.json", histograms, "pattern count and probability per l");
  const auto write_tvd = [&](const std::string& name, const std::string& description, auto&& metric) {
    auto out = report.open(name, description);
    out << "x_ind";
    for (int cutoff = 0; cutoff < n; ++cutoff) out << ",cutoff_" << cutoff;
    out << '\n';
    for (std::size_t i = 0; i < xs.size(); ++i) {
      out << num(xs[i]);
      for (int cutoff = 0; cutoff < n; ++cutoff)
        out << ',' << num(metric(tables[i].approx[cutoff], tables[i].partial));
      out << '\n';
    }
  };
  write_tvd("tvd.csv", "TVD between cutoff approximation and exact law (raw collision-free values)",
            [](const DistributionTable& a, const DistributionTable& b) { return unconditioned_tvd(a, b); });
  write_tvd("tvd_conditioned.csv", "same, after conditioning each table on the collision-free sector",
            [](const DistributionTable& a, const DistributionTable& b) {
              return total_variation_distance(a, b);
            });

  json summary;
  summary["command"] = "analysis";
  summary["space_size"] = binomial(c.m, n);
  summary["overall_mean_prob"] = 1.0 / static_cast<double>(binomial(c.m, n));
  summary["overall_mean_prob_percent"] = pct(1.0 / static_cast<double>(binomial(c.m, n)));
  summary["grid"] = summary_rows;
  return report.finish(summary);
}

json run_command(std::string_view command, const ExperimentConfig& config, const fs::path& out_dir) {
  if (command == "matrix") return cmd_matrix(config, out_dir);
  if (command == "table") return cmd_table(config, out_dir);
  if (command == "sample") return cmd_sample(config, out_dir);
  if (command == "clusters") return cmd_clusters(config, out_dir);
  if (command == "figure1") return cmd_figure1(config, out_dir);
  if (command == "ksweep") return cmd_ksweep(config, out_dir);
  if (command == "bonafide-sweep") return cmd_bonafide_sweep(config, out_dir);
  if (command == "bayes") return cmd_bayes(config, out_dir);
  if (command == "analysis") return cmd_analysis(config, out_dir);
  throw_config("unknown command '" + std::string(command) + "'");
}

}  // namespace bsval
