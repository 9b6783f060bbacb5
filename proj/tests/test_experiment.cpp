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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "bsval/error.hpp"
#include "bsval/experiment.hpp"

namespace bsval {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bsval_experiment_" + name);
  fs::remove_all(dir);
  return dir;
}

json small_config() {
  return {{"m", 8},
          {"n", 3},
          {"k", 10},
          {"bona_fide_events", 200},
          {"pool_size", 2000},
          {"events_per_trial", 100},
          {"trials", 40},
          {"mcmc", {{"burn_in", 100}, {"thinning", 5}}},
          {"k_list", {5, 10}},
          {"count", 500},
          {"analysis_grid", {0.0, 0.5, 1.0}}};
}

TEST(Config, DefaultsMatchPaperSetting) {
  const ExperimentConfig c = resolve_config(json::object());
  EXPECT_EQ(c.m, 16);
  EXPECT_EQ(c.n, 4);
  EXPECT_EQ(c.k, 100);
  EXPECT_EQ(c.bona_fide_events, 1000u);
  EXPECT_EQ(c.trials, 5000u);
  EXPECT_EQ(c.pool_size, 100000u);
  EXPECT_EQ(c.cutoff_list, (std::vector<int>{4, 3, 2}));
  EXPECT_EQ(c.analysis_grid.size(), 22u);
  EXPECT_EQ(c.chi2_formula, Chi2Formula::Standard);
}

TEST(Config, RejectsBadInput) {
  for (const json& bad :
       {json{{"unknown", 1}}, json{{"m", 4}, {"n", 5}}, json{{"trials", 0}},
        json{{"test_grid", {0.5, 1.5}}}, json{{"m", 40}, {"n", 20}}, json{{"seed", "x"}},
        json{{"chi2_formula", "bogus"}}, json{{"mcmc", {{"thinning", 0}}}},
        json{{"input_modes", {0, 1}}}, json{{"cutoff_list", {5}}}, json::array()}) {
    try {
      resolve_config(bad);
      ADD_FAILURE() << "accepted " << bad.dump();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Config) << bad.dump();
    }
  }
}

TEST(Config, RoundTripsThroughJson) {
  const ExperimentConfig c = resolve_config(small_config());
  const json j = config_to_json(c);
  EXPECT_EQ(config_to_json(resolve_config(j)), j);
}

TEST(Commands, NamesAreKnown) {
  EXPECT_EQ(command_names().size(), 9u);
  EXPECT_THROW(run_command("nope", resolve_config(json::object()), scratch("nope")), Error);
}

TEST(Commands, InterferenceGuard) {
  json j = small_config();
  j["m"] = 12;
  j["n"] = 9;
  try {
    run_command("figure1", resolve_config(j), scratch("guard"));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
}

TEST(Commands, EveryCommandWritesManifestAndConfig) {
  const ExperimentConfig c = resolve_config(small_config());
  for (const std::string& name : command_names()) {
    const fs::path dir = scratch("cmd_" + name);
    run_command(name, c, dir);
    ASSERT_TRUE(fs::exists(dir / "manifest.json")) << name;
    ASSERT_TRUE(fs::exists(dir / "summary.json")) << name;
    const json manifest = json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(manifest["command"], name);
    EXPECT_EQ(manifest["config"], config_to_json(c));
    for (const auto& file : manifest["files"])
      EXPECT_TRUE(fs::exists(dir / file["name"].get<std::string>())) << file["name"];
    fs::remove_all(dir);
  }
}

TEST(Commands, ByteIdenticalReruns) {
  const ExperimentConfig c = resolve_config(small_config());
  for (const std::string& name : command_names()) {
    const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
    run_command(name, c, a);
    run_command(name, c, b);
    for (const auto& entry : fs::directory_iterator(a))
      EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename()))
          << name << ": " << entry.path().filename();
    fs::remove_all(a);
    fs::remove_all(b);
  }
}

TEST(Commands, ThreadCountDoesNotChangeSummaries) {
  json j = small_config();
  const ExperimentConfig one = resolve_config(j);
  j["threads"] = 4;
  const ExperimentConfig four = resolve_config(j);
  for (const char* name : {"figure1", "bonafide-sweep", "analysis"}) {
    const json a = run_command(name, one, scratch("t1"));
    const json b = run_command(name, four, scratch("t4"));
    EXPECT_EQ(a, b) << name;
  }
}

TEST(Commands, MatrixFileComposes) {
  const ExperimentConfig c = resolve_config(small_config());
  const fs::path mdir = scratch("matrix");
  run_command("matrix", c, mdir);
  json j = small_config();
  j["matrix_path"] = (mdir / "matrix.json").string();
  const json from_file = run_command("figure1", resolve_config(j), scratch("from_file"));
  const json generated = run_command("figure1", c, scratch("generated"));
  EXPECT_EQ(from_file["grid"], generated["grid"]);
  j["m"] = 9;
  EXPECT_THROW(run_command("figure1", resolve_config(j), scratch("mismatch")), Error);
}

TEST(Commands, SingleClusterIsDegenerate) {
  json j = small_config();
  j["k_list"] = {1};
  const json s = run_command("ksweep", resolve_config(j), scratch("k1"));
  EXPECT_TRUE(s["rows"][0]["degenerate"].get<bool>());
}

TEST(Commands, SingleTrialStillReports) {
  json j = small_config();
  j["trials"] = 1;
  const json s = run_command("figure1", resolve_config(j), scratch("one_trial"));
  EXPECT_TRUE(s["grid"][0].contains("fit_error"));
}

TEST(Commands, KSweepCumulativeEndsAtTrainingSize) {
  const json s = run_command("ksweep", resolve_config(small_config()), scratch("ksweep"));
  for (const auto& row : s["rows"]) EXPECT_EQ(row["cumulative_members_final"], 200);
}

// Pool and bona fide share one law, so the statistic behaves like a
// homogeneity test under the null: mean near k - 1.
TEST(Commands, SelfConsistencyAtIdealPool) {
  json j = small_config();
  j["test_grid"] = {1.0};
  j["trials"] = 400;
  const json s = run_command("figure1", resolve_config(j), scratch("self"));
  const double center = s["grid"][0]["center"];
  EXPECT_NEAR(center, 9.0, 3.0);
}

TEST(Commands, AnalysisShellPercentages) {
  json j = small_config();
  j["m"] = 16;
  j["n"] = 4;
  j["analysis_grid"] = {1.0};
  const fs::path dir = scratch("analysis");
  const json s = run_command("analysis", resolve_config(j), dir);
  EXPECT_EQ(s["overall_mean_prob_percent"], "0.05%");
  const json shells = json::parse(slurp(dir / "shells.json"));
  EXPECT_EQ(shells["by_x"]["1"]["inner"]["fraction_percent"], "2.69%");
}

}  // namespace
}  // namespace bsval
