// Copyright 2026 The lobmix Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "lobmix/commands.hpp"
#include "lobmix/csv.hpp"

namespace lobmix {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CommandsTest : public ::testing::Test {
protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("lobmix_cmd_" + std::to_string(::getpid()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  ExperimentConfig synth_config() const {
    ExperimentConfig cfg;
    cfg.dataset.classes = 4;
    cfg.dataset.dim = 3;
    cfg.dataset.holdout_per_class = 10;
    cfg.profile = {ProfileKind::exponential, 8.0, 40};
    cfg.samples = 5000;
    cfg.train.epochs = 3;
    cfg.train.lr_decay_epochs = {2};
    cfg.seed = 4;
    cfg.out = (root_ / "lt").string();
    return cfg;
  }

  fs::path build(ExperimentConfig cfg) {
    std::ostringstream log;
    cmd_build_lt(cfg, log);
    return fs::path(cfg.out) / "manifest.json";
  }

  fs::path root_;
};

TEST_F(CommandsTest, BuildLtWritesManifest) {
  std::ostringstream log;
  const auto cfg = synth_config();
  cmd_build_lt(cfg, log);
  const auto manifest = DatasetManifest::load(fs::path(cfg.out) / "manifest.json");
  EXPECT_EQ(manifest.counts.values(), (std::vector<std::size_t>{40, 20, 10, 5}));
  EXPECT_EQ(manifest.source.at("kind"), "synth");
  EXPECT_NE(log.str().find("imbalance_ratio: 8"), std::string::npos);
  const std::string first = slurp(fs::path(cfg.out) / "manifest.json");
  cmd_build_lt(cfg, log);
  EXPECT_EQ(slurp(fs::path(cfg.out) / "manifest.json"), first);
}

TEST_F(CommandsTest, BuildLtBalancedProfile) {
  auto cfg = synth_config();
  cfg.profile.rho = 1.0;
  const auto manifest = DatasetManifest::load(build(cfg));
  EXPECT_EQ(manifest.counts.values(), (std::vector<std::size_t>(4, 40)));
}

TEST_F(CommandsTest, BuildLtFromCifarFiles) {
  const fs::path dir = root_ / "cifar";
  fs::create_directories(dir);
  auto fake = [](std::size_t per_class, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> features;
    std::vector<std::uint32_t> labels;
    for (std::uint32_t k = 0; k < 10; ++k) {
      for (std::size_t i = 0; i < per_class; ++i) {
        labels.push_back(k);
        for (std::size_t p = 0; p < kCifarImageBytes; ++p) features.push_back(rng.uniform_below(256) / 255.0);
      }
    }
    return LabeledDataset(kCifarImageBytes, 10, features, labels);
  };
  write_cifar10_binary(dir / "data_batch_1.bin", fake(16, 1));
  write_cifar10_binary(dir / "test_batch.bin", fake(2, 2));

  auto cfg = synth_config();
  cfg.dataset.base = "cifar10";
  cfg.dataset.base_path = dir.string();
  cfg.profile = {ProfileKind::exponential, 4.0, 0};
  const fs::path manifest_path = build(cfg);
  const auto manifest = DatasetManifest::load(manifest_path);
  EXPECT_EQ(manifest.counts[0], 16u);
  EXPECT_EQ(manifest.counts[9], 4u);

  cfg.dataset.manifest = manifest_path.string();
  cfg.train.strategy = StrategyKind::erm;
  cfg.train.epochs = 1;
  cfg.train.lr_decay_epochs = {};
  cfg.out = (root_ / "cifar_run").string();
  std::ostringstream log;
  cmd_train(cfg, log);
  EXPECT_TRUE(fs::exists(fs::path(cfg.out) / kCompleteMarker));
}

TEST_F(CommandsTest, BuildLtErrors) {
  auto cfg = synth_config();
  cfg.dataset.base = "cifar10";
  std::ostringstream log;
  EXPECT_THROW(cmd_build_lt(cfg, log), std::invalid_argument);
  cfg.dataset.base_path = (root_ / "does-not-exist").string();
  EXPECT_THROW(cmd_build_lt(cfg, log), std::runtime_error);
  cfg.dataset.base = "imagenet";
  EXPECT_THROW(cmd_build_lt(cfg, log), std::invalid_argument);
  cfg = synth_config();
  cfg.profile.rho = 0.5;
  EXPECT_THROW(cmd_build_lt(cfg, log), std::invalid_argument);
}

TEST_F(CommandsTest, AnalyzeWritesOccurrenceTables) {
  auto cfg = synth_config();
  cfg.dataset.manifest = build(cfg).string();
  cfg.out = (root_ / "analysis").string();
  std::ostringstream log;
  cmd_analyze(cfg, log);
  const fs::path out = cfg.out;
  for (const char* combo : {"ib-ib", "ib-cb", "cb-cb"}) {
    const auto table = read_csv(out / (std::string("occurrence_") + combo + ".csv"));
    EXPECT_EQ(table.rows.size(), 4u) << combo;
    for (const auto& v : table.values("gamma_empirical")) EXPECT_FALSE(v.empty());
  }
  const auto summary = read_csv(out / "occurrence_summary.csv");
  ASSERT_EQ(summary.rows.size(), 3u);
  EXPECT_EQ(summary.values("analytic_ratio")[0], "8");
  EXPECT_EQ(summary.values("analytic_ratio")[2], "1");

  const std::string first = slurp(out / "occurrence_summary.csv");
  cmd_analyze(cfg, log);
  EXPECT_EQ(slurp(out / "occurrence_summary.csv"), first);
}

TEST_F(CommandsTest, AnalyzeBalancedAndAnalyticOnly) {
  auto cfg = synth_config();
  cfg.profile.rho = 1.0;
  cfg.dataset.manifest = build(cfg).string();
  cfg.out = (root_ / "analysis").string();
  cfg.samples = 0;
  cfg.combo = "ib-cb";
  std::ostringstream log;
  cmd_analyze(cfg, log);
  const auto summary = read_csv(fs::path(cfg.out) / "occurrence_summary.csv");
  ASSERT_EQ(summary.rows.size(), 1u);
  EXPECT_EQ(summary.values("analytic_ratio")[0], "1");
  EXPECT_EQ(summary.values("empirical_ratio")[0], "");
  for (const auto& v : read_csv(fs::path(cfg.out) / "occurrence_ib-cb.csv").values("gamma_empirical")) {
    EXPECT_EQ(v, "");
  }
}

TEST_F(CommandsTest, AnalyzeNeedsManifest) {
  std::ostringstream log;
  EXPECT_THROW(cmd_analyze(synth_config(), log), std::invalid_argument);
}

TEST_F(CommandsTest, TrainIsReproducibleForEveryStrategy) {
  auto cfg = synth_config();
  cfg.dataset.manifest = build(cfg).string();
  for (auto strategy : {StrategyKind::erm, StrategyKind::mixup, StrategyKind::lob, StrategyKind::deferred}) {
    cfg.train.strategy = strategy;
    const std::string name(to_string(strategy));
    std::ostringstream log;
    cfg.out = (root_ / (name + "_a")).string();
    cmd_train(cfg, log);
    cfg.out = (root_ / (name + "_b")).string();
    cmd_train(cfg, log);
    for (const char* file : {"history.csv", "eval.json", kCompleteMarker}) {
      EXPECT_EQ(slurp(root_ / (name + "_a") / file), slurp(root_ / (name + "_b") / file)) << name << ' ' << file;
    }
    EXPECT_EQ(read_csv(root_ / (name + "_a") / "history.csv").rows.size(), 3u);
  }
  EXPECT_TRUE(fs::exists(root_ / "mixup_a" / "occurrence_ib-ib.csv"));
  EXPECT_TRUE(fs::exists(root_ / "lob_a" / "occurrence_cb-cb.csv"));
  EXPECT_TRUE(fs::exists(root_ / "deferred_a" / "occurrence_ib-ib.csv"));
  EXPECT_TRUE(fs::exists(root_ / "deferred_a" / "occurrence_cb-cb.csv"));
  EXPECT_FALSE(fs::exists(root_ / "erm_a" / "occurrence_ib-ib.csv"));
}

TEST_F(CommandsTest, ReportAggregatesByStrategy) {
  auto cfg = synth_config();
  cfg.dataset.manifest = build(cfg).string();
  const fs::path runs = root_ / "runs";
  std::ostringstream log;
  for (std::uint64_t seed : {1, 2}) {
    for (auto strategy : {StrategyKind::mixup, StrategyKind::lob}) {
      cfg.seed = seed;
      cfg.train.strategy = strategy;
      cfg.out = (runs / (std::string(to_string(strategy)) + std::to_string(seed))).string();
      cmd_train(cfg, log);
    }
  }
  fs::create_directories(runs / "unfinished");
  const std::vector<fs::path> inputs = {runs};
  cmd_report(inputs, root_ / "report", log);
  const auto table = read_csv(root_ / "report" / "aggregate.csv");
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.values("strategy"), (std::vector<std::string>{"mixup", "lob"}));
  EXPECT_EQ(table.values("runs"), (std::vector<std::string>{"2", "2"}));

  const std::vector<fs::path> single = {runs / "lob1"};
  cmd_report(single, root_ / "single", log);
  EXPECT_EQ(read_csv(root_ / "single" / "aggregate.csv").values("balanced_acc_std")[0], "0");
}

TEST_F(CommandsTest, ReportRejectsMismatchedRuns) {
  auto cfg = synth_config();
  cfg.dataset.manifest = build(cfg).string();
  std::ostringstream log;
  cfg.out = (root_ / "runs" / "a").string();
  cmd_train(cfg, log);
  cfg.train.epochs = 4;
  cfg.out = (root_ / "runs" / "b").string();
  cmd_train(cfg, log);
  const std::vector<fs::path> inputs = {root_ / "runs"};
  EXPECT_THROW(cmd_report(inputs, root_ / "report", log), std::runtime_error);

  fs::remove(root_ / "runs" / "b" / kCompleteMarker);
  const std::vector<fs::path> incomplete = {root_ / "runs" / "b"};
  EXPECT_THROW(cmd_report(incomplete, root_ / "report", log), std::runtime_error);
  EXPECT_NO_THROW(cmd_report(inputs, root_ / "report", log));
}

}  // namespace
}  // namespace lobmix
