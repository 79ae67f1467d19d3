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

// lobmix: build long-tailed datasets, analyse label occurrence under
// different sampler pairings, train soft-label classifiers and aggregate runs.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lobmix/commands.hpp"
#include "lobmix/experiment.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> rho;
  std::optional<std::string> profile;
  std::optional<std::size_t> n_max;
  std::optional<std::string> base;
  std::optional<std::string> base_path;
  std::optional<std::size_t> classes;
  std::optional<std::size_t> dim;
  std::optional<double> separation;
  std::optional<std::size_t> holdout;
  std::optional<std::string> manifest;
  std::optional<std::string> combo;
  std::optional<std::size_t> samples;
  std::optional<double> alpha;
  std::optional<std::string> strategy;
  std::optional<std::size_t> defer_epoch;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> lr;
  std::optional<std::string> arch;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Experiment config (JSON); flags override its fields")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Experiment seed (U64)");
  cmd->add_option("--alpha", f.alpha, "Beta(alpha, alpha) mixing shape");
  cmd->add_option("--out", f.out, "Output directory");
}

lobmix::ExperimentConfig resolve(const Flags& f) {
  lobmix::ExperimentConfig cfg = f.config.empty() ? lobmix::ExperimentConfig{} : lobmix::ExperimentConfig::load(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.rho) cfg.profile.rho = *f.rho;
  if (f.profile) cfg.profile.kind = lobmix::parse_profile_kind(*f.profile);
  if (f.base) cfg.dataset.base = *f.base;
  if (f.base_path) cfg.dataset.base_path = *f.base_path;
  if (f.classes) cfg.dataset.classes = *f.classes;
  if (f.dim) cfg.dataset.dim = *f.dim;
  if (f.separation) cfg.dataset.separation = *f.separation;
  if (f.holdout) cfg.dataset.holdout_per_class = *f.holdout;
  if (f.manifest) cfg.dataset.manifest = *f.manifest;
  if (f.combo) cfg.combo = *f.combo;
  if (f.samples) cfg.samples = *f.samples;
  if (f.alpha) cfg.alpha = *f.alpha;
  if (f.strategy) cfg.train.strategy = lobmix::parse_strategy(*f.strategy);
  if (f.defer_epoch) cfg.train.defer_epoch = *f.defer_epoch;
  if (f.epochs) cfg.train.epochs = *f.epochs;
  if (f.batch_size) cfg.train.batch_size = *f.batch_size;
  if (f.lr) cfg.train.lr = *f.lr;
  if (f.arch) cfg.train.arch = lobmix::parse_architecture(*f.arch);
  if (f.out) cfg.out = *f.out;
  cfg.train.alpha = cfg.resolved_alpha();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label-occurrence-balanced mixup toolkit"};
  app.require_subcommand(1);
  Flags f;

  auto* build = app.add_subcommand("build-lt", "Build a long-tailed manifest from a balanced base");
  add_common(build, f);
  build->add_option("--base", f.base, "Base data: synth or cifar10");
  build->add_option("--base-path", f.base_path, "CIFAR-10 binary directory or batch file");
  build->add_option("--rho", f.rho, "Imbalance ratio (largest / smallest class)");
  build->add_option("--profile", f.profile, "Imbalance profile")->check(CLI::IsMember({"exp", "exponential", "pareto", "step"}));
  build->add_option("--n-max", f.n_max, "Size of the largest class (default: base per-class size for cifar10)");
  build->add_option("--classes", f.classes, "Synthetic: number of classes");
  build->add_option("--dim", f.dim, "Synthetic: feature dimension");
  build->add_option("--separation", f.separation, "Synthetic: radius of the class-center sphere");
  build->add_option("--holdout", f.holdout, "Synthetic: balanced test examples per class");

  auto* analyze = app.add_subcommand("analyze", "Label-occurrence ratios for sampler pairings");
  add_common(analyze, f);
  analyze->add_option("--manifest", f.manifest, "Dataset manifest");
  analyze->add_option("--combo", f.combo, "Sampler pair")->check(CLI::IsMember({"all", "ib-ib", "ib-cb", "cb-ib", "cb-cb"}));
  analyze->add_option("--samples", f.samples, "Mixed examples for the empirical estimate (0: analytic only)");

  auto* trn = app.add_subcommand("train", "Train a soft-label classifier");
  add_common(trn, f);
  trn->add_option("--manifest", f.manifest, "Dataset manifest");
  trn->add_option("--strategy", f.strategy, "Batch strategy")->check(CLI::IsMember({"erm", "mixup", "lob", "deferred"}));
  trn->add_option("--defer-epoch", f.defer_epoch, "Epoch at which deferred switches to LOB batches");
  trn->add_option("--epochs", f.epochs, "Training epochs");
  trn->add_option("--batch-size", f.batch_size, "Mini-batch size");
  trn->add_option("--lr", f.lr, "Base learning rate");
  trn->add_option("--arch", f.arch, "Model")->check(CLI::IsMember({"linear", "mlp1"}));

  auto* report = app.add_subcommand("report", "Aggregate finished runs across seeds");
  std::vector<std::string> run_dirs;
  std::string report_out = "aggregate.csv";
  report->add_option("--runs", run_dirs, "Run directories, or parents of run directories")->required();
  report->add_option("--out", report_out, "Output CSV file or directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (report->parsed()) {
      std::vector<std::filesystem::path> paths(run_dirs.begin(), run_dirs.end());
      lobmix::cmd_report(paths, report_out, std::cout);
      return 0;
    }
    lobmix::ExperimentConfig cfg = resolve(f);
    if (build->parsed()) {
      // CIFAR defaults to keeping the full per-class size as n_max.
      if (f.n_max) cfg.profile.n_max = *f.n_max;
      else if (cfg.dataset.base == "cifar10" && f.config.empty()) cfg.profile.n_max = 0;
      lobmix::cmd_build_lt(cfg, std::cout);
    } else if (analyze->parsed()) {
      lobmix::cmd_analyze(cfg, std::cout);
    } else if (trn->parsed()) {
      lobmix::cmd_train(cfg, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
