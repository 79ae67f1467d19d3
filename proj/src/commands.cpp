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

#include "lobmix/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>

#include "lobmix/csv.hpp"
#include "lobmix/mixer.hpp"
#include "lobmix/occurrence.hpp"
#include "lobmix/rng.hpp"

namespace lobmix {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(1) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing run file " + path.string());
  return nlohmann::json::parse(in);
}

void write_config(const ExperimentConfig& cfg, const fs::path& dir) {
  nlohmann::json j = cfg.to_json();
  j["config_hash"] = cfg.hash();
  write_json(dir / "config.json", j);
}

std::vector<SamplerCombo> requested_combos(const ExperimentConfig& cfg) {
  const double alpha = cfg.resolved_alpha();
  if (cfg.combo == "all") return SamplerCombo::ablation(alpha);
  return {SamplerCombo::parse(cfg.combo, alpha)};
}

DatasetManifest load_manifest(const ExperimentConfig& cfg) {
  if (cfg.dataset.manifest.empty()) throw std::invalid_argument("no manifest given (--manifest or dataset.manifest)");
  return DatasetManifest::load(cfg.dataset.manifest);
}

}  // namespace

void cmd_build_lt(const ExperimentConfig& cfg, std::ostream& log) {
  const std::uint64_t data_seed = derive_seed(cfg.seed, "dataset");
  nlohmann::json source;
  LabeledDataset base;
  ImbalanceProfile profile = cfg.profile;

  if (cfg.dataset.base == "synth") {
    const std::size_t classes = cfg.dataset.classes;
    const std::size_t per_class = profile.n_max;
    const std::size_t holdout = cfg.dataset.holdout_per_class;
    source = {{"kind", "synth"},
              {"classes", classes},
              {"dim", cfg.dataset.dim},
              {"separation", cfg.dataset.separation},
              {"per_class", per_class},
              {"holdout_per_class", holdout},
              {"seed", data_seed}};
    profile.validate();
    const std::vector<std::size_t> counts(classes, per_class + holdout);
    const LabeledDataset full =
        synth_gaussian_mixture(classes, counts, cfg.dataset.dim, cfg.dataset.separation, data_seed);
    base = holdout_split(full, holdout, data_seed).first;
  } else if (cfg.dataset.base == "cifar10") {
    if (cfg.dataset.base_path.empty()) throw std::invalid_argument("--base cifar10 needs --base-path");
    const fs::path path = cfg.dataset.base_path;
    if (!fs::exists(path)) throw std::runtime_error("base path does not exist: " + path.string());
    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
      for (int b = 1; b <= 5; ++b) {
        const fs::path p = path / ("data_batch_" + std::to_string(b) + ".bin");
        if (fs::exists(p)) files.push_back(p);
      }
      if (files.empty()) throw std::runtime_error("no data_batch_*.bin files under " + path.string());
    } else {
      files.push_back(path);
    }
    base = load_cifar10_binary(files);
    const auto sizes = base.class_sizes();
    const std::size_t smallest = *std::min_element(sizes.begin(), sizes.end());
    if (smallest == 0) throw std::runtime_error("CIFAR-10 base is missing a class");
    // n_max defaults to the base's per-class size when not set explicitly.
    if (profile.n_max == 0) profile.n_max = smallest;
    source = {{"kind", "cifar10"}, {"path", path.string()}};
  } else {
    throw std::invalid_argument("unknown base '" + cfg.dataset.base + "' (expected synth or cifar10)");
  }

  profile.validate();
  const ClassCounts counts = make_counts(profile, base.num_classes());
  auto [subset, manifest] = subsample_longtail(base, counts, data_seed);
  manifest.source = source;
  manifest.profile = profile;

  fs::create_directories(cfg.out);
  manifest.save(fs::path(cfg.out) / "manifest.json");

  log << "counts:";
  for (std::size_t c : counts.values()) log << ' ' << c;
  log << "\ntotal: " << counts.total() << "\nimbalance_ratio: " << format_float(imbalance_ratio(counts)) << '\n';
}

void cmd_analyze(const ExperimentConfig& cfg, std::ostream& log) {
  const DatasetManifest manifest = load_manifest(cfg);
  const LabeledDataset labels = labels_only_dataset(manifest.counts);
  const auto index = std::make_shared<const ClassIndex>(labels);
  const auto sizes = index->class_sizes();
  const auto head = default_head_set(sizes);

  const fs::path dir = cfg.out;
  fs::create_directories(dir);
  write_config(cfg, dir);

  auto summary = open_out(dir / "occurrence_summary.csv");
  summary << "combo,alpha,samples,analytic_ratio,empirical_ratio,analytic_head_incidence,empirical_head_incidence,"
             "config_hash\n";
  for (const SamplerCombo& combo : requested_combos(cfg)) {
    const OccurrenceReport analytic = analytic_gamma(combo, *index);
    std::optional<OccurrenceReport> empirical;
    std::optional<double> empirical_head;
    if (cfg.samples > 0) {
      BatchStream stream(labels, index, combo.first, combo.second, combo.alpha,
                         derive_seed(cfg.seed, "analyze-" + combo.name()), /*with_features=*/false);
      OccurrenceTally tally(index->num_classes());
      constexpr std::size_t chunk = 4096;
      for (std::size_t done = 0; done < cfg.samples; done += chunk) {
        tally.add(stream.next_batch(std::min(chunk, cfg.samples - done)));
      }
      empirical = tally.report();
      if (!head.empty()) empirical_head = tally.head_incidence(head);
    }
    std::optional<double> analytic_head;
    if (!head.empty()) analytic_head = analytic_head_incidence(combo, *index, head);

    auto csv = open_out(dir / ("occurrence_" + combo.name() + ".csv"));
    write_occurrence_csv(csv, sizes, analytic, empirical ? &*empirical : nullptr);

    const std::optional<double> emp_ratio = empirical ? empirical->balance_ratio : std::nullopt;
    summary << combo.name() << ',' << format_float(combo.alpha) << ',' << cfg.samples << ','
            << format_float(analytic.balance_ratio) << ',' << format_float(emp_ratio) << ','
            << format_float(analytic_head) << ',' << format_float(empirical_head) << ',' << cfg.hash() << '\n';
    log << combo.name() << ": analytic gamma_max/gamma_min = " << format_float(analytic.balance_ratio);
    if (emp_ratio) log << ", empirical = " << format_float(emp_ratio);
    log << '\n';
  }
}

void cmd_train(const ExperimentConfig& cfg, std::ostream& log) {
  const DatasetManifest manifest = load_manifest(cfg);
  const ExperimentData data = load_experiment_data(manifest);

  TrainConfig tcfg = cfg.train;
  tcfg.alpha = cfg.resolved_alpha();
  tcfg.seed = derive_seed(cfg.seed, "train");
  tcfg.validate();

  const fs::path dir = cfg.out;
  fs::create_directories(dir);
  fs::remove(dir / kCompleteMarker);
  write_config(cfg, dir);
  write_json(dir / "manifest_ref.json", {{"manifest", cfg.dataset.manifest}});

  const auto index = std::make_shared<const ClassIndex>(data.train);
  const std::size_t c = data.train.num_classes();
  std::map<std::string, OccurrenceTally> tallies;
  const auto observe = [&](const MixedBatch& batch, std::size_t) {
    const std::string name = SamplerCombo{batch.meta.first, batch.meta.second, batch.meta.alpha}.name();
    tallies.try_emplace(name, c).first->second.add(batch);
  };

  const TrainResult result = train(data.train, data.test, tcfg, observe);
  const EvalReport eval = evaluate(result.params, data.test, result.groups);

  {
    auto csv = open_out(dir / "history.csv");
    write_history_csv(csv, result.history);
  }
  nlohmann::json ej = eval.to_json();
  ej["strategy"] = to_string(tcfg.strategy);
  ej["config_hash"] = cfg.hash();
  write_json(dir / "eval.json", ej);

  const auto sizes = index->class_sizes();
  for (const auto& [name, tally] : tallies) {
    const OccurrenceReport analytic = analytic_gamma(SamplerCombo::parse(name, tcfg.alpha), *index);
    const OccurrenceReport empirical = tally.report();
    auto csv = open_out(dir / ("occurrence_" + name + ".csv"));
    write_occurrence_csv(csv, sizes, analytic, &empirical);
  }

  open_out(dir / kCompleteMarker) << cfg.hash() << '\n';
  log << "strategy " << to_string(tcfg.strategy) << ": balanced accuracy " << format_float(eval.balanced_accuracy)
      << ", tail accuracy " << format_float(eval.tail_accuracy) << '\n';
}

void cmd_report(std::span<const fs::path> runs, const fs::path& out, std::ostream& log) {
  if (runs.empty()) throw std::invalid_argument("report needs at least one run directory");
  std::vector<fs::path> run_dirs;
  for (const auto& p : runs) {
    if (!fs::is_directory(p)) throw std::runtime_error("missing run directory " + p.string());
    if (fs::exists(p / "config.json") || fs::exists(p / kCompleteMarker)) {
      if (!fs::exists(p / kCompleteMarker)) throw std::runtime_error("run " + p.string() + " is not complete");
      run_dirs.push_back(p);
      continue;
    }
    for (const auto& entry : fs::directory_iterator(p)) {
      if (entry.is_directory() && fs::exists(entry.path() / kCompleteMarker)) run_dirs.push_back(entry.path());
    }
  }
  std::sort(run_dirs.begin(), run_dirs.end());
  if (run_dirs.empty()) throw std::runtime_error("no completed runs found");

  struct Samples {
    std::vector<double> balanced, head, medium, tail;
  };
  std::map<StrategyKind, Samples> by_strategy;
  std::string reference_hash;
  for (const auto& dir : run_dirs) {
    const ExperimentConfig cfg = ExperimentConfig::from_json(read_json(dir / "config.json"));
    const std::string key = cfg.comparison_hash();
    if (reference_hash.empty()) {
      reference_hash = key;
    } else if (key != reference_hash) {
      throw std::runtime_error("run " + dir.string() + " has a different configuration; refusing to aggregate");
    }
    const nlohmann::json eval = read_json(dir / "eval.json");
    Samples& s = by_strategy[cfg.train.strategy];
    s.balanced.push_back(eval.at("balanced_accuracy").get<double>());
    auto push = [&](std::vector<double>& v, const char* field) {
      if (!eval.at(field).is_null()) v.push_back(eval.at(field).get<double>());
    };
    push(s.head, "head_accuracy");
    push(s.medium, "medium_accuracy");
    push(s.tail, "tail_accuracy");
  }

  auto mean_std = [](const std::vector<double>& v) -> std::pair<std::optional<double>, std::optional<double>> {
    if (v.empty()) return {std::nullopt, std::nullopt};
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    return {m, sd};
  };

  fs::path out_file = out;
  if (fs::is_directory(out) || !out.has_extension()) {
    fs::create_directories(out);
    out_file = out / "aggregate.csv";
  }
  auto csv = open_out(out_file);
  csv << "strategy,runs,balanced_acc_mean,balanced_acc_std,head_acc_mean,head_acc_std,med_acc_mean,med_acc_std,"
         "tail_acc_mean,tail_acc_std\n";
  for (const auto& [strategy, s] : by_strategy) {
    csv << to_string(strategy) << ',' << s.balanced.size();
    for (const auto* v : {&s.balanced, &s.head, &s.medium, &s.tail}) {
      const auto [m, sd] = mean_std(*v);
      csv << ',' << format_float(m) << ',' << format_float(sd);
    }
    csv << '\n';
  }
  log << "aggregated " << run_dirs.size() << " runs into " << out_file.string() << '\n';
}

}  // namespace lobmix
