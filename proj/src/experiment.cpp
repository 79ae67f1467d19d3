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

#include "lobmix/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "lobmix/mixer.hpp"

namespace lobmix {

namespace fs = std::filesystem;

double default_alpha(std::string_view dataset) {
  return (dataset == "imagenet" || dataset == "imagenet-lt") ? kLargeScaleAlpha : kDefaultAlpha;
}

double ExperimentConfig::resolved_alpha() const { return alpha ? *alpha : default_alpha(dataset.base); }

nlohmann::json ExperimentConfig::to_json() const {
  TrainConfig t = train;
  t.alpha = resolved_alpha();
  return {
      {"dataset",
       {{"base", dataset.base},
        {"base_path", dataset.base_path},
        {"classes", dataset.classes},
        {"dim", dataset.dim},
        {"separation", dataset.separation},
        {"holdout_per_class", dataset.holdout_per_class},
        {"manifest", dataset.manifest}}},
      {"profile", {{"kind", to_string(profile.kind)}, {"rho", profile.rho}, {"n_max", profile.n_max}}},
      {"combo", combo},
      {"samples", samples},
      {"alpha", alpha ? nlohmann::json(*alpha) : nlohmann::json(nullptr)},
      {"train", t.to_json()},
      {"seed", seed},
      {"out", out},
  };
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    c.dataset.base = d.value("base", c.dataset.base);
    c.dataset.base_path = d.value("base_path", c.dataset.base_path);
    c.dataset.classes = d.value("classes", c.dataset.classes);
    c.dataset.dim = d.value("dim", c.dataset.dim);
    c.dataset.separation = d.value("separation", c.dataset.separation);
    c.dataset.holdout_per_class = d.value("holdout_per_class", c.dataset.holdout_per_class);
    c.dataset.manifest = d.value("manifest", c.dataset.manifest);
  }
  if (j.contains("profile")) {
    const auto& p = j.at("profile");
    if (p.contains("kind")) c.profile.kind = parse_profile_kind(p.at("kind").get<std::string>());
    c.profile.rho = p.value("rho", c.profile.rho);
    c.profile.n_max = p.value("n_max", c.profile.n_max);
  }
  c.combo = j.value("combo", c.combo);
  c.samples = j.value("samples", c.samples);
  if (j.contains("alpha") && !j.at("alpha").is_null()) c.alpha = j.at("alpha").get<double>();
  if (j.contains("train")) c.train = TrainConfig::from_json(j.at("train"));
  c.seed = j.value("seed", c.seed);
  c.out = j.value("out", c.out);
  c.train.alpha = c.resolved_alpha();
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return from_json(nlohmann::json::parse(in));
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ExperimentConfig::hash() const {
  nlohmann::json j = to_json();
  j.erase("out");
  return fnv1a_hex(j.dump());
}

std::string ExperimentConfig::comparison_hash() const {
  nlohmann::json j = to_json();
  j.erase("out");
  j.erase("seed");
  j["train"].erase("strategy");
  j["train"].erase("defer_epoch");
  j["train"].erase("seed");
  return fnv1a_hex(j.dump());
}

namespace {

std::vector<fs::path> cifar_files(const fs::path& base, bool test) {
  if (fs::is_regular_file(base)) {
    if (test) return {};
    return {base};
  }
  if (!fs::is_directory(base)) throw std::runtime_error("CIFAR-10 base path not found: " + base.string());
  std::vector<fs::path> files;
  if (test) {
    if (fs::exists(base / "test_batch.bin")) files.push_back(base / "test_batch.bin");
    return files;
  }
  for (int b = 1; b <= 5; ++b) {
    const fs::path p = base / ("data_batch_" + std::to_string(b) + ".bin");
    if (fs::exists(p)) files.push_back(p);
  }
  if (files.empty()) throw std::runtime_error("no data_batch_*.bin files under " + base.string());
  return files;
}

}  // namespace

LabeledDataset labels_only_dataset(const ClassCounts& counts) {
  std::vector<std::uint32_t> labels;
  labels.reserve(counts.total());
  for (std::size_t k = 0; k < counts.num_classes(); ++k) labels.insert(labels.end(), counts[k], static_cast<std::uint32_t>(k));
  return LabeledDataset(0, counts.num_classes(), {}, std::move(labels));
}

ExperimentData load_experiment_data(const DatasetManifest& manifest) {
  const auto& src = manifest.source;
  const std::string kind = src.value("kind", std::string{});
  if (kind == "synth") {
    const auto classes = src.at("classes").get<std::size_t>();
    const auto per_class = src.at("per_class").get<std::size_t>();
    const auto holdout = src.at("holdout_per_class").get<std::size_t>();
    const auto seed = src.at("seed").get<std::uint64_t>();
    const std::vector<std::size_t> counts(classes, per_class + holdout);
    const LabeledDataset full = synth_gaussian_mixture(classes, counts, src.at("dim").get<std::size_t>(),
                                                       src.at("separation").get<double>(), seed);
    auto [base, test] = holdout_split(full, holdout, seed);
    return {manifest, apply_manifest(base, manifest), std::move(test)};
  }
  if (kind == "cifar10") {
    const fs::path base_path = src.at("path").get<std::string>();
    const auto train_files = cifar_files(base_path, false);
    const auto test_files = cifar_files(base_path, true);
    if (test_files.empty()) throw std::runtime_error("no test_batch.bin next to " + base_path.string());
    const LabeledDataset base = load_cifar10_binary(train_files);
    return {manifest, apply_manifest(base, manifest), load_cifar10_binary(test_files)};
  }
  throw std::runtime_error("manifest source kind '" + kind + "' cannot be rebuilt into features");
}

}  // namespace lobmix
