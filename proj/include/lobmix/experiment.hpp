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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lobmix/longtail_data.hpp"
#include "lobmix/trainer.hpp"

namespace lobmix {

/// Where the balanced base data comes from when building a long-tailed set.
struct DatasetSpec {
  std::string base = "synth";  // "synth" or "cifar10"
  std::string base_path;       // cifar10: directory of data_batch_*.bin / test_batch.bin, or one batch file
  std::size_t classes = 10;
  std::size_t dim = 10;
  double separation = 3.0;
  std::size_t holdout_per_class = 100;  // synth test split per class
  std::string manifest;                 // path of an existing manifest (analyze/train)

  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

/// Mixing shape for a dataset family: 0.2 for ImageNet-scale data, 1 otherwise.
double default_alpha(std::string_view dataset);

/// Everything one CLI invocation needs besides its output directory.
struct ExperimentConfig {
  DatasetSpec dataset;
  ImbalanceProfile profile{ProfileKind::exponential, 100.0, 500};
  std::string combo = "all";  // "all" or one of ib-ib, ib-cb, cb-ib, cb-cb
  std::size_t samples = 200000;
  std::optional<double> alpha;  // unset: default_alpha(dataset.base)
  TrainConfig train;
  std::uint64_t seed = 0;
  std::string out = "out";

  double resolved_alpha() const;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// FNV-1a of the canonical JSON with the output directory removed.
  std::string hash() const;
  /// Hash of the settings that must agree for runs to be aggregated
  /// (everything except seed, strategy, defer epoch and output directory).
  std::string comparison_hash() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// 64-bit FNV-1a of `text`, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

/// Train/test data described by a manifest.
struct ExperimentData {
  DatasetManifest manifest;
  LabeledDataset train;
  LabeledDataset test;
};

/// Rebuilds the base named in `manifest.source` and applies the manifest.
ExperimentData load_experiment_data(const DatasetManifest& manifest);

/// Labels-only dataset with counts[k] rows of class k and no features.
LabeledDataset labels_only_dataset(const ClassCounts& counts);

}  // namespace lobmix
