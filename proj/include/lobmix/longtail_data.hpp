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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace lobmix {

/// Per-class example counts n_k for classes 0..C-1. At least two classes,
/// every count at least one.
class ClassCounts {
public:
  explicit ClassCounts(std::vector<std::size_t> counts);

  std::size_t num_classes() const { return counts_.size(); }
  std::size_t operator[](std::size_t k) const { return counts_[k]; }
  std::size_t total() const;
  const std::vector<std::size_t>& values() const { return counts_; }

  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;

private:
  std::vector<std::size_t> counts_;
};

enum class ProfileKind { exponential, pareto, step };

std::string_view to_string(ProfileKind kind);
/// Accepts "exponential"/"exp", "pareto", "step".
ProfileKind parse_profile_kind(std::string_view text);

struct ImbalanceProfile {
  ProfileKind kind = ProfileKind::exponential;
  double rho = 1.0;
  std::size_t n_max = 1;

  /// Throws std::invalid_argument unless rho >= 1 and n_max >= rho.
  void validate() const;

  friend bool operator==(const ImbalanceProfile&, const ImbalanceProfile&) = default;
};

/// n_k = round_half_up(n_max * rho^(-k/(C-1))).
ClassCounts exponential_counts(std::size_t n_max, std::size_t num_classes, double rho);

/// n_k = round_half_up(n_max * (k+1)^(-a)) with a = ln(rho)/ln(C).
ClassCounts pareto_counts(std::size_t n_max, std::size_t num_classes, double rho);

/// First C - floor(C/2) classes keep n_max, the rest get round_half_up(n_max/rho).
ClassCounts step_counts(std::size_t n_max, std::size_t num_classes, double rho);

ClassCounts make_counts(const ImbalanceProfile& profile, std::size_t num_classes);

/// max(counts) / min(counts).
double imbalance_ratio(const ClassCounts& counts);

/// Row-major feature matrix with one class label per row.
class LabeledDataset {
public:
  LabeledDataset() = default;
  LabeledDataset(std::size_t dim, std::size_t num_classes, std::vector<double> features,
                 std::vector<std::uint32_t> labels);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::size_t dim() const { return dim_; }
  std::size_t num_classes() const { return num_classes_; }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  std::uint32_t label(std::size_t i) const { return labels_[i]; }

  const std::vector<double>& features() const { return features_; }
  const std::vector<std::uint32_t>& labels() const { return labels_; }

  /// Number of examples of each class (zeros allowed).
  std::vector<std::size_t> class_sizes() const;

  /// Rows `indices`, in the given order.
  LabeledDataset select(std::span<const std::size_t> indices) const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

private:
  std::size_t dim_ = 0;
  std::size_t num_classes_ = 0;
  std::vector<double> features_;
  std::vector<std::uint32_t> labels_;
};

/// Per-class index lists I(k) over a dataset of N examples.
class ClassIndex {
public:
  ClassIndex(std::span<const std::uint32_t> labels, std::size_t num_classes);
  explicit ClassIndex(const LabeledDataset& dataset);

  std::size_t num_classes() const { return per_class_.size(); }
  std::size_t total() const { return labels_.size(); }
  std::size_t class_size(std::size_t k) const { return per_class_[k].size(); }
  const std::vector<std::size_t>& members(std::size_t k) const { return per_class_[k]; }
  std::uint32_t label_of(std::size_t i) const { return labels_[i]; }
  std::vector<std::size_t> class_sizes() const;

private:
  std::vector<std::vector<std::size_t>> per_class_;
  std::vector<std::uint32_t> labels_;
};

/// Record of a long-tailed subsample: enough to rebuild it from its base.
struct DatasetManifest {
  nlohmann::json source = nlohmann::json::object();
  ImbalanceProfile profile;
  std::uint64_t seed = 0;
  ClassCounts counts{{1, 1}};
  std::vector<std::vector<std::size_t>> kept_indices;

  nlohmann::json to_json() const;
  static DatasetManifest from_json(const nlohmann::json& j);

  void save(const std::filesystem::path& path) const;
  static DatasetManifest load(const std::filesystem::path& path);

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// Keeps counts[k] examples of every class k, drawn uniformly without
/// replacement with a stream derived from `seed`. Output rows follow base order.
/// The manifest's `source` and `profile.kind` are left for the caller to fill.
std::pair<LabeledDataset, DatasetManifest> subsample_longtail(const LabeledDataset& base,
                                                              const ClassCounts& counts,
                                                              std::uint64_t seed);

/// Rebuilds the subsample recorded in `manifest` from its base dataset.
LabeledDataset apply_manifest(const LabeledDataset& base, const DatasetManifest& manifest);

/// Isotropic unit-variance Gaussian blobs, one per class, with centers on the
/// sphere of radius `separation`. Rows are grouped by class.
LabeledDataset synth_gaussian_mixture(std::size_t num_classes, std::span<const std::size_t> counts,
                                      std::size_t dim, double separation, std::uint64_t seed);

/// Centers used by synth_gaussian_mixture for the same arguments.
std::vector<std::vector<double>> synth_centers(std::size_t num_classes, std::size_t dim,
                                               double separation, std::uint64_t seed);

/// Moves `per_class` random examples of every class into a held-out split.
/// Returns (remaining, held_out).
std::pair<LabeledDataset, LabeledDataset> holdout_split(const LabeledDataset& dataset,
                                                        std::size_t per_class, std::uint64_t seed);

inline constexpr std::size_t kCifarImageBytes = 3072;
inline constexpr std::size_t kCifarRecordBytes = 3073;
inline constexpr std::size_t kCifarClasses = 10;

/// Reads a CIFAR-10 binary batch. Pixels are scaled to byte/255.
LabeledDataset load_cifar10_binary(const std::filesystem::path& path);

/// Concatenates several CIFAR-10 binary batches in order.
LabeledDataset load_cifar10_binary(std::span<const std::filesystem::path> paths);

/// Inverse of load_cifar10_binary: writes round(255*x) pixel bytes.
void write_cifar10_binary(const std::filesystem::path& path, const LabeledDataset& dataset);

}  // namespace lobmix
