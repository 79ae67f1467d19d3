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

#include "lobmix/longtail_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <stdexcept>

#include "lobmix/rng.hpp"

namespace lobmix {

namespace {

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

void check_profile_args(std::size_t n_max, std::size_t num_classes, double rho) {
  if (num_classes < 2) throw std::invalid_argument("profile needs at least 2 classes");
  ImbalanceProfile{ProfileKind::exponential, rho, n_max}.validate();
}

ClassCounts finish_counts(std::vector<std::size_t> counts) {
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) {
      throw std::invalid_argument("profile rounds class " + std::to_string(k) + " to zero examples");
    }
  }
  return ClassCounts(std::move(counts));
}

}  // namespace

ClassCounts::ClassCounts(std::vector<std::size_t> counts) : counts_(std::move(counts)) {
  if (counts_.size() < 2) throw std::invalid_argument("ClassCounts needs at least 2 classes");
  for (std::size_t c : counts_) {
    if (c == 0) throw std::invalid_argument("ClassCounts entries must be >= 1");
  }
}

std::size_t ClassCounts::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::string_view to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::exponential: return "exponential";
    case ProfileKind::pareto: return "pareto";
    case ProfileKind::step: return "step";
  }
  return "unknown";
}

ProfileKind parse_profile_kind(std::string_view text) {
  if (text == "exponential" || text == "exp") return ProfileKind::exponential;
  if (text == "pareto") return ProfileKind::pareto;
  if (text == "step") return ProfileKind::step;
  throw std::invalid_argument("unknown imbalance profile '" + std::string(text) + "'");
}

void ImbalanceProfile::validate() const {
  if (!(rho >= 1.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("imbalance ratio rho must be >= 1");
  }
  if (static_cast<double>(n_max) < rho) {
    throw std::invalid_argument("n_max must be >= rho so the smallest class keeps an example");
  }
}

ClassCounts exponential_counts(std::size_t n_max, std::size_t num_classes, double rho) {
  check_profile_args(n_max, num_classes, rho);
  std::vector<std::size_t> counts(num_classes);
  const double steps = static_cast<double>(num_classes - 1);
  for (std::size_t k = 0; k < num_classes; ++k) {
    counts[k] = round_half_up(static_cast<double>(n_max) * std::pow(rho, -static_cast<double>(k) / steps));
  }
  // Pin the endpoints to the profile definition rather than to pow() rounding.
  counts.front() = n_max;
  counts.back() = round_half_up(static_cast<double>(n_max) / rho);
  return finish_counts(std::move(counts));
}

ClassCounts pareto_counts(std::size_t n_max, std::size_t num_classes, double rho) {
  check_profile_args(n_max, num_classes, rho);
  const double shape = std::log(rho) / std::log(static_cast<double>(num_classes));
  std::vector<std::size_t> counts(num_classes);
  for (std::size_t k = 0; k < num_classes; ++k) {
    counts[k] = round_half_up(static_cast<double>(n_max) * std::pow(static_cast<double>(k + 1), -shape));
  }
  counts.front() = n_max;
  counts.back() = round_half_up(static_cast<double>(n_max) / rho);
  return finish_counts(std::move(counts));
}

ClassCounts step_counts(std::size_t n_max, std::size_t num_classes, double rho) {
  check_profile_args(n_max, num_classes, rho);
  const std::size_t minority = num_classes / 2;
  std::vector<std::size_t> counts(num_classes, n_max);
  const std::size_t small = round_half_up(static_cast<double>(n_max) / rho);
  std::fill(counts.end() - static_cast<std::ptrdiff_t>(minority), counts.end(), small);
  return finish_counts(std::move(counts));
}

ClassCounts make_counts(const ImbalanceProfile& profile, std::size_t num_classes) {
  switch (profile.kind) {
    case ProfileKind::exponential: return exponential_counts(profile.n_max, num_classes, profile.rho);
    case ProfileKind::pareto: return pareto_counts(profile.n_max, num_classes, profile.rho);
    case ProfileKind::step: return step_counts(profile.n_max, num_classes, profile.rho);
  }
  throw std::invalid_argument("unknown profile kind");
}

double imbalance_ratio(const ClassCounts& counts) {
  const auto [lo, hi] = std::minmax_element(counts.values().begin(), counts.values().end());
  return static_cast<double>(*hi) / static_cast<double>(*lo);
}

// ---------------------------------------------------------------------------
// LabeledDataset / ClassIndex

LabeledDataset::LabeledDataset(std::size_t dim, std::size_t num_classes, std::vector<double> features,
                               std::vector<std::uint32_t> labels)
    : dim_(dim), num_classes_(num_classes), features_(std::move(features)), labels_(std::move(labels)) {
  if (num_classes_ == 0) throw std::invalid_argument("dataset needs at least one class");
  if (features_.size() != dim_ * labels_.size()) {
    throw std::invalid_argument("feature matrix size does not match rows x dim");
  }
  for (std::uint32_t y : labels_) {
    if (y >= num_classes_) throw std::invalid_argument("label out of range: " + std::to_string(y));
  }
}

std::vector<std::size_t> LabeledDataset::class_sizes() const {
  std::vector<std::size_t> sizes(num_classes_, 0);
  for (std::uint32_t y : labels_) ++sizes[y];
  return sizes;
}

LabeledDataset LabeledDataset::select(std::span<const std::size_t> indices) const {
  std::vector<double> features;
  features.reserve(indices.size() * dim_);
  std::vector<std::uint32_t> labels;
  labels.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= size()) throw std::out_of_range("select: index " + std::to_string(i) + " out of range");
    const auto r = row(i);
    features.insert(features.end(), r.begin(), r.end());
    labels.push_back(labels_[i]);
  }
  return LabeledDataset(dim_, num_classes_, std::move(features), std::move(labels));
}

ClassIndex::ClassIndex(std::span<const std::uint32_t> labels, std::size_t num_classes)
    : per_class_(num_classes), labels_(labels.begin(), labels.end()) {
  if (num_classes == 0) throw std::invalid_argument("ClassIndex needs at least one class");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= num_classes) throw std::invalid_argument("ClassIndex: label out of range");
    per_class_[labels_[i]].push_back(i);
  }
}

ClassIndex::ClassIndex(const LabeledDataset& dataset) : ClassIndex(dataset.labels(), dataset.num_classes()) {}

std::vector<std::size_t> ClassIndex::class_sizes() const {
  std::vector<std::size_t> sizes;
  sizes.reserve(per_class_.size());
  for (const auto& m : per_class_) sizes.push_back(m.size());
  return sizes;
}

// ---------------------------------------------------------------------------
// Manifest

nlohmann::json DatasetManifest::to_json() const {
  return {
      {"source", source},
      {"profile", {{"kind", to_string(profile.kind)}, {"rho", profile.rho}, {"n_max", profile.n_max}}},
      {"seed", seed},
      {"counts", counts.values()},
      {"kept_indices", kept_indices},
  };
}

DatasetManifest DatasetManifest::from_json(const nlohmann::json& j) {
  DatasetManifest m;
  m.source = j.at("source");
  const auto& p = j.at("profile");
  m.profile.kind = parse_profile_kind(p.at("kind").get<std::string>());
  m.profile.rho = p.at("rho").get<double>();
  m.profile.n_max = p.at("n_max").get<std::size_t>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.counts = ClassCounts(j.at("counts").get<std::vector<std::size_t>>());
  m.kept_indices = j.at("kept_indices").get<std::vector<std::vector<std::size_t>>>();
  if (m.kept_indices.size() != m.counts.num_classes()) {
    throw std::invalid_argument("manifest: kept_indices has wrong number of classes");
  }
  for (std::size_t k = 0; k < m.kept_indices.size(); ++k) {
    if (m.kept_indices[k].size() != m.counts[k]) {
      throw std::invalid_argument("manifest: kept_indices[" + std::to_string(k) + "] disagrees with counts");
    }
  }
  return m;
}

void DatasetManifest::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest " + path.string());
  out << to_json().dump(1) << '\n';
  if (!out) throw std::runtime_error("failed writing manifest " + path.string());
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path.string());
  return from_json(nlohmann::json::parse(in));
}

// ---------------------------------------------------------------------------
// Subsampling

std::pair<LabeledDataset, DatasetManifest> subsample_longtail(const LabeledDataset& base,
                                                              const ClassCounts& counts,
                                                              std::uint64_t seed) {
  if (counts.num_classes() != base.num_classes()) {
    throw std::invalid_argument("subsample: counts cover " + std::to_string(counts.num_classes()) +
                                " classes but base has " + std::to_string(base.num_classes()));
  }
  const ClassIndex index(base);
  Rng rng(derive_seed(seed, "subsample"));

  DatasetManifest manifest;
  manifest.seed = seed;
  manifest.counts = counts;
  manifest.profile.rho = imbalance_ratio(counts);
  manifest.profile.n_max = *std::max_element(counts.values().begin(), counts.values().end());
  manifest.kept_indices.resize(counts.num_classes());

  for (std::size_t k = 0; k < counts.num_classes(); ++k) {
    std::vector<std::size_t> pool = index.members(k);
    if (pool.size() < counts[k]) {
      throw std::invalid_argument("subsample: class " + std::to_string(k) + " has " +
                                  std::to_string(pool.size()) + " examples, need " + std::to_string(counts[k]));
    }
    // Partial Fisher-Yates: the first counts[k] slots end up a uniform sample.
    for (std::size_t i = 0; i < counts[k]; ++i) {
      const std::size_t j = i + rng.uniform_below(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(counts[k]);
    std::sort(pool.begin(), pool.end());
    manifest.kept_indices[k] = std::move(pool);
  }
  return {apply_manifest(base, manifest), std::move(manifest)};
}

LabeledDataset apply_manifest(const LabeledDataset& base, const DatasetManifest& manifest) {
  std::vector<std::size_t> all;
  for (std::size_t k = 0; k < manifest.kept_indices.size(); ++k) {
    for (std::size_t i : manifest.kept_indices[k]) {
      if (i >= base.size() || base.label(i) != k) {
        throw std::invalid_argument("manifest index " + std::to_string(i) + " does not belong to class " +
                                    std::to_string(k) + " of the base dataset");
      }
      all.push_back(i);
    }
  }
  std::sort(all.begin(), all.end());
  return base.select(all);
}

// ---------------------------------------------------------------------------
// Synthetic data

std::vector<std::vector<double>> synth_centers(std::size_t num_classes, std::size_t dim, double separation,
                                               std::uint64_t seed) {
  if (dim < 2) throw std::invalid_argument("synth: dim must be >= 2");
  if (!(separation > 0.0)) throw std::invalid_argument("synth: separation must be > 0");
  Rng rng(derive_seed(seed, "centers"));
  std::vector<std::vector<double>> centers(num_classes, std::vector<double>(dim));
  for (auto& c : centers) {
    double norm2 = 0.0;
    while (norm2 == 0.0) {
      for (double& v : c) v = rng.normal();
      norm2 = std::inner_product(c.begin(), c.end(), c.begin(), 0.0);
    }
    const double scale = separation / std::sqrt(norm2);
    for (double& v : c) v *= scale;
  }
  return centers;
}

LabeledDataset synth_gaussian_mixture(std::size_t num_classes, std::span<const std::size_t> counts,
                                      std::size_t dim, double separation, std::uint64_t seed) {
  if (counts.size() != num_classes) throw std::invalid_argument("synth: counts length must equal C");
  const auto centers = synth_centers(num_classes, dim, separation, seed);
  Rng rng(derive_seed(seed, "points"));
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  std::vector<double> features;
  features.reserve(total * dim);
  std::vector<std::uint32_t> labels;
  labels.reserve(total);
  for (std::size_t k = 0; k < num_classes; ++k) {
    for (std::size_t n = 0; n < counts[k]; ++n) {
      for (std::size_t d = 0; d < dim; ++d) features.push_back(centers[k][d] + rng.normal());
      labels.push_back(static_cast<std::uint32_t>(k));
    }
  }
  return LabeledDataset(dim, num_classes, std::move(features), std::move(labels));
}

std::pair<LabeledDataset, LabeledDataset> holdout_split(const LabeledDataset& dataset, std::size_t per_class,
                                                        std::uint64_t seed) {
  const ClassIndex index(dataset);
  Rng rng(derive_seed(seed, "holdout"));
  std::vector<std::size_t> held, kept;
  for (std::size_t k = 0; k < index.num_classes(); ++k) {
    std::vector<std::size_t> pool = index.members(k);
    if (pool.size() < per_class) {
      throw std::invalid_argument("holdout: class " + std::to_string(k) + " has too few examples");
    }
    for (std::size_t i = 0; i < per_class; ++i) {
      const std::size_t j = i + rng.uniform_below(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    held.insert(held.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(per_class));
    kept.insert(kept.end(), pool.begin() + static_cast<std::ptrdiff_t>(per_class), pool.end());
  }
  std::sort(held.begin(), held.end());
  std::sort(kept.begin(), kept.end());
  return {dataset.select(kept), dataset.select(held)};
}

// ---------------------------------------------------------------------------
// CIFAR-10 binary

LabeledDataset load_cifar10_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open CIFAR-10 file " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % kCifarRecordBytes != 0) {
    throw std::runtime_error("truncated CIFAR-10 file " + path.string() + ": " + std::to_string(bytes.size()) +
                             " bytes is not a multiple of " + std::to_string(kCifarRecordBytes));
  }
  const std::size_t records = bytes.size() / kCifarRecordBytes;
  std::vector<double> features(records * kCifarImageBytes);
  std::vector<std::uint32_t> labels(records);
  for (std::size_t r = 0; r < records; ++r) {
    const unsigned char* rec = bytes.data() + r * kCifarRecordBytes;
    if (rec[0] >= kCifarClasses) {
      throw std::runtime_error("CIFAR-10 record " + std::to_string(r) + " has label byte " +
                               std::to_string(rec[0]));
    }
    labels[r] = rec[0];
    double* out = features.data() + r * kCifarImageBytes;
    for (std::size_t p = 0; p < kCifarImageBytes; ++p) out[p] = rec[1 + p] / 255.0;
  }
  return LabeledDataset(kCifarImageBytes, kCifarClasses, std::move(features), std::move(labels));
}

LabeledDataset load_cifar10_binary(std::span<const std::filesystem::path> paths) {
  std::vector<double> features;
  std::vector<std::uint32_t> labels;
  for (const auto& p : paths) {
    const LabeledDataset part = load_cifar10_binary(p);
    features.insert(features.end(), part.features().begin(), part.features().end());
    labels.insert(labels.end(), part.labels().begin(), part.labels().end());
  }
  return LabeledDataset(kCifarImageBytes, kCifarClasses, std::move(features), std::move(labels));
}

void write_cifar10_binary(const std::filesystem::path& path, const LabeledDataset& dataset) {
  if (dataset.dim() != kCifarImageBytes) throw std::invalid_argument("CIFAR-10 rows must have 3072 values");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::vector<char> rec(kCifarRecordBytes);
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    if (dataset.label(r) >= kCifarClasses) throw std::invalid_argument("CIFAR-10 label out of range");
    rec[0] = static_cast<char>(dataset.label(r));
    const auto row = dataset.row(r);
    for (std::size_t p = 0; p < kCifarImageBytes; ++p) {
      const double v = std::clamp(row[p], 0.0, 1.0);
      rec[1 + p] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
    }
    out.write(rec.data(), static_cast<std::streamsize>(rec.size()));
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace lobmix
