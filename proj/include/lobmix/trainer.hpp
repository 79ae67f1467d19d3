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
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lobmix/longtail_data.hpp"
#include "lobmix/mixer.hpp"

namespace lobmix {

enum class Architecture { linear, mlp1 };

std::string_view to_string(Architecture arch);
Architecture parse_architecture(std::string_view text);

/// Softmax classifier weights. Linear: logits = W1 x + b1 (W1 is C x D).
/// mlp1: logits = W2 tanh(W1 x + b1) + b2 (W1 is H x D, W2 is C x H).
struct ModelParams {
  Architecture arch = Architecture::linear;
  std::size_t input_dim = 0;
  std::size_t hidden = 0;
  std::size_t num_classes = 0;
  std::vector<double> w1, b1, w2, b2;

  static ModelParams zeros(Architecture arch, std::size_t input_dim, std::size_t num_classes, std::size_t hidden = 0);

  std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
  std::vector<double> flat() const;
  void set_flat(std::span<const double> values);

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Class probabilities (softmax of the logits). Throws on non-finite input.
std::vector<double> forward(const ModelParams& params, std::span<const double> x);

/// -sum_k target_k log(probs_k), with probs clamped below at 1e-12.
double soft_cross_entropy(std::span<const double> probs, std::span<const double> target);

/// Dense training batch: features (n x D) and soft targets (n x C), row-major.
struct SoftBatch {
  std::size_t dim = 0;
  std::size_t num_classes = 0;
  std::vector<double> features;
  std::vector<double> targets;

  std::size_t size() const { return dim == 0 ? 0 : features.size() / dim; }
  std::span<const double> x(std::size_t n) const { return {features.data() + n * dim, dim}; }
  std::span<const double> t(std::size_t n) const { return {targets.data() + n * num_classes, num_classes}; }
};

/// Requires a batch built with features.
SoftBatch to_soft_batch(const MixedBatch& batch);

struct LossAndGradient {
  double loss = 0.0;
  ModelParams grad;  // same layout as the parameters
};

/// Mean soft cross-entropy over the batch and its exact gradient.
LossAndGradient loss_and_grad(const ModelParams& params, const SoftBatch& batch);
double mean_loss(const ModelParams& params, const SoftBatch& batch);
ModelParams grad(const ModelParams& params, const MixedBatch& batch);

enum class StrategyKind { erm, mixup, lob, deferred };

std::string_view to_string(StrategyKind kind);
StrategyKind parse_strategy(std::string_view text);

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batches_per_epoch = 0;  // 0: ceil(N / batch_size), i.e. N draws per sampler
  std::size_t batch_size = 64;
  double lr = 0.1;
  std::vector<std::size_t> lr_decay_epochs{20, 25};
  double lr_decay_factor = 0.1;
  double alpha = kDefaultAlpha;
  StrategyKind strategy = StrategyKind::mixup;
  std::optional<std::size_t> defer_epoch;  // deferred only; defaults to the first decay epoch
  double momentum = 0.0;
  double weight_decay = 0.0;
  Architecture arch = Architecture::linear;
  std::size_t hidden = 32;
  bool standardize = true;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
  /// Epoch (0-based) from which a deferred run mixes with LOB batches.
  std::size_t resolved_defer_epoch() const;
  /// Learning rate in effect during `epoch` (0-based).
  double lr_at(std::size_t epoch) const;

  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Initial parameters for `cfg`: zeros for linear, scaled Gaussian for mlp1.
ModelParams initial_params(const TrainConfig& cfg, std::size_t input_dim, std::size_t num_classes);

enum class ClassGroup { head, medium, tail };

/// Ranks classes by size: the largest max(1, C/3) are head, the smallest
/// max(1, C/3) are tail, the rest medium.
std::vector<ClassGroup> groups_by_size(std::span<const std::size_t> class_sizes);

struct EvalReport {
  std::vector<double> per_class_recall;
  double balanced_accuracy = 0.0;
  double overall_accuracy = 0.0;
  std::optional<double> head_accuracy;  // absent when the group has no classes
  std::optional<double> medium_accuracy;
  std::optional<double> tail_accuracy;

  nlohmann::json to_json() const;
};

/// Argmax predictions scored per class. Every class must appear in `test`.
EvalReport evaluate(const ModelParams& params, const LabeledDataset& test, std::span<const ClassGroup> groups);

struct EpochRecord {
  std::size_t epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double balanced_acc = 0.0;
  std::optional<double> head_acc, med_acc, tail_acc;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

void write_history_csv(std::ostream& out, std::span<const EpochRecord> history);

struct TrainResult {
  ModelParams params;  // applies to raw (unstandardised) features
  std::vector<EpochRecord> history;
  std::vector<ClassGroup> groups;
};

class DivergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Called with every mixed batch used for an SGD step, with its epoch.
using BatchObserver = std::function<void(const MixedBatch&, std::size_t epoch)>;

/**
 * SGD on mean soft cross-entropy.
 *
 * erm draws instance-balanced one-hot batches; mixup draws IB+IB mixed
 * batches; lob draws CB+CB; deferred draws IB+IB before the defer epoch and
 * CB+CB from it on, with optimizer state carried across the switch. All
 * streams derive from cfg.seed, so a deferred run and a mixup run with the
 * same seed agree exactly before the switch.
 */
TrainResult train(const LabeledDataset& train_set, const LabeledDataset& test_set, const TrainConfig& cfg,
                  const BatchObserver& observer = {});

}  // namespace lobmix
