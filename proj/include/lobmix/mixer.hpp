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
#include <memory>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "lobmix/longtail_data.hpp"
#include "lobmix/rng.hpp"
#include "lobmix/samplers.hpp"

namespace lobmix {

/// Beta(alpha, alpha) shape used for large-scale benchmarks.
inline constexpr double kLargeScaleAlpha = 0.2;
/// Beta(alpha, alpha) shape used everywhere else.
inline constexpr double kDefaultAlpha = 1.0;
/// Lambda draws are kept inside [eps, 1 - eps].
inline constexpr double kLambdaEpsilon = 1e-7;

enum class MixKind { vanilla, lob };

std::string_view to_string(MixKind kind);
MixKind parse_mix_kind(std::string_view text);

struct MixConfig {
  double alpha = kDefaultAlpha;
  MixKind kind = MixKind::vanilla;

  void validate() const;
};

/// Lambda ~ Beta(alpha, alpha), clamped into [kLambdaEpsilon, 1 - kLambdaEpsilon].
double sample_lambda(double alpha, Rng& rng);

struct SoftLabel {
  std::vector<double> weights;
};

struct MixSource {
  std::size_t index_i = 0;
  std::size_t index_j = 0;
  std::uint32_t class_i = 0;
  std::uint32_t class_j = 0;
};

struct MixedExample {
  std::vector<double> features;  // empty when the batch was built without features
  SoftLabel label;
  double lambda = 0.5;  // weight carried by source i
  MixSource src;
};

struct MixMetadata {
  SamplerKind first = SamplerKind::instance_balanced;
  SamplerKind second = SamplerKind::instance_balanced;
  double alpha = kDefaultAlpha;
  std::uint64_t seed = 0;
  std::size_t num_classes = 0;
};

struct MixedBatch {
  std::vector<MixedExample> examples;
  MixMetadata meta;

  std::size_t size() const { return examples.size(); }
};

/**
 * Convex combination of two labelled examples.
 *
 * features = lambda * x_i + (1 - lambda) * x_j, label = lambda * e(class_i) +
 * (1 - lambda) * e(class_j). Arithmetic is arranged so that the heavier
 * source carries weight w >= 1/2 and the lighter one exactly 1 - w, which
 * makes mix_pair(a, b, l) and mix_pair(b, a, 1 - l) bit-identical. Features
 * are clamped into the componentwise hull of the two sources.
 */
MixedExample mix_pair(std::span<const double> x_i, std::uint32_t class_i, std::span<const double> x_j,
                      std::uint32_t class_j, double lambda, std::size_t num_classes);

/// Same mixing without features; label, lambda and classes only.
MixedExample mix_labels(std::uint32_t class_i, std::uint32_t class_j, double lambda, std::size_t num_classes);

/**
 * Endless source of mixed batches from two independent samplers.
 *
 * Per example, the first sampler, the second sampler and then the lambda
 * stream each advance once. The three streams are derived from `seed` with
 * the labels "sampler-1", "sampler-2" and "lambda". The dataset must outlive
 * the stream.
 */
class BatchStream {
public:
  BatchStream(const LabeledDataset& dataset, std::shared_ptr<const ClassIndex> index, SamplerKind first,
              SamplerKind second, double alpha, std::uint64_t seed, bool with_features = true);

  MixedBatch next_batch(std::size_t batch_size);

  const MixMetadata& metadata() const { return meta_; }

private:
  const LabeledDataset& dataset_;
  Sampler s1_;
  Sampler s2_;
  Rng lambda_rng_;
  MixMetadata meta_;
  bool with_features_;
};

/// B examples from two independent instance-balanced samplers.
MixedBatch make_batch_vanilla(const LabeledDataset& dataset, std::shared_ptr<const ClassIndex> index,
                              std::size_t batch_size, const MixConfig& cfg, std::uint64_t seed);

/// B examples from two independent class-balanced samplers.
MixedBatch make_batch_lob(const LabeledDataset& dataset, std::shared_ptr<const ClassIndex> index,
                          std::size_t batch_size, const MixConfig& cfg, std::uint64_t seed);

/// Audit dump, one row per example: lambda,src_i,src_j,class_i,class_j.
void write_batch_audit_csv(std::ostream& out, const MixedBatch& batch);

}  // namespace lobmix
