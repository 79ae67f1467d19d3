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

#include "lobmix/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lobmix/csv.hpp"

namespace lobmix {

std::string_view to_string(MixKind kind) { return kind == MixKind::vanilla ? "vanilla" : "lob"; }

MixKind parse_mix_kind(std::string_view text) {
  if (text == "vanilla" || text == "mixup") return MixKind::vanilla;
  if (text == "lob") return MixKind::lob;
  throw std::invalid_argument("unknown mix kind '" + std::string(text) + "'");
}

void MixConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("mixup alpha must be > 0");
}

double sample_lambda(double alpha, Rng& rng) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("mixup alpha must be > 0");
  // Beta(a, a) = X / (X + Y) = 1 / (1 + exp(log Y - log X)) for X, Y ~ Gamma(a).
  const double log_x = rng.log_gamma(alpha);
  const double log_y = rng.log_gamma(alpha);
  const double lambda = 1.0 / (1.0 + std::exp(log_y - log_x));
  return std::clamp(lambda, kLambdaEpsilon, 1.0 - kLambdaEpsilon);
}

namespace {

struct Weights {
  bool i_is_major;
  double major;  // >= 0.5
  double minor;  // exactly 1 - major
};

Weights split_weights(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("mixing ratio must lie in (0, 1), got " + std::to_string(lambda));
  }
  if (lambda >= 0.5) return {true, lambda, 1.0 - lambda};
  const double major = 1.0 - lambda;
  return {false, major, 1.0 - major};
}

SoftLabel make_label(std::uint32_t class_i, std::uint32_t class_j, const Weights& w, std::size_t num_classes) {
  if (class_i >= num_classes || class_j >= num_classes) throw std::invalid_argument("class id out of range");
  SoftLabel label{std::vector<double>(num_classes, 0.0)};
  if (class_i == class_j) {
    label.weights[class_i] = 1.0;
  } else {
    label.weights[w.i_is_major ? class_i : class_j] = w.major;
    label.weights[w.i_is_major ? class_j : class_i] = w.minor;
  }
  return label;
}

}  // namespace

MixedExample mix_labels(std::uint32_t class_i, std::uint32_t class_j, double lambda, std::size_t num_classes) {
  const Weights w = split_weights(lambda);
  MixedExample ex;
  ex.label = make_label(class_i, class_j, w, num_classes);
  ex.lambda = w.i_is_major ? w.major : w.minor;
  ex.src.class_i = class_i;
  ex.src.class_j = class_j;
  return ex;
}

MixedExample mix_pair(std::span<const double> x_i, std::uint32_t class_i, std::span<const double> x_j,
                      std::uint32_t class_j, double lambda, std::size_t num_classes) {
  if (x_i.size() != x_j.size()) {
    throw std::invalid_argument("mix_pair: feature dimensions differ (" + std::to_string(x_i.size()) + " vs " +
                                std::to_string(x_j.size()) + ")");
  }
  MixedExample ex = mix_labels(class_i, class_j, lambda, num_classes);
  const Weights w = split_weights(lambda);
  const auto major = w.i_is_major ? x_i : x_j;
  const auto minor = w.i_is_major ? x_j : x_i;
  ex.features.resize(x_i.size());
  for (std::size_t d = 0; d < x_i.size(); ++d) {
    const double v = w.major * major[d] + w.minor * minor[d];
    ex.features[d] = std::clamp(v, std::min(major[d], minor[d]), std::max(major[d], minor[d]));
  }
  return ex;
}

BatchStream::BatchStream(const LabeledDataset& dataset, std::shared_ptr<const ClassIndex> index, SamplerKind first,
                         SamplerKind second, double alpha, std::uint64_t seed, bool with_features)
    : dataset_(dataset),
      s1_(first, index, derive_seed(seed, "sampler-1")),
      s2_(second, index, derive_seed(seed, "sampler-2")),
      lambda_rng_(derive_seed(seed, "lambda")),
      meta_{first, second, alpha, seed, dataset.num_classes()},
      with_features_(with_features) {
  MixConfig{alpha, MixKind::vanilla}.validate();
  if (index->total() != dataset.size()) throw std::invalid_argument("BatchStream: index does not match dataset");
}

MixedBatch BatchStream::next_batch(std::size_t batch_size) {
  if (batch_size == 0) throw std::invalid_argument("batch size must be >= 1");
  MixedBatch batch;
  batch.meta = meta_;
  batch.examples.reserve(batch_size);
  const std::size_t c = dataset_.num_classes();
  for (std::size_t n = 0; n < batch_size; ++n) {
    const std::size_t i = s1_.next_index();
    const std::size_t j = s2_.next_index();
    const double lambda = sample_lambda(meta_.alpha, lambda_rng_);
    MixedExample ex = with_features_
                          ? mix_pair(dataset_.row(i), dataset_.label(i), dataset_.row(j), dataset_.label(j), lambda, c)
                          : mix_labels(dataset_.label(i), dataset_.label(j), lambda, c);
    ex.src.index_i = i;
    ex.src.index_j = j;
    batch.examples.push_back(std::move(ex));
  }
  return batch;
}

MixedBatch make_batch_vanilla(const LabeledDataset& dataset, std::shared_ptr<const ClassIndex> index,
                              std::size_t batch_size, const MixConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (cfg.kind != MixKind::vanilla) throw std::invalid_argument("make_batch_vanilla needs a vanilla MixConfig");
  BatchStream stream(dataset, std::move(index), SamplerKind::instance_balanced, SamplerKind::instance_balanced,
                     cfg.alpha, seed);
  return stream.next_batch(batch_size);
}

MixedBatch make_batch_lob(const LabeledDataset& dataset, std::shared_ptr<const ClassIndex> index,
                          std::size_t batch_size, const MixConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (cfg.kind != MixKind::lob) throw std::invalid_argument("make_batch_lob needs a lob MixConfig");
  BatchStream stream(dataset, std::move(index), SamplerKind::class_balanced, SamplerKind::class_balanced,
                     cfg.alpha, seed);
  return stream.next_batch(batch_size);
}

void write_batch_audit_csv(std::ostream& out, const MixedBatch& batch) {
  out << "lambda,src_i,src_j,class_i,class_j\n";
  for (const auto& ex : batch.examples) {
    out << format_float(ex.lambda) << ',' << ex.src.index_i << ',' << ex.src.index_j << ',' << ex.src.class_i << ','
        << ex.src.class_j << '\n';
  }
}

}  // namespace lobmix
