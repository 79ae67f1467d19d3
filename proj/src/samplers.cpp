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

#include "lobmix/samplers.hpp"

#include <stdexcept>
#include <string>

namespace lobmix {

std::string_view to_string(SamplerKind kind) {
  return kind == SamplerKind::instance_balanced ? "instance_balanced" : "class_balanced";
}

std::string_view short_name(SamplerKind kind) {
  return kind == SamplerKind::instance_balanced ? "ib" : "cb";
}

SamplerKind parse_sampler_kind(std::string_view text) {
  if (text == "ib" || text == "instance_balanced") return SamplerKind::instance_balanced;
  if (text == "cb" || text == "class_balanced") return SamplerKind::class_balanced;
  throw std::invalid_argument("unknown sampler kind '" + std::string(text) + "'");
}

Rational SamplingDistribution::total_mass() const {
  Rational sum;
  for (const auto& q : class_mass) sum += q;
  return sum;
}

namespace {

void require_sampleable(SamplerKind kind, const ClassIndex& index) {
  if (index.total() == 0) throw std::invalid_argument("cannot sample from an empty dataset");
  if (kind == SamplerKind::class_balanced) {
    for (std::size_t k = 0; k < index.num_classes(); ++k) {
      if (index.class_size(k) == 0) {
        throw std::invalid_argument("class-balanced sampling needs every class populated; class " +
                                    std::to_string(k) + " is empty");
      }
    }
  }
}

Rational example_probability(SamplerKind kind, const ClassIndex& index, std::size_t k) {
  if (kind == SamplerKind::instance_balanced) return Rational(1, index.total());
  return Rational(1, index.class_size(k) * index.num_classes());
}

}  // namespace

SamplingDistribution selection_probability(SamplerKind kind, const ClassIndex& index) {
  require_sampleable(kind, index);
  SamplingDistribution dist;
  dist.probs.assign(index.total(), 0.0);
  dist.class_mass.assign(index.num_classes(), Rational{});
  for (std::size_t k = 0; k < index.num_classes(); ++k) {
    if (index.class_size(k) == 0) continue;
    const Rational p = example_probability(kind, index, k);
    const double p_double = p.to_double();
    Rational mass;
    for (std::size_t i : index.members(k)) {
      dist.probs[i] = p_double;
      mass += p;
    }
    dist.class_mass[k] = mass;
  }
  return dist;
}

std::vector<Rational> class_mass(SamplerKind kind, const ClassIndex& index) {
  require_sampleable(kind, index);
  std::vector<Rational> mass(index.num_classes());
  for (std::size_t k = 0; k < index.num_classes(); ++k) {
    mass[k] = kind == SamplerKind::instance_balanced ? Rational(index.class_size(k), index.total())
                                                     : Rational(1, index.num_classes());
  }
  return mass;
}

Sampler::Sampler(SamplerKind kind, std::shared_ptr<const ClassIndex> index, std::uint64_t stream_seed)
    : kind_(kind), index_(std::move(index)), rng_(stream_seed) {
  if (!index_) throw std::invalid_argument("Sampler needs a ClassIndex");
  require_sampleable(kind_, *index_);
}

std::size_t Sampler::next_index() {
  ++draws_;
  if (kind_ == SamplerKind::instance_balanced) return rng_.uniform_below(index_->total());
  const std::size_t k = rng_.uniform_below(index_->num_classes());
  const auto& members = index_->members(k);
  return members[rng_.uniform_below(members.size())];
}

std::vector<std::size_t> Sampler::sample_batch(std::size_t batch_size) {
  if (batch_size == 0) throw std::invalid_argument("sample_batch: batch size must be >= 1");
  std::vector<std::size_t> out(batch_size);
  for (auto& i : out) i = next_index();
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> pair_stream(Sampler& s1, Sampler& s2, std::size_t batch_size) {
  if (&s1 == &s2 || s1.stream_seed() == s2.stream_seed()) {
    throw std::invalid_argument("pair_stream: samplers must use independent streams");
  }
  if (batch_size == 0) throw std::invalid_argument("pair_stream: batch size must be >= 1");
  std::vector<std::pair<std::size_t, std::size_t>> pairs(batch_size);
  for (auto& [a, b] : pairs) {
    a = s1.next_index();
    b = s2.next_index();
  }
  return pairs;
}

}  // namespace lobmix
