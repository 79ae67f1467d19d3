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
#include <string_view>
#include <utility>
#include <vector>

#include "lobmix/longtail_data.hpp"
#include "lobmix/rational.hpp"
#include "lobmix/rng.hpp"

namespace lobmix {

enum class SamplerKind { instance_balanced, class_balanced };

std::string_view to_string(SamplerKind kind);
std::string_view short_name(SamplerKind kind);  // "ib" / "cb"
/// Accepts "ib", "cb", "instance_balanced", "class_balanced".
SamplerKind parse_sampler_kind(std::string_view text);

/// Per-example selection probabilities P_i, plus the exact per-class mass
/// sum_{i in I(k)} P_i kept as fractions.
struct SamplingDistribution {
  std::vector<double> probs;
  std::vector<Rational> class_mass;

  Rational total_mass() const;
};

/// class_balanced: P_i = 1/(n_k C) for i in I(k). instance_balanced: P_i = 1/N.
/// Class-balanced sampling requires every class to be nonempty.
SamplingDistribution selection_probability(SamplerKind kind, const ClassIndex& index);

/// Exact class mass q_k of a sampler without materialising per-example P_i.
std::vector<Rational> class_mass(SamplerKind kind, const ClassIndex& index);

/**
 * With-replacement sampler over a ClassIndex.
 *
 * Class-balanced draws are two-stage: a class uniformly from 0..C-1, then an
 * example uniformly from that class. Instance-balanced draws pick uniformly
 * over all N examples. Single owner; not safe to share mid-stream.
 */
class Sampler {
public:
  Sampler(SamplerKind kind, std::shared_ptr<const ClassIndex> index, std::uint64_t stream_seed);

  std::size_t next_index();
  std::vector<std::size_t> sample_batch(std::size_t batch_size);

  SamplerKind kind() const { return kind_; }
  std::uint64_t stream_seed() const { return rng_.seed(); }
  std::uint64_t draws() const { return draws_; }
  const ClassIndex& index() const { return *index_; }

private:
  SamplerKind kind_;
  std::shared_ptr<const ClassIndex> index_;
  Rng rng_;
  std::uint64_t draws_ = 0;
};

/// B pairs, first element from s1 and second from s2. The two samplers must
/// be distinct objects on distinct streams.
std::vector<std::pair<std::size_t, std::size_t>> pair_stream(Sampler& s1, Sampler& s2, std::size_t batch_size);

}  // namespace lobmix
