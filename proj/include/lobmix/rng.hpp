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

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace lobmix {

/// SplitMix64 step; advances `state` and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives an independent stream seed from an experiment seed and a label
/// such as "sampler-1" or "init". Distinct labels give unrelated streams.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

/**
 * xoshiro256** generator with its own variate routines.
 *
 * All distributions are implemented here rather than through <random> so
 * that draw sequences are bit-identical across standard libraries.
 */
class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// The seed this stream was constructed from.
  std::uint64_t seed() const { return seed_; }

  /// Unbiased integer in [0, n) (Lemire's multiply-and-reject). n must be > 0.
  std::uint64_t uniform_below(std::uint64_t n);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Uniform double in (0, 1).
  double uniform_open01();

  /// Standard normal (Marsaglia polar method).
  double normal();

  /// Gamma(shape, 1). shape must be > 0.
  double gamma(double shape);

  /// log of a Gamma(shape, 1) variate; stable for very small shapes.
  double log_gamma(double shape);

private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lobmix
