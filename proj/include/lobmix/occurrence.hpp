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
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lobmix/longtail_data.hpp"
#include "lobmix/mixer.hpp"
#include "lobmix/rational.hpp"
#include "lobmix/samplers.hpp"

namespace lobmix {

/// The pair of samplers feeding the mixer, e.g. IB+IB for vanilla mixup.
struct SamplerCombo {
  SamplerKind first = SamplerKind::instance_balanced;
  SamplerKind second = SamplerKind::instance_balanced;
  double alpha = kDefaultAlpha;

  /// "ib-ib", "ib-cb", "cb-ib" or "cb-cb".
  std::string name() const;
  static SamplerCombo parse(std::string_view text, double alpha = kDefaultAlpha);
  /// The three combos of the sampler ablation: IB+IB, IB+CB, CB+CB.
  static std::vector<SamplerCombo> ablation(double alpha);
};

/// Label-occurrence ratios gamma_k: the share of total mixing-ratio mass
/// carried by each class.
struct OccurrenceReport {
  std::vector<double> gamma;
  std::optional<double> balance_ratio;  // absent if some class has gamma_k = 0
  std::size_t sample_count = 0;         // 0 for analytic reports
  std::optional<double> head_incidence;
};

class UnrepresentedClassError : public std::runtime_error {
public:
  explicit UnrepresentedClassError(std::size_t cls)
      : std::runtime_error("class " + std::to_string(cls) + " never occurs (gamma = 0)"), cls_(cls) {}
  std::size_t cls() const { return cls_; }

private:
  std::size_t cls_;
};

/// Exact expected gamma_k = (q1_k + q2_k) / 2, q = per-sampler class mass.
/// Independent of alpha since E[lambda] = 1/2 under Beta(alpha, alpha).
std::vector<Rational> analytic_gamma_exact(const SamplerCombo& combo, const ClassIndex& index);

/// analytic_gamma_exact as a report; balance ratio computed exactly.
OccurrenceReport analytic_gamma(const SamplerCombo& combo, const ClassIndex& index);

/// Expected fraction of mixed examples with at least one source in `head_set`:
/// 1 - (1 - h1)(1 - h2), h = head mass under each sampler.
double analytic_head_incidence(const SamplerCombo& combo, const ClassIndex& index,
                               const std::set<std::uint32_t>& head_set);

/**
 * Streaming accumulator of lambda mass per class and of (class_i, class_j)
 * pair counts. Tallies from separate workers merge associatively.
 */
class OccurrenceTally {
public:
  explicit OccurrenceTally(std::size_t num_classes);

  void add(const MixedExample& example);
  void add(const MixedBatch& batch);
  void merge(const OccurrenceTally& other);

  std::size_t num_classes() const { return num_classes_; }
  std::size_t sample_count() const { return samples_; }

  /// gamma_k = class mass / total mass.
  std::vector<double> gamma() const;
  /// Monte-Carlo standard error of each gamma_k.
  std::vector<double> standard_error() const;
  /// Fraction of examples with class_i or class_j in `head_set`.
  double head_incidence(const std::set<std::uint32_t>& head_set) const;

  OccurrenceReport report() const;

private:
  struct Compensated {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x);
    double value() const { return sum + carry; }
  };

  std::size_t num_classes_;
  std::size_t samples_ = 0;
  std::vector<Compensated> mass_;
  std::vector<Compensated> mass_sq_;
  std::vector<std::uint64_t> pair_counts_;
};

/// Gamma measured over realised lambdas. Throws on empty input.
OccurrenceReport empirical_gamma(std::span<const MixedBatch> batches, std::size_t num_classes);

/// max gamma / min gamma; throws UnrepresentedClassError on a zero entry.
double balance_ratio(const OccurrenceReport& report);

/// Fraction of mixed examples with at least one source class in `head_set`.
double head_label_incidence(std::span<const MixedBatch> batches, const std::set<std::uint32_t>& head_set);

/// Classes with n_k strictly above the median class size.
std::set<std::uint32_t> default_head_set(std::span<const std::size_t> class_sizes);

/// class,n_k,gamma_analytic,gamma_empirical (empirical column left blank when absent).
void write_occurrence_csv(std::ostream& out, std::span<const std::size_t> class_sizes,
                          const OccurrenceReport& analytic, const OccurrenceReport* empirical);

}  // namespace lobmix
