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

#include "lobmix/occurrence.hpp"

#include <algorithm>
#include <cmath>

#include "lobmix/csv.hpp"

namespace lobmix {

std::string SamplerCombo::name() const {
  return std::string(short_name(first)) + "-" + std::string(short_name(second));
}

SamplerCombo SamplerCombo::parse(std::string_view text, double alpha) {
  const auto dash = text.find('-');
  if (dash == std::string_view::npos) throw std::invalid_argument("combo must look like 'ib-cb'");
  return {parse_sampler_kind(text.substr(0, dash)), parse_sampler_kind(text.substr(dash + 1)), alpha};
}

std::vector<SamplerCombo> SamplerCombo::ablation(double alpha) {
  return {{SamplerKind::instance_balanced, SamplerKind::instance_balanced, alpha},
          {SamplerKind::instance_balanced, SamplerKind::class_balanced, alpha},
          {SamplerKind::class_balanced, SamplerKind::class_balanced, alpha}};
}

std::vector<Rational> analytic_gamma_exact(const SamplerCombo& combo, const ClassIndex& index) {
  const auto q1 = class_mass(combo.first, index);
  const auto q2 = class_mass(combo.second, index);
  const Rational half(1, 2);
  std::vector<Rational> gamma(index.num_classes());
  for (std::size_t k = 0; k < gamma.size(); ++k) gamma[k] = (q1[k] + q2[k]) * half;
  return gamma;
}

OccurrenceReport analytic_gamma(const SamplerCombo& combo, const ClassIndex& index) {
  const auto exact = analytic_gamma_exact(combo, index);
  OccurrenceReport report;
  report.gamma.reserve(exact.size());
  for (const auto& g : exact) report.gamma.push_back(g.to_double());
  const auto [lo, hi] = std::minmax_element(exact.begin(), exact.end());
  if (lo->num() != 0) report.balance_ratio = (*hi / *lo).to_double();
  return report;
}

double analytic_head_incidence(const SamplerCombo& combo, const ClassIndex& index,
                               const std::set<std::uint32_t>& head_set) {
  const auto q1 = class_mass(combo.first, index);
  const auto q2 = class_mass(combo.second, index);
  Rational h1, h2;
  for (std::uint32_t k : head_set) {
    if (k >= index.num_classes()) throw std::invalid_argument("head class out of range");
    h1 += q1[k];
    h2 += q2[k];
  }
  return 1.0 - (1.0 - h1.to_double()) * (1.0 - h2.to_double());
}

// ---------------------------------------------------------------------------

void OccurrenceTally::Compensated::add(double x) {
  // Neumaier's variant of Kahan summation.
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x)) {
    carry += (sum - t) + x;
  } else {
    carry += (x - t) + sum;
  }
  sum = t;
}

OccurrenceTally::OccurrenceTally(std::size_t num_classes)
    : num_classes_(num_classes),
      mass_(num_classes),
      mass_sq_(num_classes),
      pair_counts_(num_classes * num_classes, 0) {
  if (num_classes == 0) throw std::invalid_argument("OccurrenceTally needs at least one class");
}

void OccurrenceTally::add(const MixedExample& ex) {
  if (ex.src.class_i >= num_classes_ || ex.src.class_j >= num_classes_) {
    throw std::invalid_argument("OccurrenceTally: class id out of range");
  }
  ++samples_;
  ++pair_counts_[ex.src.class_i * num_classes_ + ex.src.class_j];
  if (ex.src.class_i == ex.src.class_j) {
    mass_[ex.src.class_i].add(1.0);
    mass_sq_[ex.src.class_i].add(1.0);
  } else {
    const double li = ex.lambda;
    const double lj = 1.0 - ex.lambda;
    mass_[ex.src.class_i].add(li);
    mass_[ex.src.class_j].add(lj);
    mass_sq_[ex.src.class_i].add(li * li);
    mass_sq_[ex.src.class_j].add(lj * lj);
  }
}

void OccurrenceTally::add(const MixedBatch& batch) {
  for (const auto& ex : batch.examples) add(ex);
}

void OccurrenceTally::merge(const OccurrenceTally& other) {
  if (other.num_classes_ != num_classes_) throw std::invalid_argument("cannot merge tallies of different C");
  samples_ += other.samples_;
  for (std::size_t k = 0; k < num_classes_; ++k) {
    mass_[k].add(other.mass_[k].sum);
    mass_[k].add(other.mass_[k].carry);
    mass_sq_[k].add(other.mass_sq_[k].sum);
    mass_sq_[k].add(other.mass_sq_[k].carry);
  }
  for (std::size_t p = 0; p < pair_counts_.size(); ++p) pair_counts_[p] += other.pair_counts_[p];
}

std::vector<double> OccurrenceTally::gamma() const {
  if (samples_ == 0) throw std::logic_error("OccurrenceTally: no samples");
  // Every example contributes total mass exactly 1.
  const double total = static_cast<double>(samples_);
  std::vector<double> g(num_classes_);
  for (std::size_t k = 0; k < num_classes_; ++k) g[k] = mass_[k].value() / total;
  return g;
}

std::vector<double> OccurrenceTally::standard_error() const {
  if (samples_ < 2) throw std::logic_error("OccurrenceTally: need at least 2 samples for an error estimate");
  const double n = static_cast<double>(samples_);
  std::vector<double> se(num_classes_);
  for (std::size_t k = 0; k < num_classes_; ++k) {
    const double mean = mass_[k].value() / n;
    const double var = std::max(0.0, (mass_sq_[k].value() / n - mean * mean) * n / (n - 1.0));
    se[k] = std::sqrt(var / n);
  }
  return se;
}

double OccurrenceTally::head_incidence(const std::set<std::uint32_t>& head_set) const {
  if (head_set.empty()) throw std::invalid_argument("head set must be nonempty");
  if (samples_ == 0) throw std::logic_error("OccurrenceTally: no samples");
  std::uint64_t hits = 0;
  for (std::size_t a = 0; a < num_classes_; ++a) {
    const bool a_head = head_set.count(static_cast<std::uint32_t>(a)) != 0;
    for (std::size_t b = 0; b < num_classes_; ++b) {
      if (a_head || head_set.count(static_cast<std::uint32_t>(b)) != 0) hits += pair_counts_[a * num_classes_ + b];
    }
  }
  return static_cast<double>(hits) / static_cast<double>(samples_);
}

OccurrenceReport OccurrenceTally::report() const {
  OccurrenceReport r;
  r.gamma = gamma();
  r.sample_count = samples_;
  const auto [lo, hi] = std::minmax_element(r.gamma.begin(), r.gamma.end());
  if (*lo > 0.0) r.balance_ratio = *hi / *lo;
  return r;
}

OccurrenceReport empirical_gamma(std::span<const MixedBatch> batches, std::size_t num_classes) {
  OccurrenceTally tally(num_classes);
  for (const auto& b : batches) tally.add(b);
  if (tally.sample_count() == 0) throw std::invalid_argument("empirical_gamma: no mixed examples");
  return tally.report();
}

double balance_ratio(const OccurrenceReport& report) {
  if (report.gamma.empty()) throw std::invalid_argument("balance_ratio: empty report");
  for (std::size_t k = 0; k < report.gamma.size(); ++k) {
    if (!(report.gamma[k] > 0.0)) throw UnrepresentedClassError(k);
  }
  const auto [lo, hi] = std::minmax_element(report.gamma.begin(), report.gamma.end());
  return *hi / *lo;
}

double head_label_incidence(std::span<const MixedBatch> batches, const std::set<std::uint32_t>& head_set) {
  if (head_set.empty()) throw std::invalid_argument("head set must be nonempty");
  std::size_t total = 0, hits = 0;
  for (const auto& b : batches) {
    for (const auto& ex : b.examples) {
      ++total;
      if (head_set.count(ex.src.class_i) || head_set.count(ex.src.class_j)) ++hits;
    }
  }
  if (total == 0) throw std::invalid_argument("head_label_incidence: no mixed examples");
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::set<std::uint32_t> default_head_set(std::span<const std::size_t> class_sizes) {
  if (class_sizes.empty()) throw std::invalid_argument("default_head_set: no classes");
  std::vector<std::size_t> sorted(class_sizes.begin(), class_sizes.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double median = m % 2 ? static_cast<double>(sorted[m / 2])
                              : 0.5 * (static_cast<double>(sorted[m / 2 - 1]) + static_cast<double>(sorted[m / 2]));
  std::set<std::uint32_t> head;
  for (std::size_t k = 0; k < class_sizes.size(); ++k) {
    if (static_cast<double>(class_sizes[k]) > median) head.insert(static_cast<std::uint32_t>(k));
  }
  return head;
}

void write_occurrence_csv(std::ostream& out, std::span<const std::size_t> class_sizes,
                          const OccurrenceReport& analytic, const OccurrenceReport* empirical) {
  if (analytic.gamma.size() != class_sizes.size() || (empirical && empirical->gamma.size() != class_sizes.size())) {
    throw std::invalid_argument("write_occurrence_csv: report sizes disagree");
  }
  out << "class,n_k,gamma_analytic,gamma_empirical\n";
  for (std::size_t k = 0; k < class_sizes.size(); ++k) {
    out << k << ',' << class_sizes[k] << ',' << format_float(analytic.gamma[k]) << ',';
    if (empirical) out << format_float(empirical->gamma[k]);
    out << '\n';
  }
}

}  // namespace lobmix
