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

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "lobmix/samplers.hpp"

namespace lobmix {
namespace {

const std::vector<std::size_t> kCifar10Rho10 = {5000, 3871, 2997, 2321, 1797, 1391, 1077, 834, 646, 500};

std::shared_ptr<const ClassIndex> index_for(const std::vector<std::size_t>& counts) {
  std::vector<std::uint32_t> labels;
  for (std::size_t k = 0; k < counts.size(); ++k) labels.insert(labels.end(), counts[k], static_cast<std::uint32_t>(k));
  return std::make_shared<const ClassIndex>(labels, counts.size());
}

double neumaier_sum(const std::vector<double>& v) {
  double sum = 0.0, c = 0.0;
  for (double x : v) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

TEST(SelectionProbabilityTest, ClassBalancedIsOneOverNkC) {
  const auto index = index_for(kCifar10Rho10);
  const auto dist = selection_probability(SamplerKind::class_balanced, *index);
  for (std::size_t i : index->members(9)) ASSERT_DOUBLE_EQ(dist.probs[i], 2.0e-4);  // n_k = 500, C = 10
  for (std::size_t i : index->members(0)) ASSERT_DOUBLE_EQ(dist.probs[i], 1.0 / 50000.0);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(dist.class_mass[k], Rational(1, 10)) << k;
  EXPECT_EQ(dist.total_mass(), Rational(1, 1));
  EXPECT_NEAR(neumaier_sum(dist.probs), 1.0, 1e-12);
}

TEST(SelectionProbabilityTest, InstanceBalancedIsUniform) {
  const auto index = index_for(kCifar10Rho10);
  ASSERT_EQ(index->total(), 20434u);
  const auto dist = selection_probability(SamplerKind::instance_balanced, *index);
  for (double p : dist.probs) ASSERT_DOUBLE_EQ(p, 1.0 / 20434.0);
  EXPECT_EQ(dist.class_mass[0], Rational(5000, 20434));
  EXPECT_EQ(dist.total_mass(), Rational(1, 1));
  EXPECT_NEAR(neumaier_sum(dist.probs), 1.0, 1e-12);
}

TEST(SelectionProbabilityTest, BalancedDataMakesKindsAgree) {
  const auto index = index_for({40, 40, 40, 40});
  const auto cb = selection_probability(SamplerKind::class_balanced, *index);
  const auto ib = selection_probability(SamplerKind::instance_balanced, *index);
  EXPECT_EQ(cb.probs, ib.probs);
  EXPECT_EQ(cb.class_mass, ib.class_mass);
}

TEST(SelectionProbabilityTest, ClassMassShortcutAgrees) {
  const auto index = index_for({7, 3, 11, 1});
  for (auto kind : {SamplerKind::instance_balanced, SamplerKind::class_balanced}) {
    EXPECT_EQ(class_mass(kind, *index), selection_probability(kind, *index).class_mass);
  }
}

TEST(SelectionProbabilityTest, EmptyClassRejectedForClassBalanced) {
  const std::vector<std::uint32_t> labels = {0, 0, 2};
  const ClassIndex index(labels, 3);
  EXPECT_THROW(selection_probability(SamplerKind::class_balanced, index), std::invalid_argument);
  EXPECT_NO_THROW(selection_probability(SamplerKind::instance_balanced, index));
}

TEST(SamplerTest, ClassBalancedDrawFrequencies) {
  const auto index = index_for(kCifar10Rho10);
  Sampler s(SamplerKind::class_balanced, index, 1);
  std::vector<int> hist(10, 0);
  constexpr int draws = 1000000;
  for (int i = 0; i < draws; ++i) ++hist[index->label_of(s.next_index())];
  for (int h : hist) EXPECT_NEAR(static_cast<double>(h) / draws, 0.1, 0.001);
  EXPECT_EQ(s.draws(), static_cast<std::uint64_t>(draws));
}

TEST(SamplerTest, InstanceBalancedDrawFrequencies) {
  const auto index = index_for(kCifar10Rho10);
  Sampler s(SamplerKind::instance_balanced, index, 2);
  int class0 = 0;
  constexpr int draws = 1000000;
  for (int i = 0; i < draws; ++i) class0 += index->label_of(s.next_index()) == 0;
  const double expected = 5000.0 / 20434.0;
  EXPECT_NEAR(class0 / static_cast<double>(draws), expected, 0.02 * expected);
}

TEST(SamplerTest, PerExampleFrequenciesMatchDistribution) {
  // chi-square goodness of fit over all examples of a small long-tailed set.
  const auto index = index_for({40, 12, 5, 2});
  for (auto kind : {SamplerKind::instance_balanced, SamplerKind::class_balanced}) {
    const auto dist = selection_probability(kind, *index);
    Sampler s(kind, index, 77);
    constexpr int draws = 1000000;
    std::vector<int> hist(index->total(), 0);
    for (int i = 0; i < draws; ++i) ++hist[s.next_index()];
    double chi2 = 0.0;
    for (std::size_t i = 0; i < hist.size(); ++i) {
      const double e = dist.probs[i] * draws;
      chi2 += (hist[i] - e) * (hist[i] - e) / e;
    }
    // 58 dof, 0.999 quantile = 95.75
    EXPECT_LT(chi2, 95.75) << to_string(kind);
  }
}

TEST(SamplerTest, SingleClassAlwaysClassZero) {
  const auto index = index_for({9});
  Sampler s(SamplerKind::class_balanced, index, 5);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(index->label_of(s.next_index()), 0u);
}

TEST(SamplerTest, BatchSemantics) {
  const auto index = index_for({30, 3});
  Sampler a(SamplerKind::class_balanced, index, 8), b(SamplerKind::class_balanced, index, 8);
  EXPECT_THROW(a.sample_batch(0), std::invalid_argument);
  const auto one = a.sample_batch(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], b.next_index());
  EXPECT_EQ(a.sample_batch(64), b.sample_batch(64));
}

TEST(PairStreamTest, ClassPairFrequenciesAreProducts) {
  const auto index = index_for({500, 500});
  Sampler s1(SamplerKind::class_balanced, index, derive_seed(3, "sampler-1"));
  Sampler s2(SamplerKind::class_balanced, index, derive_seed(3, "sampler-2"));
  const auto pairs = pair_stream(s1, s2, 100000);
  std::vector<int> hist(4, 0);
  for (auto [i, j] : pairs) ++hist[index->label_of(i) * 2 + index->label_of(j)];
  for (int h : hist) EXPECT_NEAR(h / 100000.0, 0.25, 0.01);
}

TEST(PairStreamTest, SharedStreamRejected) {
  const auto index = index_for({5, 5});
  Sampler s1(SamplerKind::class_balanced, index, 4);
  Sampler s2(SamplerKind::class_balanced, index, 4);
  EXPECT_THROW(pair_stream(s1, s1, 10), std::invalid_argument);
  EXPECT_THROW(pair_stream(s1, s2, 10), std::invalid_argument);
}

TEST(PairStreamTest, MixedKindsKeepTheirMarginals) {
  const auto index = index_for(kCifar10Rho10);
  Sampler ib(SamplerKind::instance_balanced, index, derive_seed(9, "sampler-1"));
  Sampler cb(SamplerKind::class_balanced, index, derive_seed(9, "sampler-2"));
  constexpr std::size_t n = 400000;
  const auto pairs = pair_stream(ib, cb, n);
  std::vector<double> first(10, 0.0), second(10, 0.0);
  for (auto [i, j] : pairs) {
    first[index->label_of(i)] += 1.0 / n;
    second[index->label_of(j)] += 1.0 / n;
  }
  for (std::size_t k = 0; k < 10; ++k) {
    const double q_ib = kCifar10Rho10[k] / 20434.0;
    EXPECT_NEAR(first[k], q_ib, 5 * std::sqrt(q_ib * (1 - q_ib) / n)) << k;
    EXPECT_NEAR(second[k], 0.1, 5 * std::sqrt(0.09 / n)) << k;
  }
}

TEST(PairStreamTest, IndependentStreamsAreUncorrelated) {
  const auto index = index_for(kCifar10Rho10);
  Sampler s1(SamplerKind::instance_balanced, index, derive_seed(10, "sampler-1"));
  Sampler s2(SamplerKind::instance_balanced, index, derive_seed(10, "sampler-2"));
  constexpr std::size_t n = 1000000;
  const auto pairs = pair_stream(s1, s2, n);
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (auto [i, j] : pairs) {
    const double a = index->label_of(i), b = index->label_of(j);
    sa += a;
    sb += b;
    saa += a * a;
    sbb += b * b;
    sab += a * b;
  }
  const double ma = sa / n, mb = sb / n;
  const double corr = (sab / n - ma * mb) / std::sqrt((saa / n - ma * ma) * (sbb / n - mb * mb));
  EXPECT_LE(std::abs(corr), 0.01);
}

}  // namespace
}  // namespace lobmix
