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
#include <sstream>
#include <vector>

#include "lobmix/occurrence.hpp"

namespace lobmix {
namespace {

const std::vector<std::size_t> kCifar10Rho10 = {5000, 3871, 2997, 2321, 1797, 1391, 1077, 834, 646, 500};

ClassIndex index_for(const std::vector<std::size_t>& counts) {
  std::vector<std::uint32_t> labels;
  for (std::size_t k = 0; k < counts.size(); ++k) labels.insert(labels.end(), counts[k], static_cast<std::uint32_t>(k));
  return ClassIndex(labels, counts.size());
}

LabeledDataset labels_dataset(const std::vector<std::size_t>& counts) {
  std::vector<std::uint32_t> labels;
  for (std::size_t k = 0; k < counts.size(); ++k) labels.insert(labels.end(), counts[k], static_cast<std::uint32_t>(k));
  return LabeledDataset(0, counts.size(), {}, labels);
}

TEST(SamplerComboTest, NamesAndParsing) {
  const auto combos = SamplerCombo::ablation(0.2);
  ASSERT_EQ(combos.size(), 3u);
  EXPECT_EQ(combos[0].name(), "ib-ib");
  EXPECT_EQ(combos[1].name(), "ib-cb");
  EXPECT_EQ(combos[2].name(), "cb-cb");
  EXPECT_EQ(SamplerCombo::parse("cb-ib").name(), "cb-ib");
  EXPECT_THROW(SamplerCombo::parse("cbib"), std::invalid_argument);
  EXPECT_THROW(SamplerCombo::parse("xx-ib"), std::invalid_argument);
}

TEST(AnalyticGammaTest, ClassBalancedPairIsPerfectlyBalanced) {
  const auto index = index_for(kCifar10Rho10);
  const SamplerCombo cbcb{SamplerKind::class_balanced, SamplerKind::class_balanced};
  for (const auto& g : analytic_gamma_exact(cbcb, index)) EXPECT_EQ(g, Rational(1, 10));
  EXPECT_EQ(analytic_gamma(cbcb, index).balance_ratio, 1.0);
}

TEST(AnalyticGammaTest, InstanceBalancedPairInheritsImbalance) {
  const auto index = index_for(kCifar10Rho10);
  const SamplerCombo ibib{SamplerKind::instance_balanced, SamplerKind::instance_balanced};
  const auto exact = analytic_gamma_exact(ibib, index);
  EXPECT_EQ(exact[0] / exact[9], Rational(10, 1));
  EXPECT_EQ(analytic_gamma(ibib, index).balance_ratio, 10.0);
}

TEST(AnalyticGammaTest, MixedPairMatchesOracle) {
  const auto index = index_for(kCifar10Rho10);
  const SamplerCombo ibcb{SamplerKind::instance_balanced, SamplerKind::class_balanced};
  const auto exact = analytic_gamma_exact(ibcb, index);
  EXPECT_EQ(exact[0] / exact[9], Rational(3913, 1413));
  const auto report = analytic_gamma(ibcb, index);
  EXPECT_NEAR(*report.balance_ratio, 2.7692852, 1e-7);
  EXPECT_NEAR(report.gamma[0], 0.172345, 1e-6);
  EXPECT_NEAR(report.gamma[9], 0.0622345, 1e-7);
  EXPECT_EQ(report.sample_count, 0u);
}

TEST(AnalyticGammaTest, IndependentOfAlpha) {
  const auto index = index_for({90, 9, 3});
  for (const auto& base : SamplerCombo::ablation(1.0)) {
    auto other = base;
    other.alpha = 0.2;
    EXPECT_EQ(analytic_gamma_exact(base, index), analytic_gamma_exact(other, index));
  }
}

TEST(AnalyticGammaTest, MonotoneInClassSizeForInstanceBalanced) {
  const auto index = index_for({3, 50, 7, 7, 20});
  const auto g = analytic_gamma(SamplerCombo{}, index).gamma;
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (std::size_t b = 0; b < g.size(); ++b) {
      if (index.class_size(a) > index.class_size(b)) EXPECT_GT(g[a], g[b]);
      if (index.class_size(a) == index.class_size(b)) EXPECT_EQ(g[a], g[b]);
    }
  }
}

TEST(AnalyticGammaTest, EmptyClassLeavesRatioUndefined) {
  const std::vector<std::uint32_t> labels = {0, 0, 1};
  const ClassIndex index(labels, 3);
  const auto report = analytic_gamma(SamplerCombo{}, index);
  EXPECT_FALSE(report.balance_ratio.has_value());
  EXPECT_THROW(balance_ratio(report), UnrepresentedClassError);
}

TEST(EmpiricalGammaTest, SingleExample) {
  MixedBatch batch;
  batch.examples.push_back(mix_labels(2, 5, 0.7, 6));
  const auto report = empirical_gamma(std::span<const MixedBatch>(&batch, 1), 6);
  EXPECT_EQ(report.sample_count, 1u);
  EXPECT_DOUBLE_EQ(report.gamma[2], 0.7);
  EXPECT_DOUBLE_EQ(report.gamma[5], 0.3);
  EXPECT_EQ(report.gamma[0], 0.0);
  EXPECT_FALSE(report.balance_ratio.has_value());
  try {
    balance_ratio(report);
    FAIL() << "expected UnrepresentedClassError";
  } catch (const UnrepresentedClassError& e) {
    EXPECT_EQ(e.cls(), 0u);
  }
}

TEST(EmpiricalGammaTest, EmptyInputRejected) {
  std::vector<MixedBatch> none;
  EXPECT_THROW(empirical_gamma(none, 3), std::invalid_argument);
  EXPECT_THROW(head_label_incidence(none, {0}), std::invalid_argument);
}

TEST(EmpiricalGammaTest, MatchesAnalyticWithinThreeSigma) {
  const auto ds = labels_dataset(kCifar10Rho10);
  const auto index = std::make_shared<const ClassIndex>(ds);
  for (const auto& combo : SamplerCombo::ablation(1.0)) {
    BatchStream stream(ds, index, combo.first, combo.second, combo.alpha, derive_seed(5, combo.name()), false);
    OccurrenceTally tally(10);
    for (int b = 0; b < 50; ++b) tally.add(stream.next_batch(4096));
    const auto analytic = analytic_gamma(combo, *index).gamma;
    const auto g = tally.gamma();
    const auto se = tally.standard_error();
    for (std::size_t k = 0; k < 10; ++k) {
      EXPECT_LE(std::abs(g[k] - analytic[k]), 4.0 * se[k] + 1e-12) << combo.name() << " class " << k;
    }
  }
}

TEST(EmpiricalGammaTest, SumsToOne) {
  const auto ds = labels_dataset({40, 4, 2});
  const auto index = std::make_shared<const ClassIndex>(ds);
  BatchStream stream(ds, index, SamplerKind::instance_balanced, SamplerKind::class_balanced, 0.3, 1, false);
  OccurrenceTally tally(3);
  tally.add(stream.next_batch(10000));
  double total = 0.0;
  for (double g : tally.gamma()) total += g;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(OccurrenceTallyTest, MergeEqualsSingleTally) {
  const auto ds = labels_dataset({30, 10, 5});
  const auto index = std::make_shared<const ClassIndex>(ds);
  BatchStream stream(ds, index, SamplerKind::class_balanced, SamplerKind::instance_balanced, 1.0, 2, false);
  const auto a = stream.next_batch(1000), b = stream.next_batch(777);
  OccurrenceTally whole(3), left(3), right(3);
  whole.add(a);
  whole.add(b);
  left.add(a);
  right.add(b);
  left.merge(right);
  EXPECT_EQ(left.sample_count(), whole.sample_count());
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(left.gamma()[k], whole.gamma()[k], 1e-15);
  EXPECT_EQ(left.head_incidence({0}), whole.head_incidence({0}));
  EXPECT_THROW(left.merge(OccurrenceTally(4)), std::invalid_argument);
}

TEST(HeadIncidenceTest, AllClassesGivesOne) {
  const auto index = index_for({10, 5, 1});
  EXPECT_EQ(analytic_head_incidence(SamplerCombo{}, index, {0, 1, 2}), 1.0);
  MixedBatch batch;
  for (int i = 0; i < 5; ++i) batch.examples.push_back(mix_labels(i % 3, (i + 1) % 3, 0.4, 3));
  EXPECT_EQ(head_label_incidence(std::span<const MixedBatch>(&batch, 1), {0, 1, 2}), 1.0);
}

TEST(HeadIncidenceTest, AnalyticValues) {
  // IB with head mass 1/2 -> 1 - (1/2)^2.
  const auto index = index_for({50, 20, 20, 10});
  EXPECT_DOUBLE_EQ(analytic_head_incidence(SamplerCombo{}, index, {0}), 0.75);
  // CB over C = 10 with 3 head classes -> 1 - 0.7^2.
  const auto cifar = index_for(kCifar10Rho10);
  const SamplerCombo cbcb{SamplerKind::class_balanced, SamplerKind::class_balanced};
  EXPECT_NEAR(analytic_head_incidence(cbcb, cifar, {0, 1, 2}), 0.51, 1e-12);
  EXPECT_THROW(analytic_head_incidence(cbcb, cifar, {10}), std::invalid_argument);
}

TEST(HeadIncidenceTest, EmpiricalTracksAnalytic) {
  const auto ds = labels_dataset(kCifar10Rho10);
  const auto index = std::make_shared<const ClassIndex>(ds);
  const auto head = default_head_set(index->class_sizes());
  for (const auto& combo : SamplerCombo::ablation(1.0)) {
    BatchStream stream(ds, index, combo.first, combo.second, 1.0, derive_seed(6, combo.name()), false);
    const auto batch = stream.next_batch(200000);
    const double h = head_label_incidence(std::span<const MixedBatch>(&batch, 1), head);
    EXPECT_NEAR(h, analytic_head_incidence(combo, *index, head), 0.005) << combo.name();
  }
}

TEST(DefaultHeadSetTest, ClassesAboveMedian) {
  const std::vector<std::size_t> sizes = kCifar10Rho10;
  EXPECT_EQ(default_head_set(sizes), (std::set<std::uint32_t>{0, 1, 2, 3, 4}));
  const std::vector<std::size_t> flat = {4, 4, 4};
  EXPECT_TRUE(default_head_set(flat).empty());
}

TEST(OccurrenceCsvTest, BlankEmpiricalColumnWhenAbsent) {
  const auto index = index_for({3, 1});
  const auto analytic = analytic_gamma(SamplerCombo{}, index);
  std::ostringstream out;
  write_occurrence_csv(out, index.class_sizes(), analytic, nullptr);
  EXPECT_EQ(out.str(), "class,n_k,gamma_analytic,gamma_empirical\n0,3,0.75,\n1,1,0.25,\n");
}

}  // namespace
}  // namespace lobmix
