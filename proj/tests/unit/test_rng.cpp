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
#include <set>
#include <vector>

#include "lobmix/rng.hpp"

namespace lobmix {
namespace {

TEST(RngTest, SameSeedSameSequence) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(RngTest, DerivedSeedsDifferByLabelAndParent) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s : {0ULL, 1ULL, 2ULL}) {
    for (const char* label : {"sampler-1", "sampler-2", "init", "dataset", "lambda"}) {
      EXPECT_TRUE(seen.insert(derive_seed(s, label)).second) << s << " " << label;
    }
  }
  EXPECT_EQ(derive_seed(7, "init"), derive_seed(7, "init"));
}

TEST(RngTest, UniformBelowStaysInRangeAndIsFlat) {
  Rng rng(3);
  constexpr std::uint64_t n = 7;
  constexpr int draws = 700000;
  std::vector<int> hist(n, 0);
  for (int i = 0; i < draws; ++i) {
    const auto v = rng.uniform_below(n);
    ASSERT_LT(v, n);
    ++hist[v];
  }
  double chi2 = 0.0;
  const double expected = static_cast<double>(draws) / n;
  for (int h : hist) chi2 += (h - expected) * (h - expected) / expected;
  // chi-square, 6 dof, 0.999 quantile = 22.46
  EXPECT_LT(chi2, 22.46);
  EXPECT_THROW(rng.uniform_below(0), std::invalid_argument);
}

TEST(RngTest, OpenUniformAvoidsEndpoints) {
  Rng rng(9);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_open01();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RngTest, NormalMoments) {
  Rng rng(11);
  constexpr int n = 400000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

class GammaMomentTest : public ::testing::TestWithParam<double> {};

TEST_P(GammaMomentTest, MeanAndVarianceEqualShape) {
  const double shape = GetParam();
  Rng rng(13);
  constexpr int n = 400000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gamma(shape);
    ASSERT_GE(g, 0.0);
    s += g;
    s2 += g * g;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  // Gamma(k,1): mean k, variance k; allow ~5 standard errors.
  EXPECT_NEAR(mean, shape, 5.0 * std::sqrt(shape / n));
  EXPECT_NEAR(var, shape, 0.02 * shape + 5.0 * std::sqrt((6.0 * shape + 2 * shape * shape) / n));
}

INSTANTIATE_TEST_SUITE_P(Shapes, GammaMomentTest, ::testing::Values(0.2, 0.5, 1.0, 2.0, 7.5));

TEST(RngTest, GammaRejectsNonPositiveShape) {
  Rng rng(1);
  EXPECT_THROW(rng.gamma(0.0), std::invalid_argument);
  EXPECT_THROW(rng.gamma(-1.0), std::invalid_argument);
}

}  // namespace
}  // namespace lobmix
