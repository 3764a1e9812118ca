// Copyright 2026 The sqattack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sqattack/rng.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "sqattack/bit_matrix.h"
#include "sqattack/stats.h"

namespace sqattack {
namespace {

TEST(Rng, Deterministic) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differs |= x != c();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, BelowIsUniform) {
  Rng rng(7);
  std::vector<double> counts(10, 0.0), expected(10, 10000.0);
  for (int i = 0; i < 100000; ++i) counts[rng.Below(10)] += 1;
  EXPECT_GT(stats::ChiSquarePValue(counts, expected), 1e-3);
}

TEST(Rng, NormalAndLaplaceMoments) {
  Rng rng(8);
  double s1 = 0, s2 = 0, l1 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.Normal();
    s1 += z;
    s2 += z * z;
    l1 += std::abs(rng.Laplace());
  }
  EXPECT_NEAR(s1 / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
  EXPECT_NEAR(l1 / n, 1.0, 0.02);
}

TEST(SeedStreams, NamedStreamsAreIndependentOfDrawOrder) {
  const SeedStreams s(5);
  Rng keys = s.Stream("keys", 3);
  Rng sample = s.Stream("sample");
  for (int i = 0; i < 1000; ++i) sample();
  Rng keys_again = s.Stream("keys", 3);
  EXPECT_EQ(keys(), keys_again());
  EXPECT_NE(s.Seed("keys", 0), s.Seed("keys", 1));
  EXPECT_NE(s.Seed("keys", 0), s.Seed("codes", 0));
  EXPECT_NE(TrialStreams(5, 0).base(), TrialStreams(5, 1).base());
}

TEST(BitMatrix, TransposeIsInvolution) {
  Rng rng(3);
  Block64 a;
  for (auto& w : a) w = rng();
  Block64 b = a;
  Transpose64(b);
  for (int r = 0; r < 64; ++r) {
    for (int c = 0; c < 64; ++c) {
      EXPECT_EQ((b[r] >> c) & 1, (a[c] >> r) & 1);
    }
  }
  Transpose64(b);
  EXPECT_EQ(a, b);
}

TEST(BitMatrix, ColumnCountsMatchBruteForce) {
  Rng rng(4);
  BitMatrix m(130, 200);
  for (std::size_t r = 0; r < 130; ++r) {
    for (std::size_t c = 0; c < 200; ++c) m.Set(r, c, rng.Bernoulli(0.3));
  }
  const std::vector<std::uint32_t> counts = m.ColumnCounts();
  const std::vector<std::size_t> rows = {5, 5, 129};
  const std::vector<std::uint32_t> part = m.ColumnCounts(rows);
  for (std::size_t c = 0; c < 200; ++c) {
    std::uint32_t want = 0;
    for (std::size_t r = 0; r < 130; ++r) want += m.Get(r, c);
    EXPECT_EQ(counts[c], want);
    EXPECT_EQ(part[c], 2u * m.Get(5, c) + m.Get(129, c));
  }
}

TEST(Stats, BinomialInterval) {
  const stats::Interval all = stats::BinomialInterval(10, 10);
  EXPECT_EQ(all.hi, 1.0);
  EXPECT_NEAR(all.lo, 0.6915, 1e-3);
  const stats::Interval none = stats::BinomialInterval(0, 10);
  EXPECT_EQ(none.lo, 0.0);
  EXPECT_NEAR(none.hi, 0.3085, 1e-3);
  const stats::Interval mid = stats::BinomialInterval(50, 100);
  EXPECT_LT(mid.lo, 0.5);
  EXPECT_GT(mid.hi, 0.5);
}

TEST(Stats, ChiSquareAndTwoProportion) {
  EXPECT_NEAR(stats::ChiSquareUpperTail(3.841458820694124, 1), 0.05, 1e-9);
  EXPECT_NEAR(stats::TwoProportionPValue(50, 100, 50, 100), 1.0, 1e-12);
  EXPECT_LT(stats::TwoProportionPValue(10, 100, 90, 100), 1e-6);
}

TEST(Stats, KolmogorovSmirnov) {
  Rng rng(9);
  std::vector<double> a(2000), b(2000), c(2000);
  for (auto& v : a) v = rng.Normal();
  for (auto& v : b) v = rng.Normal();
  for (auto& v : c) v = rng.Normal() + 0.5;
  EXPECT_GT(stats::KolmogorovSmirnov(a, b).p_value, 0.001);
  EXPECT_LT(stats::KolmogorovSmirnov(a, c).p_value, 1e-6);
  EXPECT_NEAR(stats::KolmogorovQ(1.358), 0.05, 1e-3);
}

}  // namespace
}  // namespace sqattack
