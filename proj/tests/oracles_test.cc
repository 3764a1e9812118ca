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

#include "sqattack/oracles.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"
#include "sqattack/attacks.h"

namespace sqattack::oracles {
namespace {

constexpr std::size_t kBits = 12;

sq::Sample IndexSample(std::size_t n, std::size_t universe, std::uint64_t seed) {
  std::vector<sq::Element> support;
  for (std::size_t i = 0; i < universe; ++i) {
    support.push_back(sq::Element::Plain(i, kBits));
  }
  const sq::Distribution d = *sq::Distribution::Uniform(std::move(support));
  Rng rng(seed);
  return *sq::Sample::Iid(d, n, rng);
}

sq::Query RandomTable(std::size_t universe, Rng& rng) {
  auto bits = std::make_shared<std::vector<char>>(universe);
  for (char& b : *bits) b = rng.Bernoulli(0.5);
  sq::Query q(
      "table", [bits](const sq::Element& e) { return (*bits)[e.index()] != 0; },
      universe);
  q.WithTable(universe, [bits](std::uint64_t i) { return (*bits)[i] != 0; });
  return q;
}

TEST(EmpiricalOracle, ConstantAndNatural) {
  const sq::Sample x = IndexSample(30, 100, 1);
  EmpiricalOracle oracle;
  ASSERT_TRUE(oracle.Init(x).ok());
  EXPECT_EQ(oracle.Answer(sq::ConstantQuery(1)), 1.0);
  // Agree on the sample, differ elsewhere.
  const auto s = x.unique_indices();
  const std::vector<std::uint64_t> in(s.begin(), s.end());
  auto member = [in](const sq::Element& e) {
    return std::binary_search(in.begin(), in.end(), e.index());
  };
  const sq::Query q("q", [member](const sq::Element& e) {
    return member(e) ? e.index() % 2 == 0 : true;
  }, 1);
  const sq::Query q2("q2", [member](const sq::Element& e) {
    return member(e) ? e.index() % 2 == 0 : false;
  }, 1);
  EXPECT_EQ(oracle.Answer(q), oracle.Answer(q2));
}

TEST(EmpiricalOracle, RejectsEmptySample) {
  EmpiricalOracle oracle;
  EXPECT_FALSE(oracle.Init(sq::Sample()).ok());
}

TEST(NoisyOracle, ZeroSigmaIsEmpirical) {
  const sq::Sample x = IndexSample(40, 200, 2);
  EmpiricalOracle plain;
  NoisyOracle noisy(0.0, NoiseLaw::kGaussian, 3);
  ASSERT_TRUE(plain.Init(x).ok());
  ASSERT_TRUE(noisy.Init(x).ok());
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const sq::Query q = RandomTable(200, rng);
    EXPECT_EQ(noisy.Answer(q), plain.Answer(q));
  }
}

TEST(NoisyOracle, AnswersStayInUnitInterval) {
  const sq::Sample x = IndexSample(10, 50, 5);
  for (NoiseLaw law : {NoiseLaw::kGaussian, NoiseLaw::kLaplace}) {
    NoisyOracle noisy(3.0, law, 6);
    ASSERT_TRUE(noisy.Init(x).ok());
    Rng rng(7);
    for (int t = 0; t < 500; ++t) {
      const double a = noisy.Answer(RandomTable(50, rng));
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 1.0);
    }
  }
}

TEST(NoisyOracle, HalfNormalDeviation) {
  const double sigma = 0.05;
  const sq::Sample x = IndexSample(200, 1000, 8);
  NoisyOracle noisy(sigma, NoiseLaw::kGaussian, 9);
  EmpiricalOracle plain;
  ASSERT_TRUE(noisy.Init(x).ok());
  ASSERT_TRUE(plain.Init(x).ok());
  Rng rng(10);
  double total = 0;
  const int k = 10000;
  for (int t = 0; t < k; ++t) {
    const sq::Query q = RandomTable(1000, rng);
    total += std::abs(noisy.Answer(q) - plain.Answer(q));
  }
  const double want = sigma * std::sqrt(2 / std::numbers::pi);
  EXPECT_NEAR(total / k, want, 0.05 * want);
}

TEST(NoisyOracle, LaplaceDeviation) {
  const double sigma = 0.04;
  const sq::Sample x = IndexSample(200, 1000, 11);
  NoisyOracle noisy(sigma, NoiseLaw::kLaplace, 12);
  EmpiricalOracle plain;
  ASSERT_TRUE(noisy.Init(x).ok());
  ASSERT_TRUE(plain.Init(x).ok());
  Rng rng(13);
  double total = 0;
  const int k = 10000;
  for (int t = 0; t < k; ++t) {
    const sq::Query q = RandomTable(1000, rng);
    total += std::abs(noisy.Answer(q) - plain.Answer(q));
  }
  EXPECT_NEAR(total / k, sigma, 0.05 * sigma);
}

TEST(SubsampleOracle, UsesFixedSubsample) {
  const sq::Sample x = IndexSample(100, 1000, 14);
  SubsampleOracle sub(0.25, 15);
  ASSERT_TRUE(sub.Init(x).ok());
  Rng rng(16);
  for (int t = 0; t < 50; ++t) {
    const double a = sub.Answer(RandomTable(1000, rng));
    // Means over 25 points.
    EXPECT_NEAR(a * 25, std::round(a * 25), 1e-9);
  }
  const sq::Query one = sq::ConstantQuery(1);
  EXPECT_EQ(sub.Answer(one), 1.0);
}

TEST(OracleSpec, Validation) {
  OracleSpec spec;
  spec.kind = OracleKind::kNoisy;
  spec.sigma = -1;
  EXPECT_FALSE(spec.Validate().ok());
  spec = {};
  spec.kind = OracleKind::kSubsample;
  spec.fraction = 0;
  EXPECT_FALSE(MakeOracle(spec).ok());
  spec.fraction = 1.5;
  EXPECT_FALSE(spec.Validate().ok());
  spec.fraction = 0.5;
  EXPECT_TRUE(MakeOracle(spec).ok());
  for (OracleKind k : {OracleKind::kEmpirical, OracleKind::kNoisy,
                       OracleKind::kSubsample, OracleKind::kCheating}) {
    EXPECT_EQ(*ParseOracleKind(OracleKindName(k)), k);
  }
  EXPECT_FALSE(ParseOracleKind("psychic").ok());
  EXPECT_EQ(*ParseNoiseLaw("laplace"), NoiseLaw::kLaplace);
  EXPECT_EQ(*ParseGuessPolicy(GuessPolicyName(GuessPolicy::kRandomKey)),
            GuessPolicy::kRandomKey);
}

attacks::AttackState SmallState(attacks::Mode mode, std::uint64_t seed) {
  attacks::AttackConfig c;
  c.mode = mode;
  c.n = 20;
  c.kappa = 10;
  c.reserve = 5;
  c.code_length = 300;
  c.phi_plus = 0.1;
  c.trace_threshold = 4.0;
  const attacks::ResolvedConfig cfg = *attacks::Resolve(c);
  absl::StatusOr<attacks::AttackState> st = attacks::PrepareAttack(
      cfg, SeedStreams(seed), attacks::CipherWorld::kReal);
  EXPECT_TRUE(st.ok()) << st.status();
  return *std::move(st);
}

TEST(CheatingOracle, NaturalRecoveryQueriesAreExact) {
  const attacks::AttackState st = SmallState(attacks::Mode::kNatural, 21);
  CheatingOracle oracle(true, GuessPolicy::kHalf, 1);
  ASSERT_TRUE(oracle.Init(st.sample).ok());
  const std::vector<double> truth = attacks::RecoveryTrueMeans(st, 1);
  for (std::size_t j = 0; j < st.cfg.length; ++j) {
    const sq::Query q = attacks::MakeRecoveryQuery(st, 1, j);
    EXPECT_EQ(oracle.Answer(q), truth[j]);
    EXPECT_EQ(truth[j], sq::TrueMean(q, st.distribution));
  }
}

TEST(CheatingOracle, PadRecoveryQueriesGuessHalf) {
  const attacks::AttackState st = SmallState(attacks::Mode::kEncrypted, 22);
  CheatingOracle oracle(true, GuessPolicy::kHalf, 1);
  ASSERT_TRUE(oracle.Init(st.sample).ok());
  const double p = static_cast<double>(st.cfg.users);
  const double s = static_cast<double>(st.sample_set.size());
  const fpcode::CodeMatrix& f = *st.codes[0];
  for (std::size_t j = 0; j < st.cfg.length; ++j) {
    double ones = 0;
    for (std::size_t i : st.sample_set) ones += f(i, j);
    const double want = (s / p) * (ones / s) + (1 - s / p) * 0.5;
    EXPECT_NEAR(oracle.Answer(attacks::MakeRecoveryQuery(st, 1, j)), want,
                1e-12);
  }
}

TEST(CheatingOracle, PadRecoveryQueriesRandomKey) {
  const attacks::AttackState st = SmallState(attacks::Mode::kEncrypted, 23);
  CheatingOracle oracle(true, GuessPolicy::kRandomKey, 2);
  ASSERT_TRUE(oracle.Init(st.sample).ok());
  const double p = static_cast<double>(st.cfg.users);
  const double s = static_cast<double>(st.sample_set.size());
  const fpcode::CodeMatrix& f = *st.codes[0];
  double err = 0;
  for (std::size_t j = 0; j < st.cfg.length; ++j) {
    double ones = 0;
    for (std::size_t i : st.sample_set) ones += f(i, j);
    const double want = (s / p) * (ones / s) + (1 - s / p) * 0.5;
    err += oracle.Answer(attacks::MakeRecoveryQuery(st, 1, j)) - want;
  }
  // Each column is off by Binomial(p - |S|, 1/2)/p - (p - |S|)/(2p).
  const double sd = std::sqrt((p - s) / 4) / p;
  EXPECT_LE(std::abs(err / static_cast<double>(st.cfg.length)),
            5 * sd / std::sqrt(static_cast<double>(st.cfg.length)));
}

TEST(NaturalnessAudit, EmpiricalPasses) {
  const sq::Sample x = IndexSample(50, 400, 31);
  OracleSpec spec;
  AuditOptions options;
  options.pairs = 300;
  const AuditReport r = *NaturalnessAudit(MakeFactory(spec), x, 400, options);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.identical, r.pairs);
}

TEST(NaturalnessAudit, CheatingTableFails) {
  const sq::Sample x = IndexSample(50, 400, 32);
  OracleSpec spec;
  spec.kind = OracleKind::kCheating;
  AuditOptions options;
  options.pairs = 300;
  const AuditReport r = *NaturalnessAudit(MakeFactory(spec), x, 400, options);
  EXPECT_FALSE(r.passed);
  EXPECT_LT(r.identical, r.pairs);
}

// Rejections at alpha = 0.01 should be rare across audit seeds.
TEST(NaturalnessAudit, NoisyPasses) {
  const sq::Sample x = IndexSample(50, 400, 33);
  OracleSpec spec;
  spec.kind = OracleKind::kNoisy;
  spec.sigma = 0.05;
  int rejected = 0;
  const int audits = 100;
  for (int s = 0; s < audits; ++s) {
    AuditOptions options;
    options.pairs = 1000;
    options.alpha = 0.01;
    options.seed = s;
    const AuditReport r = *NaturalnessAudit(MakeFactory(spec), x, 400, options);
    EXPECT_LT(r.identical, r.pairs);
    rejected += !r.passed;
  }
  EXPECT_LE(rejected, 5);
}

}  // namespace
}  // namespace sqattack::oracles
