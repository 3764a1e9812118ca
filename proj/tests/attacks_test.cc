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

#include "sqattack/attacks.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "sqattack/oracles.h"

namespace sqattack::attacks {
namespace {

AttackConfig DeskConfig(Mode mode) {
  AttackConfig c;
  c.mode = mode;
  c.n = 40;
  c.kappa = 50;
  c.reserve = 10;
  c.code_length = 2000;
  c.phi_plus = 0.1;
  c.final_tolerance = 1.0 / 40;
  return c;
}

AttackConfig TinyConfig(Mode mode) {
  AttackConfig c;
  c.mode = mode;
  c.n = 12;
  c.kappa = 10;
  c.reserve = 4;
  c.code_length = 200;
  c.phi_plus = 0.1;
  c.final_tolerance = 0.05;
  c.trace_threshold = 4.0;
  return c;
}

sq::OracleFactory Empirical() { return oracles::MakeFactory({}); }

AttackState Prepared(const AttackConfig& c, std::uint64_t seed,
                     CipherWorld world = CipherWorld::kReal) {
  const ResolvedConfig cfg = *Resolve(c);
  absl::StatusOr<AttackState> st =
      PrepareAttack(cfg, TrialStreams(seed, 0), world);
  EXPECT_TRUE(st.ok()) << st.status();
  return *std::move(st);
}

TEST(Mode, Names) {
  for (Mode m : {Mode::kNatural, Mode::kEncrypted, Mode::kIdeal,
                 Mode::kPrivacy, Mode::kIdealPrivacy}) {
    EXPECT_EQ(*ParseMode(ModeName(m)), m);
  }
  EXPECT_FALSE(ParseMode("sneaky").ok());
}

TEST(Resolve, Defaults) {
  AttackConfig c;
  c.n = 600;
  c.code_length = 64;
  const ResolvedConfig r = *Resolve(c);
  EXPECT_EQ(r.users, 2000u * 600);
  EXPECT_EQ(r.rounds, 100u);
  EXPECT_EQ(r.subset_size, 2400u);
  AttackConfig pc;
  pc.mode = Mode::kPrivacy;
  pc.n = 50;
  pc.code_length = 64;
  const ResolvedConfig pr = *Resolve(pc);
  EXPECT_EQ(pr.users, 100u);
  EXPECT_EQ(pr.rounds, 49u);
  EXPECT_EQ(pr.PlannedQueries(), 49u * 64);
}

TEST(Resolve, BudgetAccounting) {
  const ResolvedConfig r = *Resolve(DeskConfig(Mode::kNatural));
  EXPECT_EQ(r.rounds, 30u);
  EXPECT_EQ(r.PlannedQueries(), 60001u);
}

TEST(Resolve, PadSizing) {
  const ResolvedConfig r = *Resolve(DeskConfig(Mode::kEncrypted));
  ASSERT_TRUE(r.scheme.has_value());
  EXPECT_EQ(r.scheme->scheme, crypto::Scheme::kOneTimePad);
  EXPECT_EQ(r.ciphertexts_per_key, 60001u);
  EXPECT_EQ(r.scheme->parameter, 60001u);
  EXPECT_EQ(r.dimension, 60001u + sq::IndexBits(2000));
}

TEST(Resolve, Errors) {
  AttackConfig c = DeskConfig(Mode::kNatural);
  c.reserve = 40;
  EXPECT_FALSE(Resolve(c).ok());
  c = DeskConfig(Mode::kEncrypted);
  c.d = 1000;
  absl::Status s = Resolve(c).status();
  ASSERT_FALSE(s.ok());
  EXPECT_NE(s.message().find("60012"), absl::string_view::npos) << s;
  c = DeskConfig(Mode::kNatural);
  c.memory_budget = 1 << 20;
  s = Resolve(c).status();
  EXPECT_EQ(s.code(), absl::StatusCode::kResourceExhausted);
  EXPECT_NE(s.message().find("largest feasible l"), absl::string_view::npos);
  c = DeskConfig(Mode::kEncrypted);
  c.scheme_parameter = 10;
  EXPECT_FALSE(Resolve(c).ok());
  c = DeskConfig(Mode::kNatural);
  c.n = 1;
  c.kappa = 2;
  c.reserve = 0;
  EXPECT_FALSE(Resolve(c).ok());
}

TEST(Resolve, StreamLambdaFromDimension) {
  AttackConfig c = DeskConfig(Mode::kEncrypted);
  c.scheme = crypto::Scheme::kPseudorandomStream;
  c.d = 139;
  const ResolvedConfig r = *Resolve(c);
  EXPECT_EQ(r.scheme->parameter, 128u);
  EXPECT_EQ(r.dimension, 139u);
}

TEST(PlantedDistribution, NaturalIsUniformOverIndices) {
  AttackConfig c = TinyConfig(Mode::kNatural);
  c.n = 10;
  c.kappa = 4;
  c.reserve = 2;
  const ResolvedConfig cfg = *Resolve(c);
  const Planted planted = *BuildPlantedDistribution(cfg, SeedStreams(1));
  ASSERT_EQ(planted.distribution.size(), 40u);
  EXPECT_TRUE(planted.distribution.uniform());
  EXPECT_TRUE(planted.keys.empty());
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_EQ(planted.distribution.support()[i].index(), i);
    EXPECT_FALSE(planted.distribution.support()[i].has_key());
  }
}

TEST(PlantedDistribution, EncryptedCarriesKeys) {
  const ResolvedConfig cfg = *Resolve(TinyConfig(Mode::kEncrypted));
  const Planted planted = *BuildPlantedDistribution(cfg, SeedStreams(1));
  ASSERT_EQ(planted.keys.size(), cfg.users);
  for (std::size_t i = 0; i < cfg.users; ++i) {
    EXPECT_TRUE(planted.distribution.support()[i].key().SameKeyAs(
        planted.keys[i]));
  }
  EXPECT_FALSE(planted.keys[0].SameKeyAs(planted.keys[1]));
}

TEST(RecoveryQuery, MaskedRowsAnswerZero) {
  for (Mode mode : {Mode::kNatural, Mode::kEncrypted}) {
    AttackState st = Prepared(TinyConfig(mode), 3);
    const std::size_t victim = st.sample_set.front();
    (*st.traced_round)[victim] = 1;
    Rng rng(4);
    const sq::Element genuine = st.distribution.support()[victim];
    std::vector<sq::Element> probes = {genuine};
    if (mode == Mode::kEncrypted) {
      for (int t = 0; t < 5; ++t) {
        probes.push_back(sq::Element::Keyed(
            victim, *crypto::KeyGen(st.cfg.scheme.value(), rng),
            st.cfg.dimension));
      }
    }
    for (std::size_t j = 0; j < st.cfg.length; ++j) {
      const sq::Query q = MakeRecoveryQuery(st, 2, j);
      for (const sq::Element& e : probes) EXPECT_EQ(q.Peek(e), 0);
    }
  }
}

TEST(RecoveryQuery, GenuinePairsDecryptToCodeBits) {
  const AttackState st = Prepared(TinyConfig(Mode::kEncrypted), 5);
  for (std::size_t r : {std::size_t{1}, st.cfg.rounds}) {
    for (std::size_t j = 0; j < st.cfg.length; j += 7) {
      const sq::Query q = MakeRecoveryQuery(st, r, j);
      for (std::size_t i = 0; i < st.cfg.users; ++i) {
        EXPECT_EQ(q.Peek(st.distribution.support()[i]),
                  (*st.codes[r - 1])(i, j) ? 1 : 0);
      }
    }
  }
}

TEST(RecoveryQuery, TrueMeanIdentity) {
  for (Mode mode : {Mode::kNatural, Mode::kEncrypted}) {
    AttackState st = Prepared(TinyConfig(mode), 6);
    (*st.traced_round)[st.sample_set.back()] = 1;
    (*st.traced_round)[st.cfg.users - 1] = 2;
    for (std::size_t r = 1; r <= 3; ++r) {
      const std::vector<double> truth = RecoveryTrueMeans(st, r);
      for (std::size_t j = 0; j < st.cfg.length; j += 5) {
        double want = 0;
        for (std::size_t i = 0; i < st.cfg.users; ++i) {
          if (!st.InTracedBefore(i, r)) want += (*st.codes[r - 1])(i, j);
        }
        want /= static_cast<double>(st.cfg.users);
        EXPECT_EQ(truth[j], want);
        EXPECT_EQ(truth[j],
                  sq::TrueMean(MakeRecoveryQuery(st, r, j), st.distribution));
      }
    }
  }
}

TEST(RecoveryQuery, IdealModeHidesOffSampleRows) {
  const AttackState st =
      Prepared(TinyConfig(Mode::kIdeal), 7, CipherWorld::kIdeal);
  for (std::size_t j = 0; j < st.cfg.length; j += 3) {
    const sq::Query q = MakeRecoveryQuery(st, 1, j);
    for (std::size_t i = 0; i < st.cfg.users; ++i) {
      if (!st.in_sample[i]) {
        EXPECT_EQ(q.Peek(st.distribution.support()[i]), 0);
      }
    }
  }
}

TEST(RunAttack, ZeroRounds) {
  AttackConfig c = TinyConfig(Mode::kNatural);
  c.rounds = 0;
  const AttackRun run = *RunAttackDetailed(Empirical(), c, 1);
  EXPECT_TRUE(run.state.traced.empty());
  EXPECT_TRUE(run.state.rounds.empty());
  EXPECT_EQ(run.outcome.queries, 1u);
  EXPECT_TRUE(run.outcome.z1);
  EXPECT_EQ(run.state.transcript.size(), 1u);
}

TEST(RunAttack, DeskScaleNatural) {
  const AttackRun run = *RunAttackDetailed(Empirical(),
                                           DeskConfig(Mode::kNatural), 7);
  const AttackOutcome& o = run.outcome;
  EXPECT_EQ(o.queries, 60001u);
  EXPECT_EQ(run.state.transcript.size(), 60001u);
  EXPECT_LE(o.missed, 10u);
  EXPECT_TRUE(o.recovery_succeeded);
  EXPECT_TRUE(o.final_bound_holds);
  EXPECT_LE(std::abs(o.final_true_mean - o.phi),
            static_cast<double>(o.traced_total) / 2000 + 1e-15);
  // Each traced user joins at most once.
  const std::set<std::size_t> unique(run.state.traced.begin(),
                                     run.state.traced.end());
  EXPECT_EQ(unique.size(), run.state.traced.size());
  EXPECT_LE(run.state.traced.size(), o.rounds);
}

TEST(RunAttack, ShiftedAnswersBreakZ1) {
  AttackConfig c = TinyConfig(Mode::kNatural);
  c.rounds = 2;
  AttackRun run = *RunAttackDetailed(Empirical(), c, 2);
  for (RoundRecord& r : run.state.rounds) {
    for (double& a : r.answers) a = a + 0.5;
  }
  EXPECT_FALSE(EvaluateEvents(run.state).z1);
  for (RoundRecord& r : run.state.rounds) {
    const std::vector<std::size_t> u = [&] {
      std::vector<std::size_t> out;
      for (std::size_t i : run.state.sample_set) {
        if (!run.state.InTracedBefore(i, r.round)) out.push_back(i);
      }
      return out;
    }();
    const std::vector<double> means =
        fpcode::Restrict(*run.state.codes[r.round - 1], u)->ColumnMeans();
    r.answers = means;
  }
  EXPECT_TRUE(EvaluateEvents(run.state).z1);
}

TEST(RunAttack, PhiZeroMeansZeroTarget) {
  int zeros = 0, plus = 0;
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    const AttackOutcome o = *RunAttack(Empirical(), TinyConfig(Mode::kNatural),
                                       seed);
    if (o.phi == 0) {
      ++zeros;
      EXPECT_EQ(o.final_true_mean, 0.0);
    } else {
      ++plus;
      EXPECT_EQ(o.phi, 0.1);
    }
    EXPECT_TRUE(o.final_bound_holds);
  }
  EXPECT_GT(zeros, 0);
  EXPECT_GT(plus, 0);
}

TEST(RunAttack, ProtocolViolationAborts) {
  class Broken : public sq::Oracle {
   public:
    absl::Status Init(const sq::Sample&) override { return absl::OkStatus(); }
    double Answer(const sq::Query&) override { return 2.0; }
    std::string Name() const override { return "broken"; }
  };
  const sq::OracleFactory factory = [](std::uint64_t) {
    return std::make_unique<Broken>();
  };
  const AttackRun run = *RunAttackDetailed(factory, TinyConfig(Mode::kNatural),
                                           1);
  EXPECT_TRUE(run.outcome.aborted);
  EXPECT_FALSE(run.outcome.error.empty());
  EXPECT_TRUE(run.state.transcript.aborted());
}

TEST(RunAttack, EncryptedPadMatchesNatural) {
  const AttackOutcome nat =
      *RunAttack(Empirical(), TinyConfig(Mode::kNatural), 9);
  const AttackOutcome enc =
      *RunAttack(Empirical(), TinyConfig(Mode::kEncrypted), 9);
  EXPECT_EQ(nat.missed, enc.missed);
  EXPECT_EQ(nat.traced_total, enc.traced_total);
  EXPECT_EQ(nat.final_answer, enc.final_answer);
  EXPECT_EQ(enc.queries,
            Resolve(TinyConfig(Mode::kEncrypted))->PlannedQueries());
}

TEST(Replay, MatchesLiveFlags) {
  for (Mode mode : {Mode::kNatural, Mode::kEncrypted, Mode::kPrivacy}) {
    AttackConfig c = TinyConfig(mode);
    const AttackRun run = IsPrivacyMode(mode)
                              ? *RunPrivacyAttackDetailed(Empirical(), c, 4)
                              : *RunAttackDetailed(Empirical(), c, 4);
    const std::string text = AttackToJsonLines(run.state, run.outcome);
    const ReplayResult r = *ReplayTranscript(text);
    EXPECT_TRUE(r.matches()) << ModeName(mode);
    EXPECT_EQ(r.stored.z1, run.outcome.z1);
    EXPECT_EQ(r.stored.z2, run.outcome.z2);
    EXPECT_EQ(r.stored.z3, run.outcome.z3);
    EXPECT_EQ(r.recomputed_queries, run.outcome.queries);
  }
  EXPECT_FALSE(ReplayTranscript("{}\n").ok());
}

TEST(Replay, DetectsTampering) {
  AttackConfig c = TinyConfig(Mode::kNatural);
  const AttackRun run = *RunAttackDetailed(Empirical(), c, 5);
  std::string text = AttackToJsonLines(run.state, run.outcome);
  const std::string key = "\"z2\":";
  const std::size_t at = text.rfind(key);
  ASSERT_NE(at, std::string::npos);
  const bool stored = text.compare(at + key.size(), 4, "true") == 0;
  text.replace(at + key.size(), stored ? 4 : 5, stored ? "false" : "true");
  EXPECT_FALSE(ReplayTranscript(text)->matches());
}

TEST(Determinism, IdenticalTranscripts) {
  for (Mode mode : {Mode::kNatural, Mode::kEncrypted}) {
    oracles::OracleSpec spec;
    spec.kind = oracles::OracleKind::kNoisy;
    spec.sigma = 0.01;
    const auto factory = oracles::MakeFactory(spec);
    const AttackRun a = *RunAttackDetailed(factory, TinyConfig(mode), 11);
    const AttackRun b = *RunAttackDetailed(factory, TinyConfig(mode), 11);
    EXPECT_EQ(AttackToJsonLines(a.state, a.outcome),
              AttackToJsonLines(b.state, b.outcome));
    const AttackRun c = *RunAttackDetailed(factory, TinyConfig(mode), 12);
    EXPECT_NE(AttackToJsonLines(a.state, a.outcome),
              AttackToJsonLines(c.state, c.outcome));
  }
}

TEST(Simulation, WorldOneIsTheEncryptedAttack) {
  const AttackConfig c = TinyConfig(Mode::kEncrypted);
  const AttackRun real = *RunAttackDetailed(Empirical(), c, 13);
  const AttackRun sim = *RunSimulation(Empirical(), 1, c, 13);
  ASSERT_EQ(real.state.transcript.size(), sim.state.transcript.size());
  for (std::size_t k = 0; k < real.state.transcript.size(); ++k) {
    EXPECT_EQ(real.state.transcript.records()[k].answer,
              sim.state.transcript.records()[k].answer);
  }
  EXPECT_EQ(real.outcome.z1, sim.outcome.z1);
  EXPECT_EQ(real.outcome.z2, sim.outcome.z2);
  EXPECT_EQ(real.outcome.z3, sim.outcome.z3);
  EXPECT_TRUE(std::isnan(sim.state.transcript.records()[0].true_mean));
}

TEST(Simulation, WorldZeroIsTheIdealAttack) {
  AttackConfig c = TinyConfig(Mode::kEncrypted);
  const AttackRun sim = *RunSimulation(Empirical(), 0, c, 14);
  c.mode = Mode::kIdeal;
  const AttackRun ideal = *RunAttackDetailed(Empirical(), c, 14);
  ASSERT_EQ(ideal.state.transcript.size(), sim.state.transcript.size());
  for (std::size_t k = 0; k < ideal.state.transcript.size(); ++k) {
    EXPECT_EQ(ideal.state.transcript.records()[k].answer,
              sim.state.transcript.records()[k].answer);
  }
}

TEST(Distinguisher, DeterministicAndMatchesFlags) {
  const AttackConfig c = TinyConfig(Mode::kEncrypted);
  const AttackRun sim = *RunSimulation(Empirical(), 1, c, 15);
  for (int event : {1, 2, 3}) {
    const bool a = *RunDistinguisher(event, Empirical(), 1, c, 15);
    const bool b = *RunDistinguisher(event, Empirical(), 1, c, 15);
    EXPECT_EQ(a, b);
    const bool flag =
        event == 1 ? sim.outcome.z1 : event == 2 ? sim.outcome.z2 : sim.outcome.z3;
    EXPECT_EQ(a, flag);
  }
  EXPECT_FALSE(RunDistinguisher(4, Empirical(), 1, c, 15).ok());
  EXPECT_FALSE(RunDistinguisher(1, Empirical(), 2, c, 15).ok());
}

TEST(PrivacyAttack, RescaleIdentity) {
  AttackConfig c;
  c.mode = Mode::kPrivacy;
  c.n = 20;
  c.code_length = 500;
  c.trace_threshold = 4.0;
  const AttackRun run = *RunPrivacyAttackDetailed(Empirical(), c, 3);
  std::size_t checked = 0;
  for (const RoundRecord& rec : run.state.rounds) {
    // Every earlier trace landed in the sample.
    bool clean = true;
    for (std::size_t i = 0; i < c.n * 2; ++i) {
      if (run.state.InTracedBefore(i, rec.round) && !run.state.in_sample[i]) {
        clean = false;
      }
    }
    if (!clean) break;
    std::vector<std::size_t> u;
    for (std::size_t i : run.state.sample_set) {
      if (!run.state.InTracedBefore(i, rec.round)) u.push_back(i);
    }
    EXPECT_EQ(u.size(), c.n - rec.round + 1);
    const std::vector<double> means =
        fpcode::Restrict(*run.state.codes[rec.round - 1], u)->ColumnMeans();
    const double scale = PrivacyRescale(c.n, rec.round);
    for (std::size_t j = 0; j < c.code_length.value(); ++j) {
      EXPECT_NEAR(scale * rec.answers[j], means[j], 1e-12);
    }
    ++checked;
  }
  EXPECT_GT(checked, 0u);
}

TEST(PrivacyAttack, RecoversMostOfTheSample) {
  AttackConfig c;
  c.mode = Mode::kPrivacy;
  c.n = 20;
  c.code_length = 800;
  const PrivacyResult r = *RunPrivacyAttack(Empirical(), c, 8);
  EXPECT_EQ(r.outcome.queries, 19u * 800);
  EXPECT_LE(r.symmetric_difference, 4u);
  EXPECT_TRUE(std::is_sorted(r.recovered.begin(), r.recovered.end()));
  EXPECT_EQ(r.symmetric_difference, r.outcome.symmetric_difference);
}

TEST(PrivacyAttack, RejectsAccModes) {
  EXPECT_FALSE(RunPrivacyAttack(Empirical(), TinyConfig(Mode::kNatural), 1).ok());
  EXPECT_FALSE(RunAttack(Empirical(), [] {
                 AttackConfig c;
                 c.mode = Mode::kPrivacy;
                 c.n = 10;
                 c.code_length = 50;
                 return c;
               }(), 1)
                   .ok());
}

TEST(DefaultConstants, FinalBoundAndSubsetProbability) {
  // |q*(D) - phi| <= (n - s0) / p at p = 2000 n, s0 = 500.
  for (std::size_t n : {501, 1000, 100000}) {
    const double bound =
        static_cast<double>(n - 500) / (2000.0 * static_cast<double>(n));
    EXPECT_LE(bound, 1.0 / 2000);
  }
  EXPECT_GE(std::pow(1 - 2.0 / 500, 500), 1 / (4 * std::exp(2.0)));
  // Rescaled slack at r = floor(.99 n).
  const std::size_t n = 1000;
  const std::size_t r = static_cast<std::size_t>(std::floor(0.99 * n));
  EXPECT_LE(static_cast<double>(n) / static_cast<double>(n - r) / 300,
            1.0 / 3);
  EXPECT_LE(PrivacyRescale(n, r) / 300, 1.0 / 3);
}

}  // namespace
}  // namespace sqattack::attacks
