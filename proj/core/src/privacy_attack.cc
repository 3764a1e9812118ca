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

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "sqattack/attacks.h"
#include "sv.h"

namespace sqattack::attacks {
namespace {

absl::StatusOr<AttackRun> Drive(const sq::OracleFactory& factory,
                                const ResolvedConfig& cfg, CipherWorld world,
                                std::uint64_t seed) {
  const SeedStreams streams(seed);
  absl::StatusOr<AttackState> st = PrepareAttack(cfg, streams, world);
  if (!st.ok()) return st.status();
  std::unique_ptr<sq::Oracle> oracle = factory(streams.Seed("oracle"));
  if (oracle == nullptr) {
    return absl::InvalidArgumentError("oracle factory returned null");
  }
  if (absl::Status s = oracle->Init(st->sample); !s.ok()) return s;
  if (absl::Status s = RunRecoveryPhase(*oracle, *st); !s.ok()) return s;
  if (!IsPrivacyMode(cfg.mode()) && !st->transcript.aborted()) {
    absl::StatusOr<AttackOutcome> out = RunAttackPhase(*oracle, *st, streams);
    if (!out.ok()) return out.status();
  }
  AttackRun run;
  run.outcome = Summarize(*st);
  run.state = *std::move(st);
  return run;
}

}  // namespace

absl::StatusOr<AttackRun> RunPrivacyAttackDetailed(
    const sq::OracleFactory& factory, const AttackConfig& config,
    std::uint64_t seed) {
  if (!IsPrivacyMode(config.mode)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "mode ", Sv(ModeName(config.mode)), " is not a privacy mode"));
  }
  absl::StatusOr<ResolvedConfig> cfg = Resolve(config);
  if (!cfg.ok()) return cfg.status();
  return Drive(factory, *cfg,
               IsIdealMode(config.mode) ? CipherWorld::kIdeal
                                        : CipherWorld::kReal,
               seed);
}

absl::StatusOr<PrivacyResult> RunPrivacyAttack(const sq::OracleFactory& factory,
                                               const AttackConfig& config,
                                               std::uint64_t seed) {
  absl::StatusOr<AttackRun> run =
      RunPrivacyAttackDetailed(factory, config, seed);
  if (!run.ok()) return run.status();
  PrivacyResult out;
  out.recovered = run->state.traced;
  std::sort(out.recovered.begin(), out.recovered.end());
  out.symmetric_difference =
      sq::SymmetricDifference(run->state.sample_set, out.recovered);
  out.outcome = run->outcome;
  return out;
}

absl::StatusOr<AttackRun> RunSimulation(const sq::OracleFactory& factory,
                                        int world, const AttackConfig& config,
                                        std::uint64_t seed) {
  if (world != 0 && world != 1) {
    return absl::InvalidArgumentError("world bit must be 0 or 1");
  }
  if (config.mode != Mode::kEncrypted && config.mode != Mode::kPrivacy) {
    return absl::InvalidArgumentError(
        "simulation needs the encrypted or privacy mode");
  }
  absl::StatusOr<ResolvedConfig> cfg = Resolve(config);
  if (!cfg.ok()) return cfg.status();
  return Drive(factory, *cfg,
               world == 1 ? CipherWorld::kChallenge1 : CipherWorld::kChallenge0,
               seed);
}

absl::StatusOr<bool> RunDistinguisher(int event,
                                      const sq::OracleFactory& factory,
                                      int world, const AttackConfig& config,
                                      std::uint64_t seed) {
  if (event < 1 || event > 3) {
    return absl::InvalidArgumentError("event must be 1, 2 or 3");
  }
  if (event == 3 && IsPrivacyMode(config.mode)) {
    return absl::InvalidArgumentError("privacy attacks have no event 3");
  }
  absl::StatusOr<AttackRun> run = RunSimulation(factory, world, config, seed);
  if (!run.ok()) return run.status();
  switch (event) {
    case 1:
      return run->outcome.z1;
    case 2:
      return run->outcome.z2;
    default:
      return run->outcome.z3;
  }
}

}  // namespace sqattack::attacks
