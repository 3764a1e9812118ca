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


#include <memory>

#include "benchmark/benchmark.h"
#include "sqattack/attacks.h"
#include "sqattack/oracles.h"

namespace sqattack::attacks {
namespace {

AttackConfig Desk(Mode mode) {
  AttackConfig c;
  c.mode = mode;
  c.n = 40;
  c.kappa = 50;
  c.reserve = 10;
  c.code_length = 2000;
  c.phi_plus = 0.1;
  c.final_tolerance = 1.0 / 40;
  c.trace_threshold = 4.0;
  return c;
}

// One recovery round: p queries' worth of answers at desk scale.
void BM_RecoveryRound(benchmark::State& state, Mode mode) {
  AttackConfig c = Desk(mode);
  c.rounds = 1;
  const ResolvedConfig cfg = *Resolve(c);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    state.PauseTiming();
    AttackState st = *PrepareAttack(cfg, TrialStreams(++seed, 0),
                                    CipherWorld::kReal);
    std::unique_ptr<sq::Oracle> oracle = oracles::MakeFactory({})(seed);
    benchmark::DoNotOptimize(oracle->Init(st.sample));
    state.ResumeTiming();
    benchmark::DoNotOptimize(RunRecoveryPhase(*oracle, st));
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK_CAPTURE(BM_RecoveryRound, natural, Mode::kNatural)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RecoveryRound, encrypted, Mode::kEncrypted)
    ->Unit(benchmark::kMillisecond);

void BM_FullAttack(benchmark::State& state, Mode mode) {
  const sq::OracleFactory factory = oracles::MakeFactory({});
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunAttack(factory, Desk(mode), ++seed));
  }
}
BENCHMARK_CAPTURE(BM_FullAttack, natural, Mode::kNatural)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_FullAttack, encrypted, Mode::kEncrypted)
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace sqattack::attacks

BENCHMARK_MAIN();
