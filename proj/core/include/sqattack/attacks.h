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

// Reconstruction attacks against statistical-query oracles.
//
// Conventions: users (planted indices) are 0-based, rounds are 1-based
// (r = 1..R), columns are 0-based. In encrypted modes the ciphertext for
// round r, user i, column j uses nonce (r - 1) * l + j under key i, and the
// final ciphertext uses nonce R * l.

#ifndef SQATTACK_ATTACKS_H_
#define SQATTACK_ATTACKS_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "sqattack/bit_matrix.h"
#include "sqattack/crypto.h"
#include "sqattack/fpcode.h"
#include "sqattack/rng.h"
#include "sqattack/sqcore.h"

namespace sqattack::attacks {

enum class Mode { kNatural, kEncrypted, kIdeal, kPrivacy, kIdealPrivacy };

std::string_view ModeName(Mode mode);
absl::StatusOr<Mode> ParseMode(std::string_view name);
inline bool IsPrivacyMode(Mode m) {
  return m == Mode::kPrivacy || m == Mode::kIdealPrivacy;
}
inline bool IsIdealMode(Mode m) {
  return m == Mode::kIdeal || m == Mode::kIdealPrivacy;
}
inline bool IsEncryptedMode(Mode m) { return m != Mode::kNatural; }

struct AttackConfig {
  Mode mode = Mode::kNatural;
  std::size_t n = 0;
  std::optional<std::size_t> d;  // derived minimal dimension when unset
  std::size_t kappa = 2000;
  std::size_t reserve = 500;
  std::optional<std::size_t> rounds;
  double phi_plus = 1.0 / 500;
  double final_tolerance = 1.0 / 2000;
  std::optional<std::size_t> code_length;  // plan_length(p, eps) when unset
  double epsilon = 0.01;
  double consistency_fraction = 0.99;
  double consistency_slack = 1.0 / 3.0;
  fpcode::ScoreRule score_rule = fpcode::ScoreRule::kCorrelation;
  std::optional<double> trace_threshold;  // calibrated when unset
  crypto::Scheme scheme = crypto::Scheme::kOneTimePad;
  // Stream lambda or pad budget. Defaults: the pad covers exactly the
  // ciphertexts one key must carry; lambda = d - ceil(log2 p) or 128.
  std::optional<std::size_t> scheme_parameter;
  std::size_t memory_budget = std::size_t{1} << 31;
};

struct ResolvedConfig {
  AttackConfig config;
  std::size_t users = 0;   // p
  std::size_t rounds = 0;  // R
  std::size_t length = 0;  // l
  std::size_t dimension = 0;
  std::size_t ciphertexts_per_key = 0;
  std::size_t subset_size = 0;  // |B| when phi = phi_plus
  std::optional<crypto::SchemeKind> scheme;

  Mode mode() const { return config.mode; }
  // R * l (+ 1 for the final query in Acc modes).
  std::size_t PlannedQueries() const;
};

absl::StatusOr<ResolvedConfig> Resolve(const AttackConfig& config);

struct Planted {
  sq::Distribution distribution;
  std::vector<crypto::SecretKey> keys;  // empty in natural mode
};

// Uniform over p elements; key i comes from substream ("keys", i).
absl::StatusOr<Planted> BuildPlantedDistribution(const ResolvedConfig& cfg,
                                                 const SeedStreams& streams);

inline constexpr std::size_t kNeverTraced =
    std::numeric_limits<std::size_t>::max();

struct RoundRecord {
  std::size_t round = 0;
  std::vector<double> answers;  // raw oracle answers a^r
  fpcode::TraceOutcome trace;
  bool added = false;      // accused user joined T^r
  bool duplicate = false;  // accused user already in T^{r-1}
  bool consistent = true;  // answers in Con(F^r restricted to U)
  std::size_t uncovered = 0;  // |U| = |S \ T^{r-1}|
};

// Where ciphertexts for rows outside the sample come from.
enum class CipherWorld {
  kReal,         // encrypt the code bit
  kIdeal,        // encrypt 0
  kChallenge0,   // challenge oracle, world 0
  kChallenge1,   // challenge oracle, world 1
};

struct AttackState {
  ResolvedConfig cfg;
  std::uint64_t seed = 0;
  CipherWorld world = CipherWorld::kReal;
  sq::Distribution distribution;
  std::vector<crypto::SecretKey> keys;
  // Challenger-held keys for simulated worlds (empty otherwise).
  std::vector<crypto::SecretKey> challenge_keys;
  sq::Sample sample;
  std::vector<std::size_t> sample_set;  // S, sorted
  std::vector<char> in_sample;          // size p
  std::vector<std::shared_ptr<const fpcode::CodeMatrix>> codes;  // [r - 1]
  std::vector<std::shared_ptr<const BitMatrix>> payloads;        // [r - 1]
  // Round at which each user was traced, kNeverTraced otherwise.
  std::shared_ptr<std::vector<std::size_t>> traced_round;
  std::vector<std::size_t> traced;  // T^R in tracing order
  std::vector<RoundRecord> rounds;
  sq::Transcript transcript;
  std::size_t queries_issued = 0;
  bool referee_knows_keys = true;

  // Final phase.
  bool final_done = false;
  double phi = 0.0;
  std::vector<std::size_t> subset;  // B, sorted
  std::shared_ptr<const std::vector<char>> final_message;
  std::shared_ptr<const std::vector<char>> final_payload;
  double final_answer = 0.0;
  double final_true_mean = 0.0;

  bool InTracedBefore(std::size_t i, std::size_t r) const {
    return (*traced_round)[i] < r;
  }
};

// Builds everything the figures generate before round 1: keys, planted
// distribution, sample, all R codes and every recovery ciphertext.
absl::StatusOr<AttackState> PrepareAttack(const ResolvedConfig& cfg,
                                          const SeedStreams& streams,
                                          CipherWorld world);

// q^r_j: zero on T^{r-1}; otherwise the code bit (natural) or the
// decryption of c^r(i', j) under the element's key (encrypted).
sq::Query MakeRecoveryQuery(const AttackState& state, std::size_t r,
                            std::size_t j);

// Exact (1/p) sum over non-masked users of the plaintext behind q^r_j for
// every column j of round r.
std::vector<double> RecoveryTrueMeans(const AttackState& state, std::size_t r);

// Runs rounds 1..R. On a protocol violation the state is left partial and
// state.transcript.status() records the error.
absl::Status RunRecoveryPhase(sq::Oracle& oracle, AttackState& state);

struct AttackOutcome {
  Mode mode = Mode::kNatural;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t kappa = 0;
  std::size_t users = 0;
  std::size_t reserve = 0;
  std::size_t rounds = 0;
  std::size_t length = 0;
  std::size_t missed = 0;  // |S \ T^R|
  double recovery_fraction = 0.0;
  std::size_t sample_distinct = 0;
  std::size_t traced_total = 0;
  std::size_t traced_in_sample = 0;
  std::size_t no_accusations = 0;
  std::size_t duplicates = 0;
  double phi = 0.0;
  double final_answer = 0.0;
  double final_true_mean = 0.0;
  bool recovery_succeeded = false;
  bool final_accurate = false;
  bool z1 = false;
  bool z2 = false;
  bool z3 = false;
  std::size_t queries = 0;
  // |q*(D) - phi| <= |T^R| / p; checked in natural and encrypted modes.
  bool final_bound_holds = true;
  std::size_t symmetric_difference = 0;  // privacy modes
  bool aborted = false;
  std::string error;
};

// Draws phi and B, encrypts the final message, issues q* and scores it.
absl::StatusOr<AttackOutcome> RunAttackPhase(sq::Oracle& oracle,
                                             AttackState& state,
                                             const SeedStreams& streams);

struct EventFlags {
  bool z1 = false;
  bool z2 = false;
  bool z3 = false;
};

EventFlags EvaluateEvents(const AttackState& state);

// Outcome fields derivable from the state (no oracle calls).
AttackOutcome Summarize(const AttackState& state);

struct AttackRun {
  AttackState state;
  AttackOutcome outcome;
};

// Natural, encrypted or ideal attack end to end.
absl::StatusOr<AttackRun> RunAttackDetailed(const sq::OracleFactory& factory,
                                            const AttackConfig& config,
                                            std::uint64_t seed);
absl::StatusOr<AttackOutcome> RunAttack(const sq::OracleFactory& factory,
                                        const AttackConfig& config,
                                        std::uint64_t seed);

// Privacy or ideal-privacy attack: p = 2n, sample without replacement,
// answers rescaled by n / (n - r + 1) before tracing, no final query.
absl::StatusOr<AttackRun> RunPrivacyAttackDetailed(
    const sq::OracleFactory& factory, const AttackConfig& config,
    std::uint64_t seed);

struct PrivacyResult {
  std::vector<std::size_t> recovered;  // T^R, sorted
  std::size_t symmetric_difference = 0;
  AttackOutcome outcome;
};

absl::StatusOr<PrivacyResult> RunPrivacyAttack(const sq::OracleFactory& factory,
                                               const AttackConfig& config,
                                               std::uint64_t seed);

// Rescaling factor applied to round-r answers in privacy modes.
double PrivacyRescale(std::size_t n, std::size_t r);

// Simulated attack in which ciphertexts for rows outside the sample come
// from the challenge oracle with the given world bit. Reference true means
// are unavailable to the simulator and are reported as NaN.
absl::StatusOr<AttackRun> RunSimulation(const sq::OracleFactory& factory,
                                        int world, const AttackConfig& config,
                                        std::uint64_t seed);
// Indicator of event Z_c (c in {1, 2, 3}) in the simulation.
absl::StatusOr<bool> RunDistinguisher(int event,
                                      const sq::OracleFactory& factory,
                                      int world, const AttackConfig& config,
                                      std::uint64_t seed);

// Line-delimited JSON: header, query records, per-round trace records,
// final record and stored flags.
std::string AttackToJsonLines(const AttackState& state,
                              const AttackOutcome& outcome);

struct ReplayResult {
  EventFlags stored;
  EventFlags recomputed;
  std::size_t stored_queries = 0;
  std::size_t recomputed_queries = 0;
  bool matches() const {
    return stored.z1 == recomputed.z1 && stored.z2 == recomputed.z2 &&
           stored.z3 == recomputed.z3 &&
           stored_queries == recomputed_queries;
  }
};

// Recomputes Z flags from a transcript produced by AttackToJsonLines.
absl::StatusOr<ReplayResult> ReplayTranscript(std::string_view jsonl);

}  // namespace sqattack::attacks

#endif  // SQATTACK_ATTACKS_H_
