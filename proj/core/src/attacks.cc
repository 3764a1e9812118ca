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
#include <numeric>

#include "absl/strings/str_cat.h"
#include "sv.h"

namespace sqattack::attacks {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool Simulated(CipherWorld w) {
  return w == CipherWorld::kChallenge0 || w == CipherWorld::kChallenge1;
}

absl::StatusOr<std::vector<crypto::SecretKey>> MakeKeys(
    const ResolvedConfig& cfg, const SeedStreams& streams) {
  std::vector<crypto::SecretKey> keys;
  if (!cfg.scheme.has_value()) return keys;
  keys.reserve(cfg.users);
  for (std::size_t i = 0; i < cfg.users; ++i) {
    Rng rng = streams.Stream("keys", i);
    absl::StatusOr<crypto::SecretKey> key = crypto::KeyGen(*cfg.scheme, rng);
    if (!key.ok()) return key.status();
    keys.push_back(*std::move(key));
  }
  return keys;
}

std::vector<std::size_t> Unmasked(const AttackState& st, std::size_t r,
                                  bool sample_only) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < st.cfg.users; ++i) {
    if (st.InTracedBefore(i, r)) continue;
    if (sample_only && !st.in_sample[i]) continue;
    rows.push_back(i);
  }
  return rows;
}

std::vector<double> Means(const BitMatrix& bits,
                          std::span<const std::size_t> rows, double denom) {
  const std::vector<std::uint32_t> counts = bits.ColumnCounts(rows);
  std::vector<double> out(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) out[j] = counts[j] / denom;
  return out;
}

// Round answers (rescaled in privacy modes) in Con(F^r restricted to U).
// Vacuous when U is empty.
bool RoundConsistent(const AttackState& st, const RoundRecord& rec) {
  const std::vector<std::size_t> uncovered = Unmasked(st, rec.round, true);
  if (uncovered.empty()) return true;
  const std::vector<double> targets =
      Means(st.codes[rec.round - 1]->bits(), uncovered,
            static_cast<double>(uncovered.size()));
  std::vector<double> word = rec.answers;
  if (IsPrivacyMode(st.cfg.mode())) {
    const double scale = PrivacyRescale(st.cfg.config.n, rec.round);
    for (double& v : word) v *= scale;
  }
  const fpcode::CombinedWord combined(std::move(word));
  return *fpcode::IsConsistentWithMeans(targets, combined.values(),
                                        st.cfg.config.consistency_fraction,
                                        st.cfg.config.consistency_slack);
}

}  // namespace

std::string_view ModeName(Mode mode) {
  switch (mode) {
    case Mode::kNatural:
      return "natural";
    case Mode::kEncrypted:
      return "encrypted";
    case Mode::kIdeal:
      return "ideal";
    case Mode::kPrivacy:
      return "privacy";
    case Mode::kIdealPrivacy:
      return "ideal-privacy";
  }
  return "natural";
}

absl::StatusOr<Mode> ParseMode(std::string_view name) {
  for (Mode m : {Mode::kNatural, Mode::kEncrypted, Mode::kIdeal, Mode::kPrivacy,
                 Mode::kIdealPrivacy}) {
    if (name == ModeName(m)) return m;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown mode '", Sv(name),
      "' (expected natural, encrypted, ideal, privacy or ideal-privacy)"));
}

std::size_t ResolvedConfig::PlannedQueries() const {
  return rounds * length + (IsPrivacyMode(config.mode) ? 0 : 1);
}

absl::StatusOr<ResolvedConfig> Resolve(const AttackConfig& c) {
  ResolvedConfig r;
  r.config = c;
  const bool privacy = IsPrivacyMode(c.mode);
  if (c.n == 0) return absl::InvalidArgumentError("n must be >= 1");
  if (privacy) {
    r.users = 2 * c.n;
  } else {
    if (c.n <= c.reserve) {
      return absl::InvalidArgumentError(absl::StrCat(
          "n = ", c.n, " must exceed the reserve s0 = ", c.reserve));
    }
    if (c.kappa == 0) return absl::InvalidArgumentError("kappa must be >= 1");
    r.users = c.kappa * c.n;
  }
  if (r.users < 4) {
    return absl::InvalidArgumentError(
        absl::StrCat("population p = ", r.users, " must be >= 4"));
  }
  r.rounds = c.rounds.has_value()
                 ? *c.rounds
                 : (privacy ? static_cast<std::size_t>(
                                  std::floor(0.99 * static_cast<double>(c.n)))
                            : c.n - c.reserve);
  if (privacy && r.rounds > c.n) {
    return absl::InvalidArgumentError(
        absl::StrCat("privacy rounds ", r.rounds, " exceed n = ", c.n));
  }
  if (c.code_length.has_value()) {
    r.length = *c.code_length;
  } else {
    absl::StatusOr<std::size_t> planned = fpcode::PlanLength(r.users, c.epsilon);
    if (!planned.ok()) return planned.status();
    r.length = *planned;
  }
  fpcode::CodeParams params;
  params.users = r.users;
  params.length = r.length;
  params.epsilon = c.epsilon;
  params.consistency_fraction = c.consistency_fraction;
  params.consistency_slack = c.consistency_slack;
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  if (!(c.final_tolerance >= 0)) {
    return absl::InvalidArgumentError("final tolerance must be >= 0");
  }
  if (!privacy) {
    if (!(c.phi_plus >= 0 && c.phi_plus <= 1)) {
      return absl::InvalidArgumentError("phi_plus must lie in [0, 1]");
    }
    const double b = c.phi_plus * static_cast<double>(r.users);
    const double rb = std::floor(b + 1e-9);
    r.subset_size = static_cast<std::size_t>(rb);
  }
  const bool encrypted = IsEncryptedMode(c.mode);
  const std::size_t matrices = r.rounds * (encrypted ? 2 : 1);
  const std::size_t row_bytes = WordsFor(r.length) * 8;
  if (matrices > 0 && row_bytes > c.memory_budget / matrices / r.users) {
    const std::size_t max_len = c.memory_budget / matrices / r.users / 8 * 64;
    return absl::ResourceExhaustedError(absl::StrCat(
        "codes and ciphertext tables for l = ", r.length, " need ",
        matrices * r.users * row_bytes, " bytes, over the budget of ",
        c.memory_budget, "; largest feasible l is ", max_len));
  }
  r.ciphertexts_per_key = r.rounds * r.length + (privacy ? 0 : 1);
  const std::size_t index_bits = sq::IndexBits(r.users);
  std::size_t key_bits = 0;
  if (encrypted) {
    crypto::SchemeKind kind;
    kind.scheme = c.scheme;
    if (c.scheme == crypto::Scheme::kOneTimePad) {
      kind.parameter = c.scheme_parameter.value_or(r.ciphertexts_per_key);
      if (kind.parameter < r.ciphertexts_per_key) {
        return absl::InvalidArgumentError(absl::StrCat(
            "pad budget k = ", kind.parameter, " is below the ",
            r.ciphertexts_per_key, " ciphertexts each key must carry"));
      }
    } else if (c.scheme_parameter.has_value()) {
      kind.parameter = *c.scheme_parameter;
    } else if (c.d.has_value() && *c.d > index_bits) {
      kind.parameter = *c.d - index_bits;
    } else {
      kind.parameter = 128;
    }
    if (absl::Status s = kind.Validate(); !s.ok()) return s;
    r.scheme = kind;
    key_bits = kind.KeyLength();
  }
  r.dimension = c.d.value_or(std::max<std::size_t>(1, key_bits + index_bits));
  if (absl::Status s = sq::CheckPacking(key_bits, r.users, r.dimension);
      !s.ok()) {
    return s;
  }
  return r;
}

absl::StatusOr<Planted> BuildPlantedDistribution(const ResolvedConfig& cfg,
                                                 const SeedStreams& streams) {
  Planted planted;
  absl::StatusOr<std::vector<crypto::SecretKey>> keys = MakeKeys(cfg, streams);
  if (!keys.ok()) return keys.status();
  planted.keys = *std::move(keys);
  std::vector<sq::Element> support;
  support.reserve(cfg.users);
  for (std::size_t i = 0; i < cfg.users; ++i) {
    support.push_back(planted.keys.empty()
                          ? sq::Element::Plain(i, cfg.dimension)
                          : sq::Element::Keyed(i, planted.keys[i],
                                               cfg.dimension));
  }
  absl::StatusOr<sq::Distribution> dist =
      sq::Distribution::Uniform(std::move(support));
  if (!dist.ok()) return dist.status();
  planted.distribution = *std::move(dist);
  return planted;
}

absl::StatusOr<AttackState> PrepareAttack(const ResolvedConfig& cfg,
                                          const SeedStreams& streams,
                                          CipherWorld world) {
  if (cfg.mode() == Mode::kNatural && world != CipherWorld::kReal) {
    return absl::InvalidArgumentError("natural mode has no ciphertexts");
  }
  AttackState st;
  st.cfg = cfg;
  st.seed = streams.base();
  st.world = world;
  st.referee_knows_keys = !Simulated(world);
  absl::StatusOr<Planted> planted = BuildPlantedDistribution(cfg, streams);
  if (!planted.ok()) return planted.status();
  st.distribution = std::move(planted->distribution);
  st.keys = std::move(planted->keys);

  Rng sample_rng = streams.Stream("sample");
  absl::StatusOr<sq::Sample> sample =
      IsPrivacyMode(cfg.mode())
          ? sq::Sample::WithoutReplacement(st.distribution, cfg.config.n,
                                           sample_rng)
          : sq::Sample::Iid(st.distribution, cfg.config.n, sample_rng);
  if (!sample.ok()) return sample.status();
  st.sample = *std::move(sample);
  st.in_sample.assign(cfg.users, 0);
  for (std::uint64_t i : st.sample.unique_indices()) {
    st.sample_set.push_back(i);
    st.in_sample[i] = 1;
  }

  fpcode::CodeParams params;
  params.users = cfg.users;
  params.length = cfg.length;
  params.epsilon = cfg.config.epsilon;
  params.consistency_fraction = cfg.config.consistency_fraction;
  params.consistency_slack = cfg.config.consistency_slack;
  fpcode::GenOptions gen;
  gen.max_bytes = cfg.config.memory_budget;
  for (std::size_t r = 1; r <= cfg.rounds; ++r) {
    absl::StatusOr<fpcode::CodeMatrix> code =
        fpcode::GenFromSeed(params, streams.Seed("codes", r), gen);
    if (!code.ok()) return code.status();
    st.codes.push_back(
        std::make_shared<const fpcode::CodeMatrix>(*std::move(code)));
  }
  st.traced_round =
      std::make_shared<std::vector<std::size_t>>(cfg.users, kNeverTraced);

  if (!IsEncryptedMode(cfg.mode())) return st;
  if (Simulated(world)) {
    absl::StatusOr<std::vector<crypto::SecretKey>> ck = MakeKeys(cfg, streams);
    if (!ck.ok()) return ck.status();
    st.challenge_keys = *std::move(ck);
  }
  std::vector<BitMatrix> tables(cfg.rounds, BitMatrix(cfg.users, cfg.length));
  const std::vector<std::uint64_t> zeros(WordsFor(cfg.length), 0);
  for (std::size_t i = 0; i < cfg.users; ++i) {
    for (std::size_t r = 1; r <= cfg.rounds; ++r) {
      const std::span<const std::uint64_t> row = st.codes[r - 1]->Row(i);
      absl::StatusOr<crypto::CiphertextRun> run;
      if (st.in_sample[i] || world == CipherWorld::kReal) {
        run = crypto::EncryptBits(st.keys[i], row, cfg.length);
      } else if (world == CipherWorld::kIdeal) {
        run = crypto::EncryptBits(st.keys[i], zeros, cfg.length);
      } else {
        run = crypto::EOracleBits(world == CipherWorld::kChallenge1 ? 1 : 0,
                                  st.challenge_keys, i, row, cfg.length);
      }
      if (!run.ok()) return run.status();
      std::copy(run->payload.begin(), run->payload.end(),
                tables[r - 1].MutableRow(i).begin());
    }
  }
  for (BitMatrix& t : tables) {
    st.payloads.push_back(std::make_shared<const BitMatrix>(std::move(t)));
  }
  return st;
}

sq::Query MakeRecoveryQuery(const AttackState& st, std::size_t r,
                            std::size_t j) {
  const std::size_t p = st.cfg.users;
  std::shared_ptr<std::vector<std::size_t>> traced = st.traced_round;
  std::string id = absl::StrCat("r", r, ".", j);
  if (!IsEncryptedMode(st.cfg.mode())) {
    std::shared_ptr<const fpcode::CodeMatrix> code = st.codes[r - 1];
    auto bit = [code, traced, r, j, p](std::uint64_t i) {
      return i < p && (*traced)[i] >= r && (*code)(i, j);
    };
    sq::Query q(std::move(id),
                [bit](const sq::Element& e) { return bit(e.index()); }, p);
    q.WithTable(p, bit);
    return q;
  }
  std::shared_ptr<const BitMatrix> payload = st.payloads[r - 1];
  const std::uint64_t nonce = (r - 1) * st.cfg.length + j;
  sq::Query q(
      std::move(id),
      [payload, traced, r, j, p, nonce](const sq::Element& e) {
        const std::uint64_t i = e.index();
        if (i >= p || !e.has_key() || (*traced)[i] < r) return false;
        const crypto::Ciphertext c{
            static_cast<crypto::Bit>(payload->Get(i, j)), nonce};
        absl::StatusOr<crypto::Bit> m = crypto::Decrypt(e.key(), c);
        return m.ok() && *m == 1;
      },
      p);
  q.WithUniverse(p);
  return q;
}

std::vector<double> RecoveryTrueMeans(const AttackState& st, std::size_t r) {
  if (!st.referee_knows_keys) {
    return std::vector<double>(st.cfg.length, kNaN);
  }
  const std::vector<std::size_t> rows =
      Unmasked(st, r, IsIdealMode(st.cfg.mode()));
  return Means(st.codes[r - 1]->bits(), rows,
               static_cast<double>(st.cfg.users));
}

double PrivacyRescale(std::size_t n, std::size_t r) {
  return static_cast<double>(n) / static_cast<double>(n - r + 1);
}

absl::Status RunRecoveryPhase(sq::Oracle& oracle, AttackState& st) {
  const ResolvedConfig& cfg = st.cfg;
  const bool privacy = IsPrivacyMode(cfg.mode());
  fpcode::TraceOptions options;
  options.rule = cfg.config.score_rule;
  options.threshold = cfg.config.trace_threshold;
  for (std::size_t r = st.rounds.size() + 1; r <= cfg.rounds; ++r) {
    const fpcode::CodeMatrix& code = *st.codes[r - 1];
    const std::vector<double> true_means = RecoveryTrueMeans(st, r);
    const std::vector<std::size_t> uncovered = Unmasked(st, r, true);
    std::vector<double> targets;
    if (!uncovered.empty()) {
      targets = Means(code.bits(), uncovered,
                      static_cast<double>(uncovered.size()));
    }
    RoundRecord rec;
    rec.round = r;
    rec.uncovered = uncovered.size();
    rec.answers.resize(cfg.length);
    for (std::size_t j = 0; j < cfg.length; ++j) {
      const sq::Query q = MakeRecoveryQuery(st, r, j);
      const double a = oracle.Answer(q);
      ++st.queries_issued;
      sq::TranscriptRecord tr;
      tr.round = static_cast<std::int64_t>(r);
      tr.label = "recovery";
      tr.query_id = q.id();
      tr.answer = a;
      tr.true_mean = true_means[j];
      tr.empirical_mean = *sq::EmpiricalMean(q, st.sample);
      if (!targets.empty()) tr.target = targets[j];
      if (absl::Status s = st.transcript.Append(std::move(tr)); !s.ok()) {
        st.transcript.Abort(std::move(s));
        return absl::OkStatus();
      }
      rec.answers[j] = a;
    }
    std::vector<double> word = rec.answers;
    if (privacy) {
      const double scale = PrivacyRescale(cfg.config.n, r);
      for (double& v : word) v *= scale;
    }
    const fpcode::CombinedWord combined(std::move(word));
    rec.consistent = RoundConsistent(st, rec);
    absl::StatusOr<fpcode::TraceOutcome> trace =
        fpcode::Trace(code, combined, options);
    if (!trace.ok()) return trace.status();
    rec.trace = *trace;
    if (rec.trace.accused.has_value()) {
      const std::size_t i = *rec.trace.accused;
      if ((*st.traced_round)[i] != kNeverTraced) {
        rec.duplicate = true;
      } else {
        (*st.traced_round)[i] = r;
        st.traced.push_back(i);
        rec.added = true;
      }
    }
    st.rounds.push_back(std::move(rec));
  }
  return absl::OkStatus();
}

absl::StatusOr<AttackOutcome> RunAttackPhase(sq::Oracle& oracle,
                                             AttackState& st,
                                             const SeedStreams& streams) {
  const ResolvedConfig& cfg = st.cfg;
  if (IsPrivacyMode(cfg.mode())) {
    return absl::FailedPreconditionError("privacy attacks have no final query");
  }
  if (st.rounds.size() != cfg.rounds || st.transcript.aborted()) {
    return absl::FailedPreconditionError("recovery phase incomplete");
  }
  const std::size_t p = cfg.users;
  Rng phi_rng = streams.Stream("phi");
  st.phi = (phi_rng() & 1) ? cfg.config.phi_plus : 0.0;
  const std::size_t b = st.phi == 0.0 ? 0 : cfg.subset_size;
  Rng subset_rng = streams.Stream("subset");
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = 0; k < b; ++k) {
    std::swap(order[k], order[k + subset_rng.Below(p - k)]);
  }
  st.subset.assign(order.begin(), order.begin() + b);
  std::sort(st.subset.begin(), st.subset.end());
  auto message = std::make_shared<std::vector<char>>(p, 0);
  for (std::size_t i : st.subset) (*message)[i] = 1;
  st.final_message = message;

  std::shared_ptr<std::vector<std::size_t>> traced = st.traced_round;
  std::optional<sq::Query> q;
  const std::uint64_t nonce = cfg.rounds * cfg.length;
  if (!IsEncryptedMode(cfg.mode())) {
    auto bit = [message, traced, p](std::uint64_t i) {
      return i < p && (*traced)[i] == kNeverTraced && (*message)[i];
    };
    q.emplace("final", [bit](const sq::Element& e) { return bit(e.index()); },
              p);
    q->WithTable(p, bit);
  } else {
    auto payload = std::make_shared<std::vector<char>>(p, 0);
    for (std::size_t i = 0; i < p; ++i) {
      const crypto::Bit m = static_cast<crypto::Bit>((*message)[i]);
      absl::StatusOr<crypto::Ciphertext> c;
      if (st.in_sample[i] || st.world == CipherWorld::kReal) {
        c = crypto::Encrypt(st.keys[i], m);
      } else if (st.world == CipherWorld::kIdeal) {
        c = crypto::Encrypt(st.keys[i], 0);
      } else {
        c = crypto::EOracle(st.world == CipherWorld::kChallenge1 ? 1 : 0,
                            st.challenge_keys, i, m);
      }
      if (!c.ok()) return c.status();
      if (c->nonce != nonce) {
        return absl::InternalError("final ciphertext nonce out of step");
      }
      (*payload)[i] = static_cast<char>(c->payload);
    }
    st.final_payload = payload;
    q.emplace(
        "final",
        [payload, traced, p, nonce](const sq::Element& e) {
          const std::uint64_t i = e.index();
          if (i >= p || !e.has_key() || (*traced)[i] != kNeverTraced) {
            return false;
          }
          const crypto::Ciphertext c{
              static_cast<crypto::Bit>((*payload)[i]), nonce};
          absl::StatusOr<crypto::Bit> m = crypto::Decrypt(e.key(), c);
          return m.ok() && *m == 1;
        },
        p);
    q->WithUniverse(p);
  }
  const double a = oracle.Answer(*q);
  ++st.queries_issued;
  double truth = kNaN;
  if (st.referee_knows_keys) {
    std::size_t ones = 0;
    for (std::size_t i = 0; i < p; ++i) {
      if ((*traced)[i] != kNeverTraced || !(*message)[i]) continue;
      if (IsIdealMode(cfg.mode()) && !st.in_sample[i]) continue;
      ++ones;
    }
    truth = static_cast<double>(ones) / static_cast<double>(p);
  }
  sq::TranscriptRecord tr;
  tr.round = static_cast<std::int64_t>(cfg.rounds + 1);
  tr.label = "final";
  tr.query_id = q->id();
  tr.answer = a;
  tr.true_mean = truth;
  tr.empirical_mean = *sq::EmpiricalMean(*q, st.sample);
  tr.target = st.phi;
  if (absl::Status s = st.transcript.Append(std::move(tr)); !s.ok()) {
    st.transcript.Abort(std::move(s));
    return Summarize(st);
  }
  st.final_answer = a;
  st.final_true_mean = truth;
  st.final_done = true;
  return Summarize(st);
}

EventFlags EvaluateEvents(const AttackState& st) {
  EventFlags f;
  f.z1 = std::all_of(st.rounds.begin(), st.rounds.end(),
                     [&](const RoundRecord& r) { return RoundConsistent(st, r); });
  std::size_t missed = 0;
  for (std::size_t i : st.sample_set) {
    if ((*st.traced_round)[i] == kNeverTraced) ++missed;
  }
  f.z2 = missed <= st.cfg.config.reserve;
  f.z3 = f.z2 && st.final_done &&
         std::abs(st.final_answer - st.phi) <= st.cfg.config.final_tolerance;
  return f;
}

AttackOutcome Summarize(const AttackState& st) {
  const ResolvedConfig& cfg = st.cfg;
  AttackOutcome o;
  o.mode = cfg.mode();
  o.seed = st.seed;
  o.n = cfg.config.n;
  o.kappa = IsPrivacyMode(cfg.mode()) ? 2 : cfg.config.kappa;
  o.users = cfg.users;
  o.reserve = cfg.config.reserve;
  o.rounds = cfg.rounds;
  o.length = cfg.length;
  o.sample_distinct = st.sample_set.size();
  o.traced_total = st.traced.size();
  for (std::size_t i : st.traced) o.traced_in_sample += st.in_sample[i];
  o.missed = o.sample_distinct - o.traced_in_sample;
  o.recovery_fraction =
      o.sample_distinct == 0
          ? 0.0
          : static_cast<double>(o.traced_in_sample) / o.sample_distinct;
  for (const RoundRecord& r : st.rounds) {
    if (!r.trace.has_accusation()) ++o.no_accusations;
    if (r.duplicate) ++o.duplicates;
  }
  o.symmetric_difference = o.missed + (o.traced_total - o.traced_in_sample);
  const EventFlags flags = EvaluateEvents(st);
  o.z1 = flags.z1;
  o.z2 = flags.z2;
  o.z3 = flags.z3;
  o.queries = st.queries_issued;
  if (IsPrivacyMode(cfg.mode())) {
    o.recovery_succeeded = static_cast<double>(o.symmetric_difference) <=
                           static_cast<double>(o.n) / 100.0;
  } else {
    o.recovery_succeeded = o.missed <= cfg.config.reserve;
  }
  o.phi = st.phi;
  o.final_answer = st.final_answer;
  o.final_true_mean = st.final_true_mean;
  if (st.final_done && !std::isnan(st.final_true_mean)) {
    o.final_accurate = std::abs(st.final_answer - st.final_true_mean) <=
                       cfg.config.final_tolerance;
    if (!IsIdealMode(cfg.mode())) {
      o.final_bound_holds =
          std::abs(st.final_true_mean - st.phi) <=
          static_cast<double>(st.traced.size()) / cfg.users + 1e-12;
    }
  }
  o.aborted = st.transcript.aborted();
  if (o.aborted) o.error = std::string(st.transcript.status().message());
  return o;
}

absl::StatusOr<AttackRun> RunAttackDetailed(const sq::OracleFactory& factory,
                                            const AttackConfig& config,
                                            std::uint64_t seed) {
  if (IsPrivacyMode(config.mode)) {
    return absl::InvalidArgumentError(
        "privacy modes run through RunPrivacyAttack");
  }
  absl::StatusOr<ResolvedConfig> cfg = Resolve(config);
  if (!cfg.ok()) return cfg.status();
  const SeedStreams streams(seed);
  absl::StatusOr<AttackState> st = PrepareAttack(
      *cfg, streams,
      IsIdealMode(config.mode) ? CipherWorld::kIdeal : CipherWorld::kReal);
  if (!st.ok()) return st.status();
  std::unique_ptr<sq::Oracle> oracle = factory(streams.Seed("oracle"));
  if (oracle == nullptr) {
    return absl::InvalidArgumentError("oracle factory returned null");
  }
  if (absl::Status s = oracle->Init(st->sample); !s.ok()) return s;
  if (absl::Status s = RunRecoveryPhase(*oracle, *st); !s.ok()) return s;
  AttackRun run;
  if (!st->transcript.aborted()) {
    absl::StatusOr<AttackOutcome> out = RunAttackPhase(*oracle, *st, streams);
    if (!out.ok()) return out.status();
  }
  run.outcome = Summarize(*st);
  run.state = *std::move(st);
  return run;
}

absl::StatusOr<AttackOutcome> RunAttack(const sq::OracleFactory& factory,
                                        const AttackConfig& config,
                                        std::uint64_t seed) {
  absl::StatusOr<AttackRun> run = RunAttackDetailed(factory, config, seed);
  if (!run.ok()) return run.status();
  return run->outcome;
}

}  // namespace sqattack::attacks
