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

#ifndef SQATTACK_ORACLES_H_
#define SQATTACK_ORACLES_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "sqattack/rng.h"
#include "sqattack/sqcore.h"

namespace sqattack::oracles {

enum class OracleKind { kEmpirical, kNoisy, kSubsample, kCheating };
enum class NoiseLaw { kGaussian, kLaplace };
// What the cheating oracle credits for rows whose key it lacks.
enum class GuessPolicy {
  kHalf,       // a flat 1/2
  kRandomKey,  // decrypt with a key it draws itself
};

std::string_view OracleKindName(OracleKind kind);
absl::StatusOr<OracleKind> ParseOracleKind(std::string_view name);
std::string_view NoiseLawName(NoiseLaw law);
absl::StatusOr<NoiseLaw> ParseNoiseLaw(std::string_view name);
std::string_view GuessPolicyName(GuessPolicy policy);
absl::StatusOr<GuessPolicy> ParseGuessPolicy(std::string_view name);

struct OracleSpec {
  OracleKind kind = OracleKind::kEmpirical;
  double sigma = 0.0;
  NoiseLaw law = NoiseLaw::kGaussian;
  double fraction = 1.0;
  bool table_access = true;
  GuessPolicy guess = GuessPolicy::kHalf;
  std::uint64_t seed = 0;

  absl::Status Validate() const;
};

// Answers the empirical mean over the sample.
class EmpiricalOracle : public sq::Oracle {
 public:
  absl::Status Init(const sq::Sample& sample) override;
  double Answer(const sq::Query& q) override;
  std::string Name() const override { return "empirical"; }

 protected:
  const sq::Sample& sample() const { return sample_; }

 private:
  sq::Sample sample_;
};

// Empirical mean plus iid noise, clamped to [0, 1].
class NoisyOracle : public sq::Oracle {
 public:
  NoisyOracle(double sigma, NoiseLaw law, std::uint64_t seed);
  absl::Status Init(const sq::Sample& sample) override;
  double Answer(const sq::Query& q) override;
  std::string Name() const override;

 private:
  double sigma_;
  NoiseLaw law_;
  Rng rng_;
  EmpiricalOracle inner_;
};

// Empirical mean over a fixed random subsample of ceil(fraction * n) points.
class SubsampleOracle : public sq::Oracle {
 public:
  SubsampleOracle(double fraction, std::uint64_t seed);
  absl::Status Init(const sq::Sample& sample) override;
  double Answer(const sq::Query& q) override;
  std::string Name() const override;

 private:
  double fraction_;
  Rng rng_;
  EmpiricalOracle inner_;
};

// Evaluates queries outside the sample. With a table it answers the mean
// over the whole declared universe; otherwise, when the query declares an
// index universe, it evaluates each index with the key the sample holds
// for it and applies the guess policy to the rest. Falls back to the
// empirical mean when the query exposes neither.
class CheatingOracle : public sq::Oracle {
 public:
  CheatingOracle(bool table_access, GuessPolicy guess, std::uint64_t seed);
  absl::Status Init(const sq::Sample& sample) override;
  double Answer(const sq::Query& q) override;
  std::string Name() const override;

 private:
  void PrepareUniverse(std::size_t universe);

  bool table_access_;
  GuessPolicy guess_;
  Rng rng_;
  sq::Sample sample_;
  std::size_t element_bits_ = 0;
  std::optional<crypto::SchemeKind> key_kind_;
  std::size_t prepared_ = 0;
  std::vector<std::optional<sq::Element>> known_;
  std::vector<std::optional<sq::Element>> guessed_;
};

absl::StatusOr<std::unique_ptr<sq::Oracle>> MakeOracle(const OracleSpec& spec);
// Factory whose argument is mixed into the spec seed.
sq::OracleFactory MakeFactory(const OracleSpec& spec);

struct AuditOptions {
  std::size_t pairs = 1000;
  double alpha = 0.01;
  std::uint64_t seed = 0;
};

struct AuditReport {
  std::size_t pairs = 0;
  std::size_t identical = 0;  // pairs with bit-identical answers
  double ks_statistic = 0.0;
  double p_value = 1.0;
  bool passed = true;
};

// Builds query pairs (q, q') that agree on the sample's indices and where
// q' is 0 elsewhere; q goes to one fresh instance and q' to another with an
// independent seed. Passes when all pairs answer identically or a
// two-sample KS test on the residuals answer - q(x) does not reject at
// alpha. The sample must consist of index elements below `universe`.
absl::StatusOr<AuditReport> NaturalnessAudit(const sq::OracleFactory& factory,
                                             const sq::Sample& sample,
                                             std::size_t universe,
                                             const AuditOptions& options = {});

}  // namespace sqattack::oracles

#endif  // SQATTACK_ORACLES_H_
