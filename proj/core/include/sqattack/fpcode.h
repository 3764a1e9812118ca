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

#ifndef SQATTACK_FPCODE_H_
#define SQATTACK_FPCODE_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "sqattack/bit_matrix.h"
#include "sqattack/rng.h"

namespace sqattack::fpcode {

// Constant C in plan_length = ceil(C p^2 ln(p / eps)).
inline constexpr double kLengthConstant = 100.0;

enum class ScoreRule {
  // Real-valued correlation between the centred code rows and the
  // scale-corrected word. Default.
  kCorrelation,
  // Symmetric Tardos score over the columns where the word rounds to 1.
  kTardos,
};

std::string_view ScoreRuleName(ScoreRule rule);
absl::StatusOr<ScoreRule> ParseScoreRule(std::string_view name);

struct CodeParams {
  std::size_t users = 1;
  double epsilon = 0.01;
  std::size_t length = 1;
  double consistency_fraction = 0.99;
  double consistency_slack = 1.0 / 3.0;
  double agreement_slack = 1.0 / 6.0;

  absl::Status Validate() const;
};

absl::StatusOr<std::size_t> PlanLength(std::size_t users, double epsilon);

class BiasVector {
 public:
  BiasVector() = default;
  // Fails unless every value lies strictly inside (0, 1).
  static absl::StatusOr<BiasVector> Create(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  std::span<const double> values() const { return values_; }

 private:
  explicit BiasVector(std::vector<double> values)
      : values_(std::move(values)) {}
  std::vector<double> values_;
};

// Lower truncation bound 1 / (300 p) of the bias distribution.
double MinBias(std::size_t users);

absl::StatusOr<BiasVector> SampleBiases(const CodeParams& params, Rng& rng);

class CodeMatrix {
 public:
  CodeMatrix() = default;
  static absl::StatusOr<CodeMatrix> Create(CodeParams params,
                                           BiasVector biases, BitMatrix bits,
                                           std::uint64_t seed = 0);

  const CodeParams& params() const { return params_; }
  const BiasVector& biases() const { return biases_; }
  const BitMatrix& bits() const { return bits_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t users() const { return bits_.rows(); }
  std::size_t length() const { return bits_.cols(); }

  bool operator()(std::size_t i, std::size_t j) const {
    return bits_.Get(i, j);
  }
  std::span<const std::uint64_t> Row(std::size_t i) const {
    return bits_.Row(i);
  }
  std::vector<double> ColumnMeans() const;

 private:
  CodeParams params_;
  BiasVector biases_;
  BitMatrix bits_;
  std::uint64_t seed_ = 0;
};

struct GenOptions {
  std::size_t max_bytes = std::size_t{1} << 31;
};

// Draws a 64-bit seed from rng and generates from it; the matrix records
// the seed so GenFromSeed(params, code.seed()) rebuilds it.
absl::StatusOr<CodeMatrix> Gen(const CodeParams& params, Rng& rng,
                               const GenOptions& options = {});
absl::StatusOr<CodeMatrix> GenFromSeed(const CodeParams& params,
                                       std::uint64_t seed,
                                       const GenOptions& options = {});
// Bits for already-chosen biases.
absl::StatusOr<BitMatrix> GenBits(std::size_t users, const BiasVector& biases,
                                  Rng& rng, const GenOptions& options = {});

// Row-filtered view F_S over a sorted, deduplicated user set.
class SubsetView {
 public:
  const CodeMatrix& code() const { return *code_; }
  std::span<const std::size_t> users() const { return users_; }
  std::size_t size() const { return users_.size(); }
  std::size_t length() const { return code_->length(); }
  bool operator()(std::size_t k, std::size_t j) const {
    return (*code_)(users_[k], j);
  }
  std::span<const std::uint64_t> Row(std::size_t k) const {
    return code_->Row(users_[k]);
  }
  std::vector<double> ColumnMeans() const;

 private:
  friend absl::StatusOr<SubsetView> Restrict(const CodeMatrix&,
                                             std::span<const std::size_t>);
  SubsetView(const CodeMatrix* code, std::vector<std::size_t> users)
      : code_(code), users_(std::move(users)) {}
  const CodeMatrix* code_;
  std::vector<std::size_t> users_;
};

absl::StatusOr<SubsetView> Restrict(const CodeMatrix& code,
                                    std::span<const std::size_t> users);

class CombinedWord {
 public:
  CombinedWord() = default;
  // Entries are clamped to [0, 1]; NaN becomes 0.
  explicit CombinedWord(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> values_;
};

// Con(F_S) membership: at least f * l columns with |a_j - mean_S(j)| <= s.
absl::StatusOr<bool> IsConsistent(const SubsetView& subset,
                                  const CombinedWord& word, double fraction,
                                  double slack);
// Same test against precomputed subset column means.
absl::StatusOr<bool> IsConsistentWithMeans(std::span<const double> means,
                                           std::span<const double> word,
                                           double fraction, double slack);

struct TraceOutcome {
  std::optional<std::size_t> accused;  // 0-based user index
  double max_score = 0.0;
  double threshold = 0.0;

  bool has_accusation() const { return accused.has_value(); }
};

struct TraceOptions {
  ScoreRule rule = ScoreRule::kCorrelation;
  // Normalised-score threshold; calibrated when unset.
  std::optional<double> threshold;
};

// Normalised scores, one per user. Innocent users (rows independent of the
// word) have mean 0 and variance 1 given the biases. Returns all zeros when
// the word carries no signal (for example a = 0).
absl::StatusOr<std::vector<double>> Scores(const CodeMatrix& code,
                                           const CombinedWord& word,
                                           ScoreRule rule);

absl::StatusOr<TraceOutcome> Trace(const CodeMatrix& code,
                                   const CombinedWord& word,
                                   const TraceOptions& options = {});

absl::StatusOr<double> AgreementFraction(const CodeMatrix& code,
                                         std::span<const std::size_t> users,
                                         double slack);

absl::StatusOr<double> HoeffdingTail(double deviation, double samples,
                                     bool two_sided);

// Threshold calibration.
struct CalibrationSettings {
  std::size_t runs = 1000;
  std::size_t bit_budget = std::size_t{1} << 22;
  std::size_t min_columns = 256;
  std::size_t coalition = 10;
};

// Column count used by calibration runs for a given configuration.
std::size_t CalibrationLength(std::size_t users, std::size_t length,
                              const CalibrationSettings& settings);

// Maximum innocent normalised score of each calibration run, ascending.
std::vector<double> CalibrationSamples(std::size_t users, std::size_t length,
                                       double epsilon, ScoreRule rule,
                                       const CalibrationSettings& settings);

// (1 - eps) quantile of CalibrationSamples with default settings, memoised
// per configuration and optionally persisted in the JSON file named by
// SQATTACK_CALIBRATION_CACHE.
double CalibratedThreshold(std::size_t users, std::size_t length,
                           double epsilon, ScoreRule rule);

// Serialization: "FPC1", u64 p, u64 l, l doubles, then each row as
// ceil(l / 64) little-endian u64 words.
absl::Status WriteCode(const CodeMatrix& code, std::ostream& out);
absl::StatusOr<CodeMatrix> ReadCode(std::istream& in);
absl::Status SaveCode(const CodeMatrix& code, const std::string& path);
absl::StatusOr<CodeMatrix> LoadCode(const std::string& path);

}  // namespace sqattack::fpcode

#endif  // SQATTACK_FPCODE_H_
