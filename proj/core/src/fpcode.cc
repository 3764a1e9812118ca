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

#include "sqattack/fpcode.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "absl/strings/str_cat.h"
#include "sv.h"

namespace sqattack::fpcode {
namespace {

// 64 independent Bernoulli(P / 2^64) bits: lane t is 1 iff a uniform 64-bit
// U_t is below P, resolved most significant bit first. Lanes outside
// `lanes` stay 0.
inline std::uint64_t BernoulliLanes(std::uint64_t threshold, std::uint64_t lanes,
                                    Rng& rng) {
  std::uint64_t result = 0;
  std::uint64_t undecided = lanes;
  for (int k = 63; k >= 0 && undecided != 0; --k) {
    const std::uint64_t u = rng();
    const std::uint64_t bit = -((threshold >> k) & 1);
    result |= undecided & ~u & bit;
    undecided &= ~(u ^ bit);
  }
  return result;
}

struct LinearScore {
  std::vector<double> weights;       // added when F(i, j) = 1
  std::vector<std::uint64_t> mask;   // columns with nonzero weight
  double offset = 0.0;               // subtracted from every row sum
  double scale = 0.0;                // standard deviation for innocents
};

LinearScore BuildScore(const BiasVector& biases, std::span<const double> a,
                       ScoreRule rule) {
  const std::size_t l = biases.size();
  LinearScore s;
  s.weights.assign(l, 0.0);
  s.mask.assign(WordsFor(l), 0);
  if (rule == ScoreRule::kTardos) {
    std::size_t active = 0;
    for (std::size_t j = 0; j < l; ++j) {
      if (a[j] < 0.5) continue;
      const double p = biases[j];
      s.weights[j] = 1.0 / std::sqrt(p * (1 - p));
      s.offset += std::sqrt(p / (1 - p));
      s.mask[j / 64] |= std::uint64_t{1} << (j % 64);
      ++active;
    }
    s.scale = std::sqrt(static_cast<double>(active));
    return s;
  }
  double sum_a = 0, sum_p = 0;
  for (std::size_t j = 0; j < l; ++j) {
    sum_a += a[j];
    sum_p += biases[j];
  }
  const double c = sum_a / sum_p;
  double var = 0;
  for (std::size_t j = 0; j < l; ++j) {
    const double p = biases[j];
    const double w = a[j] - c * p;
    if (w == 0) continue;
    const double alpha = w / std::sqrt(p * (1 - p));
    s.weights[j] = alpha;
    s.offset += alpha * p;
    s.mask[j / 64] |= std::uint64_t{1} << (j % 64);
    var += w * w;
  }
  s.scale = std::sqrt(var);
  return s;
}

// Score sums for every row, one 64-column word at a time through 4-bit
// lookup tables.
std::vector<double> RowSums(const BitMatrix& bits, const LinearScore& s) {
  const std::size_t l = bits.cols();
  std::vector<double> sums(bits.rows(), 0.0);
  std::array<std::array<double, 16>, 16> table;
  for (std::size_t w = 0; w < bits.words_per_row(); ++w) {
    const std::uint64_t mask = s.mask[w];
    if (mask == 0) continue;
    for (std::size_t q = 0; q < 16; ++q) {
      table[q][0] = 0.0;
      for (unsigned v = 1; v < 16; ++v) {
        const std::size_t j = w * 64 + q * 4 + std::countr_zero(v);
        table[q][v] = table[q][v & (v - 1)] + (j < l ? s.weights[j] : 0.0);
      }
    }
    for (std::size_t i = 0; i < bits.rows(); ++i) {
      const std::uint64_t x = bits.Row(i)[w] & mask;
      double lo = 0, hi = 0;
      for (std::size_t q = 0; q < 16; q += 2) {
        lo += table[q][(x >> (4 * q)) & 15];
        hi += table[q + 1][(x >> (4 * q + 4)) & 15];
      }
      sums[i] += lo + hi;
    }
  }
  return sums;
}

}  // namespace

std::string_view ScoreRuleName(ScoreRule rule) {
  return rule == ScoreRule::kTardos ? "tardos" : "correlation";
}

absl::StatusOr<ScoreRule> ParseScoreRule(std::string_view name) {
  if (name == "correlation") return ScoreRule::kCorrelation;
  if (name == "tardos") return ScoreRule::kTardos;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown score rule '", Sv(name),
                   "' (expected correlation or tardos)"));
}

absl::Status CodeParams::Validate() const {
  if (users < 1) return absl::InvalidArgumentError("users must be >= 1");
  if (length < 1) return absl::InvalidArgumentError("length must be >= 1");
  if (!(epsilon > 0 && epsilon < 1)) {
    return absl::InvalidArgumentError("epsilon must lie in (0, 1)");
  }
  if (!(consistency_slack > 0 && consistency_slack < 0.5)) {
    return absl::InvalidArgumentError("consistency slack must lie in (0, 1/2)");
  }
  if (!(agreement_slack > 0 && agreement_slack < 0.5)) {
    return absl::InvalidArgumentError("agreement slack must lie in (0, 1/2)");
  }
  if (!(consistency_fraction > 0 && consistency_fraction <= 1)) {
    return absl::InvalidArgumentError(
        "consistency fraction must lie in (0, 1]");
  }
  return absl::OkStatus();
}

absl::StatusOr<std::size_t> PlanLength(std::size_t users, double epsilon) {
  if (users < 1) return absl::InvalidArgumentError("users must be >= 1");
  if (!(epsilon > 0 && epsilon < 1)) {
    return absl::InvalidArgumentError("epsilon must lie in (0, 1)");
  }
  const double p = static_cast<double>(users);
  const double l = std::ceil(kLengthConstant * p * p * std::log(p / epsilon));
  if (!(l < 0x1.0p62)) {
    return absl::OutOfRangeError("planned code length overflows");
  }
  return static_cast<std::size_t>(l);
}

absl::StatusOr<BiasVector> BiasVector::Create(std::vector<double> values) {
  for (double v : values) {
    if (!(v > 0 && v < 1)) {
      return absl::InvalidArgumentError(
          absl::StrCat("bias ", v, " outside (0, 1)"));
    }
  }
  return BiasVector(std::move(values));
}

double MinBias(std::size_t users) {
  return 1.0 / (300.0 * static_cast<double>(users));
}

absl::StatusOr<BiasVector> SampleBiases(const CodeParams& params, Rng& rng) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  const double lo = MinBias(params.users);
  const double hi = 1.0 - lo;
  const double t = std::asin(std::sqrt(lo));
  const double width = std::numbers::pi / 2 - 2 * t;
  std::vector<double> values(params.length);
  for (double& v : values) {
    const double s = std::sin(t + width * rng.Uniform());
    v = std::clamp(s * s, lo, hi);
  }
  return BiasVector::Create(std::move(values));
}

absl::StatusOr<CodeMatrix> CodeMatrix::Create(CodeParams params,
                                              BiasVector biases,
                                              BitMatrix bits,
                                              std::uint64_t seed) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  if (bits.rows() != params.users || bits.cols() != params.length ||
      biases.size() != params.length) {
    return absl::InvalidArgumentError("code matrix shape mismatch");
  }
  CodeMatrix code;
  code.params_ = params;
  code.biases_ = std::move(biases);
  code.bits_ = std::move(bits);
  code.seed_ = seed;
  return code;
}

std::vector<double> CodeMatrix::ColumnMeans() const {
  const std::vector<std::uint32_t> counts = bits_.ColumnCounts();
  std::vector<double> means(counts.size());
  const double p = static_cast<double>(users());
  for (std::size_t j = 0; j < counts.size(); ++j) means[j] = counts[j] / p;
  return means;
}

absl::StatusOr<BitMatrix> GenBits(std::size_t users, const BiasVector& biases,
                                  Rng& rng, const GenOptions& options) {
  const std::size_t l = biases.size();
  if (users < 1 || l < 1) {
    return absl::InvalidArgumentError("empty code matrix");
  }
  const std::size_t words = WordsFor(l);
  if (words > options.max_bytes / 8 / users) {
    const std::size_t max_len = options.max_bytes / 8 / users * 64;
    return absl::ResourceExhaustedError(absl::StrCat(
        "code matrix ", users, "x", l, " exceeds the memory budget of ",
        options.max_bytes, " bytes; largest feasible length is ", max_len));
  }
  BitMatrix bits(users, l);
  const std::size_t row_blocks = WordsFor(users);
  Block64 block;
  for (std::size_t cb = 0; cb < words; ++cb) {
    const std::size_t cols = std::min<std::size_t>(64, l - cb * 64);
    for (std::size_t rb = 0; rb < row_blocks; ++rb) {
      const std::size_t rows = std::min<std::size_t>(64, users - rb * 64);
      const std::uint64_t lanes =
          rows == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << rows) - 1;
      for (std::size_t c = 0; c < cols; ++c) {
        // Biases lie in (0, 1), so the product fits in 64 bits exactly.
        const auto threshold =
            static_cast<std::uint64_t>(biases[cb * 64 + c] * 0x1p64);
        block[c] = BernoulliLanes(threshold, lanes, rng);
      }
      for (std::size_t c = cols; c < 64; ++c) block[c] = 0;
      Transpose64(block);
      for (std::size_t t = 0; t < rows; ++t) {
        bits.MutableRow(rb * 64 + t)[cb] = block[t];
      }
    }
  }
  return bits;
}

absl::StatusOr<CodeMatrix> GenFromSeed(const CodeParams& params,
                                       std::uint64_t seed,
                                       const GenOptions& options) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  Rng rng(seed);
  absl::StatusOr<BiasVector> biases = SampleBiases(params, rng);
  if (!biases.ok()) return biases.status();
  absl::StatusOr<BitMatrix> bits = GenBits(params.users, *biases, rng, options);
  if (!bits.ok()) return bits.status();
  return CodeMatrix::Create(params, *std::move(biases), *std::move(bits),
                            seed);
}

absl::StatusOr<CodeMatrix> Gen(const CodeParams& params, Rng& rng,
                               const GenOptions& options) {
  return GenFromSeed(params, rng(), options);
}

std::vector<double> SubsetView::ColumnMeans() const {
  const std::vector<std::uint32_t> counts = code_->bits().ColumnCounts(users_);
  std::vector<double> means(counts.size());
  const double n = static_cast<double>(users_.size());
  for (std::size_t j = 0; j < counts.size(); ++j) means[j] = counts[j] / n;
  return means;
}

absl::StatusOr<SubsetView> Restrict(const CodeMatrix& code,
                                    std::span<const std::size_t> users) {
  std::vector<std::size_t> sorted(users.begin(), users.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (!sorted.empty() && sorted.back() >= code.users()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "user ", sorted.back(), " out of range for ", code.users(), " users"));
  }
  return SubsetView(&code, std::move(sorted));
}

CombinedWord::CombinedWord(std::vector<double> values)
    : values_(std::move(values)) {
  for (double& v : values_) v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
}

absl::StatusOr<bool> IsConsistentWithMeans(std::span<const double> means,
                                           std::span<const double> word,
                                           double fraction, double slack) {
  if (means.size() != word.size()) {
    return absl::InvalidArgumentError("word length differs from code length");
  }
  std::size_t good = 0;
  for (std::size_t j = 0; j < means.size(); ++j) {
    if (std::abs(word[j] - means[j]) <= slack) ++good;
  }
  return static_cast<double>(good) >=
         fraction * static_cast<double>(means.size());
}

absl::StatusOr<bool> IsConsistent(const SubsetView& subset,
                                  const CombinedWord& word, double fraction,
                                  double slack) {
  if (subset.size() == 0) {
    return absl::InvalidArgumentError("consistency needs a nonempty subset");
  }
  return IsConsistentWithMeans(subset.ColumnMeans(), word.values(), fraction,
                               slack);
}

absl::StatusOr<std::vector<double>> Scores(const CodeMatrix& code,
                                           const CombinedWord& word,
                                           ScoreRule rule) {
  if (word.size() != code.length()) {
    return absl::InvalidArgumentError("word length differs from code length");
  }
  const LinearScore s = BuildScore(code.biases(), word.values(), rule);
  if (!(s.scale > 1e-12)) return std::vector<double>(code.users(), 0.0);
  std::vector<double> z = RowSums(code.bits(), s);
  for (double& v : z) v = (v - s.offset) / s.scale;
  return z;
}

absl::StatusOr<TraceOutcome> Trace(const CodeMatrix& code,
                                   const CombinedWord& word,
                                   const TraceOptions& options) {
  if (word.size() != code.length()) {
    return absl::InvalidArgumentError("word length differs from code length");
  }
  TraceOutcome out;
  out.threshold = options.threshold.has_value()
                      ? *options.threshold
                      : CalibratedThreshold(code.users(), code.length(),
                                            code.params().epsilon,
                                            options.rule);
  const LinearScore s = BuildScore(code.biases(), word.values(), options.rule);
  if (!(s.scale > 1e-12)) return out;
  const std::vector<double> sums = RowSums(code.bits(), s);
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < code.users(); ++i) {
    const double z = (sums[i] - s.offset) / s.scale;
    if (z > best_score) {
      best_score = z;
      best = i;
    }
  }
  out.max_score = best_score;
  if (best_score > out.threshold) out.accused = best;
  return out;
}

absl::StatusOr<double> AgreementFraction(const CodeMatrix& code,
                                         std::span<const std::size_t> users,
                                         double slack) {
  if (users.empty()) {
    return absl::InvalidArgumentError("agreement needs a nonempty subset");
  }
  absl::StatusOr<SubsetView> subset = Restrict(code, users);
  if (!subset.ok()) return subset.status();
  const std::vector<double> full = code.ColumnMeans();
  const std::vector<double> part = subset->ColumnMeans();
  std::size_t good = 0;
  for (std::size_t j = 0; j < full.size(); ++j) {
    if (std::abs(full[j] - part[j]) <= slack) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(full.size());
}

absl::StatusOr<double> HoeffdingTail(double deviation, double samples,
                                     bool two_sided) {
  if (!(deviation >= 0)) {
    return absl::InvalidArgumentError("deviation must be nonnegative");
  }
  if (!(samples >= 1)) {
    return absl::InvalidArgumentError("sample count must be >= 1");
  }
  const double tail = std::exp(-2.0 * deviation * deviation * samples);
  return two_sided ? 2.0 * tail : tail;
}

}  // namespace sqattack::fpcode
