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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "sqattack/stats.h"
#include "sv.h"

namespace sqattack::oracles {

std::string_view OracleKindName(OracleKind kind) {
  switch (kind) {
    case OracleKind::kEmpirical:
      return "empirical";
    case OracleKind::kNoisy:
      return "noisy";
    case OracleKind::kSubsample:
      return "subsample";
    case OracleKind::kCheating:
      return "cheating";
  }
  return "empirical";
}

absl::StatusOr<OracleKind> ParseOracleKind(std::string_view name) {
  for (OracleKind k : {OracleKind::kEmpirical, OracleKind::kNoisy,
                       OracleKind::kSubsample, OracleKind::kCheating}) {
    if (name == OracleKindName(k)) return k;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown oracle '", Sv(name),
      "' (expected empirical, noisy, subsample or cheating)"));
}

std::string_view NoiseLawName(NoiseLaw law) {
  return law == NoiseLaw::kLaplace ? "laplace" : "gaussian";
}

absl::StatusOr<NoiseLaw> ParseNoiseLaw(std::string_view name) {
  if (name == "gaussian") return NoiseLaw::kGaussian;
  if (name == "laplace") return NoiseLaw::kLaplace;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown noise law '", Sv(name), "'"));
}

std::string_view GuessPolicyName(GuessPolicy policy) {
  return policy == GuessPolicy::kRandomKey ? "random-key" : "half";
}

absl::StatusOr<GuessPolicy> ParseGuessPolicy(std::string_view name) {
  if (name == "half") return GuessPolicy::kHalf;
  if (name == "random-key") return GuessPolicy::kRandomKey;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown guess policy '", Sv(name), "'"));
}

absl::Status OracleSpec::Validate() const {
  if (!(sigma >= 0)) return absl::InvalidArgumentError("sigma must be >= 0");
  if (!(fraction > 0 && fraction <= 1)) {
    return absl::InvalidArgumentError("fraction must lie in (0, 1]");
  }
  return absl::OkStatus();
}

absl::Status EmpiricalOracle::Init(const sq::Sample& sample) {
  if (sample.size() == 0) return absl::InvalidArgumentError("empty sample");
  sample_ = sample;
  return absl::OkStatus();
}

double EmpiricalOracle::Answer(const sq::Query& q) {
  std::size_t ones = 0;
  for (const sq::Element& e : sample_.points()) ones += q.Evaluate(e);
  return static_cast<double>(ones) / static_cast<double>(sample_.size());
}

NoisyOracle::NoisyOracle(double sigma, NoiseLaw law, std::uint64_t seed)
    : sigma_(sigma), law_(law), rng_(seed) {}

absl::Status NoisyOracle::Init(const sq::Sample& sample) {
  return inner_.Init(sample);
}

double NoisyOracle::Answer(const sq::Query& q) {
  const double base = inner_.Answer(q);
  if (sigma_ == 0) return base;
  const double noise =
      law_ == NoiseLaw::kGaussian ? rng_.Normal() : rng_.Laplace();
  return std::clamp(base + sigma_ * noise, 0.0, 1.0);
}

std::string NoisyOracle::Name() const {
  return absl::StrCat("noisy(", Sv(NoiseLawName(law_)), ",", sigma_, ")");
}

SubsampleOracle::SubsampleOracle(double fraction, std::uint64_t seed)
    : fraction_(fraction), rng_(seed) {}

absl::Status SubsampleOracle::Init(const sq::Sample& sample) {
  if (sample.size() == 0) return absl::InvalidArgumentError("empty sample");
  const std::size_t keep = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(fraction_ * sample.size() - 1e-9)), 1,
      sample.size());
  std::vector<std::size_t> order(sample.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = 0; k < keep; ++k) {
    std::swap(order[k], order[k + rng_.Below(order.size() - k)]);
  }
  std::vector<sq::Element> points;
  points.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k) points.push_back(sample[order[k]]);
  return inner_.Init(sq::Sample::FromElements(std::move(points)));
}

double SubsampleOracle::Answer(const sq::Query& q) { return inner_.Answer(q); }

std::string SubsampleOracle::Name() const {
  return absl::StrCat("subsample(", fraction_, ")");
}

CheatingOracle::CheatingOracle(bool table_access, GuessPolicy guess,
                               std::uint64_t seed)
    : table_access_(table_access), guess_(guess), rng_(seed) {}

absl::Status CheatingOracle::Init(const sq::Sample& sample) {
  if (sample.size() == 0) return absl::InvalidArgumentError("empty sample");
  sample_ = sample;
  element_bits_ = sample[0].bits();
  for (const sq::Element& e : sample.points()) {
    if (e.has_key()) {
      key_kind_ = e.key().kind();
      break;
    }
  }
  prepared_ = 0;
  known_.clear();
  guessed_.clear();
  return absl::OkStatus();
}

void CheatingOracle::PrepareUniverse(std::size_t universe) {
  if (prepared_ == universe) return;
  prepared_ = universe;
  known_.assign(universe, std::nullopt);
  guessed_.assign(universe, std::nullopt);
  for (const sq::Element& e : sample_.points()) {
    if (e.index() < universe && !known_[e.index()].has_value()) {
      known_[e.index()] = e;
    }
  }
  if (guess_ != GuessPolicy::kRandomKey || !key_kind_.has_value()) return;
  for (std::size_t i = 0; i < universe; ++i) {
    if (known_[i].has_value()) continue;
    absl::StatusOr<crypto::SecretKey> key = crypto::KeyGen(*key_kind_, rng_);
    if (key.ok()) {
      guessed_[i] = sq::Element::Keyed(i, *std::move(key), element_bits_);
    }
  }
}

double CheatingOracle::Answer(const sq::Query& q) {
  const std::optional<std::size_t> universe = q.universe();
  if (!universe.has_value() || *universe == 0) {
    std::size_t ones = 0;
    for (const sq::Element& e : sample_.points()) ones += q.Evaluate(e);
    return static_cast<double>(ones) / static_cast<double>(sample_.size());
  }
  const std::size_t p = *universe;
  if (table_access_ && q.has_table()) {
    std::size_t ones = 0;
    for (std::size_t i = 0; i < p; ++i) ones += q.EvaluateTable(i);
    return static_cast<double>(ones) / static_cast<double>(p);
  }
  PrepareUniverse(p);
  double sum = 0;
  for (std::size_t i = 0; i < p; ++i) {
    if (known_[i].has_value()) {
      sum += q.Evaluate(*known_[i]);
    } else if (guessed_[i].has_value()) {
      sum += q.Evaluate(*guessed_[i]);
    } else if (key_kind_.has_value()) {
      sum += 0.5;
    } else {
      sum += q.Evaluate(sq::Element::Plain(i, element_bits_));
    }
  }
  return std::clamp(sum / static_cast<double>(p), 0.0, 1.0);
}

std::string CheatingOracle::Name() const {
  return absl::StrCat("cheating(", table_access_ ? "table" : "no-table", ",",
                      Sv(GuessPolicyName(guess_)), ")");
}

absl::StatusOr<std::unique_ptr<sq::Oracle>> MakeOracle(const OracleSpec& spec) {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  std::unique_ptr<sq::Oracle> out;
  switch (spec.kind) {
    case OracleKind::kEmpirical:
      out = std::make_unique<EmpiricalOracle>();
      break;
    case OracleKind::kNoisy:
      out = std::make_unique<NoisyOracle>(spec.sigma, spec.law, spec.seed);
      break;
    case OracleKind::kSubsample:
      out = std::make_unique<SubsampleOracle>(spec.fraction, spec.seed);
      break;
    case OracleKind::kCheating:
      out = std::make_unique<CheatingOracle>(spec.table_access, spec.guess,
                                             spec.seed);
      break;
  }
  return out;
}

sq::OracleFactory MakeFactory(const OracleSpec& spec) {
  return [spec](std::uint64_t seed) -> std::unique_ptr<sq::Oracle> {
    OracleSpec s = spec;
    s.seed = Mix64(spec.seed ^ Mix64(seed));
    absl::StatusOr<std::unique_ptr<sq::Oracle>> o = MakeOracle(s);
    return o.ok() ? *std::move(o) : nullptr;
  };
}

absl::StatusOr<AuditReport> NaturalnessAudit(const sq::OracleFactory& factory,
                                             const sq::Sample& sample,
                                             std::size_t universe,
                                             const AuditOptions& options) {
  if (sample.size() == 0) return absl::InvalidArgumentError("empty sample");
  std::vector<bool> in_sample(universe, false);
  for (const sq::Element& e : sample.points()) {
    if (e.index() >= universe || e.has_key()) {
      return absl::InvalidArgumentError(
          "audit sample must hold index elements below the universe size");
    }
    in_sample[e.index()] = true;
  }
  const SeedStreams streams(options.seed);
  std::unique_ptr<sq::Oracle> left = factory(streams.Seed("left"));
  std::unique_ptr<sq::Oracle> right = factory(streams.Seed("right"));
  if (left == nullptr || right == nullptr) {
    return absl::InvalidArgumentError("oracle factory returned null");
  }
  if (absl::Status s = left->Init(sample); !s.ok()) return s;
  if (absl::Status s = right->Init(sample); !s.ok()) return s;
  Rng tables = streams.Stream("tables");
  AuditReport report;
  report.pairs = options.pairs;
  std::vector<double> left_residuals, right_residuals;
  for (std::size_t m = 0; m < options.pairs; ++m) {
    auto table = std::make_shared<std::vector<bool>>(universe);
    auto masked = std::make_shared<std::vector<bool>>(universe);
    for (std::size_t i = 0; i < universe; ++i) {
      (*table)[i] = tables() & 1;
      (*masked)[i] = (*table)[i] && in_sample[i];
    }
    const std::string id = absl::StrCat("audit.", m);
    sq::Query q(
        id, [table](const sq::Element& e) { return (*table)[e.index()]; },
        universe);
    q.WithTable(universe, [table](std::uint64_t i) { return (*table)[i]; });
    sq::Query q2(
        id + "'",
        [masked](const sq::Element& e) { return (*masked)[e.index()]; },
        universe);
    q2.WithTable(universe, [masked](std::uint64_t i) { return (*masked)[i]; });
    const double a = left->Answer(q);
    const double b = right->Answer(q2);
    const double base = *sq::EmpiricalMean(q, sample);
    if (a == b) ++report.identical;
    left_residuals.push_back(a - base);
    right_residuals.push_back(b - base);
  }
  if (report.identical == report.pairs) {
    report.passed = true;
    return report;
  }
  const stats::KsResult ks =
      stats::KolmogorovSmirnov(left_residuals, right_residuals);
  report.ks_statistic = ks.statistic;
  report.p_value = ks.p_value;
  report.passed = ks.p_value >= options.alpha;
  return report;
}

}  // namespace sqattack::oracles
