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

#include "sqattack/sqcore.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace sqattack::sq {

std::size_t IndexBits(std::size_t universe) {
  std::size_t bits = 0;
  while (bits < 64 && (std::uint64_t{1} << bits) < universe) ++bits;
  return bits;
}

absl::Status CheckPacking(std::size_t key_bits, std::size_t universe,
                          std::size_t d) {
  const std::size_t need = key_bits + IndexBits(universe);
  if (need > d) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension d = ", d, " cannot hold a ", key_bits,
        "-bit key and an index over ", universe, " points; minimal d is ",
        need));
  }
  return absl::OkStatus();
}

absl::StatusOr<Distribution> Distribution::Create(std::vector<Element> support,
                                                  std::vector<double> weights) {
  if (support.empty()) {
    return absl::InvalidArgumentError("distribution needs a nonempty support");
  }
  if (support.size() != weights.size()) {
    return absl::InvalidArgumentError("support and weight sizes differ");
  }
  double total = 0;
  for (double w : weights) {
    if (!(w >= 0)) return absl::InvalidArgumentError("negative weight");
    total += w;
  }
  // Rounding in the sum grows with the support size.
  const double tol =
      1e-12 + 4.0 * std::numeric_limits<double>::epsilon() *
                  static_cast<double>(weights.size());
  if (std::abs(total - 1.0) > tol) {
    return absl::InvalidArgumentError(
        absl::StrCat("weights sum to ", total, ", not 1"));
  }
  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return support[a].index() < support[b].index();
  });
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (std::size_t m = k + 1;
         m < order.size() &&
         support[order[m]].index() == support[order[k]].index();
         ++m) {
      if (support[order[m]].SameAs(support[order[k]])) {
        return absl::InvalidArgumentError("support elements are not distinct");
      }
    }
  }
  Distribution d;
  d.support_ = std::move(support);
  d.weights_ = std::move(weights);
  d.cumulative_.resize(d.weights_.size());
  std::partial_sum(d.weights_.begin(), d.weights_.end(),
                   d.cumulative_.begin());
  return d;
}

absl::StatusOr<Distribution> Distribution::Uniform(
    std::vector<Element> support) {
  const std::size_t n = support.size();
  if (n == 0) {
    return absl::InvalidArgumentError("distribution needs a nonempty support");
  }
  absl::StatusOr<Distribution> d =
      Create(std::move(support), std::vector<double>(n, 1.0 / n));
  if (d.ok()) d->uniform_ = true;
  return d;
}

std::size_t Distribution::DrawPosition(Rng& rng) const {
  if (uniform_) return rng.Below(support_.size());
  const double u = rng.Uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(it - cumulative_.begin(), support_.size() - 1);
}

Query::Query(std::string id, Predicate predicate, std::size_t description_size)
    : id_(std::move(id)),
      predicate_(std::move(predicate)),
      description_size_(description_size) {}

Query& Query::WithTable(std::size_t universe, Table table) {
  universe_ = universe;
  table_ = std::move(table);
  return *this;
}

Query& Query::WithUniverse(std::size_t universe) {
  universe_ = universe;
  return *this;
}

Query ConstantQuery(Bit value, std::string id) {
  if (id.empty()) id = value ? "one" : "zero";
  const bool v = value != 0;
  return Query(std::move(id), [v](const Element&) { return v; }, 1);
}

void Sample::Finish() {
  unique_.clear();
  unique_.reserve(points_.size());
  for (const Element& e : points_) unique_.push_back(e.index());
  std::sort(unique_.begin(), unique_.end());
  unique_.erase(std::unique(unique_.begin(), unique_.end()), unique_.end());
}

absl::StatusOr<Sample> Sample::Iid(const Distribution& d, std::size_t n,
                                   Rng& rng) {
  if (d.size() == 0) return absl::InvalidArgumentError("empty distribution");
  Sample s;
  s.points_.reserve(n);
  s.positions_.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t pos = d.DrawPosition(rng);
    s.positions_.push_back(pos);
    s.points_.push_back(d.support()[pos]);
  }
  s.Finish();
  return s;
}

absl::StatusOr<Sample> Sample::WithoutReplacement(const Distribution& d,
                                                  std::size_t n, Rng& rng) {
  if (n > d.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot draw ", n, " distinct points from ", d.size()));
  }
  std::vector<std::size_t> pos(d.size());
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  for (std::size_t k = 0; k < n; ++k) {
    std::swap(pos[k], pos[k + rng.Below(pos.size() - k)]);
  }
  Sample s;
  s.positions_.assign(pos.begin(), pos.begin() + n);
  for (std::size_t p : s.positions_) s.points_.push_back(d.support()[p]);
  s.Finish();
  return s;
}

Sample Sample::FromElements(std::vector<Element> points) {
  Sample s;
  s.points_ = std::move(points);
  s.Finish();
  return s;
}

double TrueMean(const Query& q, const Distribution& d) {
  if (d.uniform()) {
    std::size_t ones = 0;
    for (const Element& e : d.support()) ones += q.Peek(e);
    return static_cast<double>(ones) / static_cast<double>(d.size());
  }
  double sum = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (q.Peek(d.support()[k])) sum += d.weights()[k];
  }
  return std::clamp(sum, 0.0, 1.0);
}

absl::StatusOr<double> EmpiricalMean(const Query& q, const Sample& x) {
  if (x.size() == 0) return absl::InvalidArgumentError("empty sample");
  std::size_t ones = 0;
  for (const Element& e : x.points()) ones += q.Peek(e);
  return static_cast<double>(ones) / static_cast<double>(x.size());
}

absl::Status Transcript::Append(TranscriptRecord record) {
  if (!(record.answer >= 0.0 && record.answer <= 1.0)) {
    return absl::AbortedError(absl::StrCat(
        "protocol violation: answer ", record.answer, " to query '",
        record.query_id, "' outside [0, 1]"));
  }
  record.sequence = records_.size();
  records_.push_back(std::move(record));
  return absl::OkStatus();
}

bool JudgeAccuracy(const Transcript& t, double alpha) {
  for (const TranscriptRecord& r : t.records()) {
    if (!(std::abs(r.answer - r.true_mean) <= alpha)) return false;
  }
  return true;
}

bool JudgeSampleAccuracy(const Transcript& t, double alpha) {
  for (const TranscriptRecord& r : t.records()) {
    if (!(std::abs(r.answer - r.empirical_mean) <= alpha)) return false;
  }
  return true;
}

namespace {

absl::Status CheckDimension(std::span<const Element> elements, std::size_t d) {
  for (const Element& e : elements) {
    if (e.bits() != d) {
      return absl::InvalidArgumentError(absl::StrCat(
          "element of ", e.bits(), " bits in a ", d, "-bit universe"));
    }
  }
  return absl::OkStatus();
}

// Issues up to k queries, logging both means against d and x.
template <typename Next>
void PlayQueries(Next next, Oracle& oracle, const Distribution& dist,
                 const Sample& x, std::size_t k, Transcript& t) {
  for (std::size_t j = 0; j < k; ++j) {
    std::optional<Query> q = next(t);
    if (!q.has_value()) break;
    TranscriptRecord r;
    r.round = static_cast<std::int64_t>(j + 1);
    r.label = "query";
    r.query_id = q->id();
    r.answer = oracle.Answer(*q);
    r.true_mean = TrueMean(*q, dist);
    r.empirical_mean = *EmpiricalMean(*q, x);
    if (absl::Status s = t.Append(std::move(r)); !s.ok()) {
      t.Abort(std::move(s));
      break;
    }
  }
}

}  // namespace

absl::StatusOr<AccGameResult> RunAccGame(Analyst& analyst, Oracle& oracle,
                                         std::size_t n, std::size_t d,
                                         std::size_t k, Rng& rng) {
  if (n == 0) return absl::InvalidArgumentError("sample size must be >= 1");
  Rng analyst_rng(rng());
  Rng sample_rng(rng());
  AccGameResult result;
  absl::StatusOr<Distribution> dist = analyst.ChooseDistribution(d, analyst_rng);
  if (!dist.ok()) return dist.status();
  if (absl::Status s = CheckDimension(dist->support(), d); !s.ok()) return s;
  result.distribution = *std::move(dist);
  absl::StatusOr<Sample> x = Sample::Iid(result.distribution, n, sample_rng);
  if (!x.ok()) return x.status();
  result.sample = *std::move(x);
  if (absl::Status s = oracle.Init(result.sample); !s.ok()) return s;
  PlayQueries([&](const Transcript& t) { return analyst.NextQuery(t); },
              oracle, result.distribution, result.sample, k,
              result.transcript);
  return result;
}

std::size_t SymmetricDifference(std::span<const std::size_t> a,
                                std::span<const std::size_t> b) {
  std::vector<std::size_t> x(a.begin(), a.end());
  std::vector<std::size_t> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  std::sort(y.begin(), y.end());
  y.erase(std::unique(y.begin(), y.end()), y.end());
  std::vector<std::size_t> out;
  std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(),
                                std::back_inserter(out));
  return out.size();
}

absl::StatusOr<NonPrivacyResult> RunNonPrivacyGame(PrivacyAnalyst& analyst,
                                                   Oracle& oracle,
                                                   std::size_t n,
                                                   std::size_t d,
                                                   std::size_t k, Rng& rng) {
  if (n == 0) return absl::InvalidArgumentError("sample size must be >= 1");
  Rng analyst_rng(rng());
  Rng sample_rng(rng());
  absl::StatusOr<std::vector<Element>> y =
      analyst.ChooseUniverse(n, d, analyst_rng);
  if (!y.ok()) return y.status();
  if (y->size() != 2 * n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "universe has ", y->size(), " elements; expected ", 2 * n));
  }
  if (absl::Status s = CheckDimension(*y, d); !s.ok()) return s;
  absl::StatusOr<Distribution> dist = Distribution::Uniform(*std::move(y));
  if (!dist.ok()) return dist.status();
  absl::StatusOr<Sample> x = Sample::WithoutReplacement(*dist, n, sample_rng);
  if (!x.ok()) return x.status();
  if (absl::Status s = oracle.Init(*x); !s.ok()) return s;
  NonPrivacyResult result;
  PlayQueries([&](const Transcript& t) { return analyst.NextQuery(t); },
              oracle, *dist, *x, k, result.transcript);
  result.sample_positions.assign(x->positions().begin(), x->positions().end());
  std::sort(result.sample_positions.begin(), result.sample_positions.end());
  result.recovered = analyst.Recover(result.transcript);
  std::sort(result.recovered.begin(), result.recovered.end());
  result.recovered.erase(
      std::unique(result.recovered.begin(), result.recovered.end()),
      result.recovered.end());
  result.symmetric_difference =
      SymmetricDifference(result.sample_positions, result.recovered);
  return result;
}

}  // namespace sqattack::sq
