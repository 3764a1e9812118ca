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

#ifndef SQATTACK_SQCORE_H_
#define SQATTACK_SQCORE_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "sqattack/crypto.h"
#include "sqattack/rng.h"

namespace sqattack::sq {

using Bit = std::uint8_t;

// ceil(log2 universe); 0 for a one-point universe.
std::size_t IndexBits(std::size_t universe);

// Fails with the minimal dimension when key_bits + IndexBits(universe) > d.
absl::Status CheckPacking(std::size_t key_bits, std::size_t universe,
                          std::size_t d);

// A d-bit universe element: a bare index, or an (index, key) pair.
class Element {
 public:
  Element() = default;
  static Element Plain(std::uint64_t index, std::size_t bits) {
    Element e;
    e.index_ = index;
    e.bits_ = bits;
    return e;
  }
  static Element Keyed(std::uint64_t index, crypto::SecretKey key,
                       std::size_t bits) {
    Element e = Plain(index, bits);
    e.key_ = std::move(key);
    return e;
  }

  std::uint64_t index() const { return index_; }
  std::size_t bits() const { return bits_; }
  bool has_key() const { return key_.valid(); }
  const crypto::SecretKey& key() const { return key_; }

  bool SameAs(const Element& other) const {
    return index_ == other.index_ && bits_ == other.bits_ &&
           key_.SameKeyAs(other.key_);
  }

 private:
  std::uint64_t index_ = 0;
  std::size_t bits_ = 0;
  crypto::SecretKey key_;
};

class Distribution {
 public:
  Distribution() = default;
  static absl::StatusOr<Distribution> Create(std::vector<Element> support,
                                             std::vector<double> weights);
  static absl::StatusOr<Distribution> Uniform(std::vector<Element> support);

  std::span<const Element> support() const { return support_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return support_.size(); }
  bool uniform() const { return uniform_; }

  // Support position of one draw.
  std::size_t DrawPosition(Rng& rng) const;

 private:
  std::vector<Element> support_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  bool uniform_ = false;
};

// A 0/1 predicate with description-size accounting. Copies share one
// evaluation counter.
class Query {
 public:
  using Predicate = std::function<bool(const Element&)>;
  using Table = std::function<bool(std::uint64_t)>;

  Query() = default;
  Query(std::string id, Predicate predicate, std::size_t description_size);

  // Attaches an explicit table over indices [0, universe); the predicate must
  // agree with it on index-only elements.
  Query& WithTable(std::size_t universe, Table table);
  // Declares the index domain without a table.
  Query& WithUniverse(std::size_t universe);

  const std::string& id() const { return id_; }
  std::size_t description_size() const { return description_size_; }
  std::optional<std::size_t> universe() const { return universe_; }
  bool has_table() const { return static_cast<bool>(table_); }

  // Counted evaluations (oracle side).
  Bit Evaluate(const Element& e) const {
    evaluations_->fetch_add(1, std::memory_order_relaxed);
    return predicate_(e) ? 1 : 0;
  }
  Bit EvaluateTable(std::uint64_t index) const {
    evaluations_->fetch_add(1, std::memory_order_relaxed);
    return table_(index) ? 1 : 0;
  }
  // Uncounted evaluation (referee side).
  Bit Peek(const Element& e) const { return predicate_(e) ? 1 : 0; }
  Bit PeekTable(std::uint64_t index) const { return table_(index) ? 1 : 0; }

  std::uint64_t evaluations() const {
    return evaluations_->load(std::memory_order_relaxed);
  }

 private:
  std::string id_;
  Predicate predicate_;
  Table table_;
  std::size_t description_size_ = 0;
  std::optional<std::size_t> universe_;
  std::shared_ptr<std::atomic<std::uint64_t>> evaluations_ =
      std::make_shared<std::atomic<std::uint64_t>>(0);
};

Query ConstantQuery(Bit value, std::string id = "");

class Sample {
 public:
  Sample() = default;
  static absl::StatusOr<Sample> Iid(const Distribution& d, std::size_t n,
                                    Rng& rng);
  // Uniformly random n-subset of the support, in random order.
  static absl::StatusOr<Sample> WithoutReplacement(const Distribution& d,
                                                   std::size_t n, Rng& rng);
  static Sample FromElements(std::vector<Element> points);

  std::span<const Element> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const Element& operator[](std::size_t k) const { return points_[k]; }
  // Support positions of the draws (empty for FromElements).
  std::span<const std::size_t> positions() const { return positions_; }
  // Sorted distinct element indices: the set S.
  std::span<const std::uint64_t> unique_indices() const { return unique_; }

 private:
  void Finish();
  std::vector<Element> points_;
  std::vector<std::size_t> positions_;
  std::vector<std::uint64_t> unique_;
};

double TrueMean(const Query& q, const Distribution& d);
absl::StatusOr<double> EmpiricalMean(const Query& q, const Sample& x);

struct TranscriptRecord {
  std::uint64_t sequence = 0;  // logical timestamp, assigned on append
  std::int64_t round = 0;
  std::string label;
  std::string query_id;
  double answer = 0.0;
  double true_mean = 0.0;
  double empirical_mean = 0.0;
  std::optional<double> target;
};

class Transcript {
 public:
  // Fails, leaving the transcript unchanged, on an answer outside [0, 1].
  absl::Status Append(TranscriptRecord record);
  void Abort(absl::Status status) { status_ = std::move(status); }

  std::span<const TranscriptRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  bool aborted() const { return !status_.ok(); }
  const absl::Status& status() const { return status_; }

 private:
  std::vector<TranscriptRecord> records_;
  absl::Status status_;
};

// One JSON object per line, keys sorted.
std::string RecordToJson(const TranscriptRecord& record);
absl::StatusOr<TranscriptRecord> RecordFromJson(std::string_view line);
std::string TranscriptToJsonLines(const Transcript& t);
absl::StatusOr<Transcript> TranscriptFromJsonLines(std::string_view text);

class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual absl::Status Init(const Sample& sample) = 0;
  virtual double Answer(const Query& q) = 0;
  virtual std::string Name() const = 0;
};

using OracleFactory = std::function<std::unique_ptr<Oracle>(std::uint64_t)>;

// Closed inequality |a - q(D)| <= alpha on every record.
bool JudgeAccuracy(const Transcript& t, double alpha);
// Closed inequality |a - q(x)| <= alpha on every record.
bool JudgeSampleAccuracy(const Transcript& t, double alpha);

class Analyst {
 public:
  virtual ~Analyst() = default;
  virtual absl::StatusOr<Distribution> ChooseDistribution(std::size_t d,
                                                          Rng& rng) = 0;
  // nullopt ends the game early.
  virtual std::optional<Query> NextQuery(const Transcript& history) = 0;
};

struct AccGameResult {
  Distribution distribution;
  Sample sample;
  Transcript transcript;
};

// Errors are configuration errors; an oracle protocol violation is recorded
// in transcript.status() and ends the game.
absl::StatusOr<AccGameResult> RunAccGame(Analyst& analyst, Oracle& oracle,
                                         std::size_t n, std::size_t d,
                                         std::size_t k, Rng& rng);

class PrivacyAnalyst {
 public:
  virtual ~PrivacyAnalyst() = default;
  // Exactly 2n distinct elements.
  virtual absl::StatusOr<std::vector<Element>> ChooseUniverse(std::size_t n,
                                                              std::size_t d,
                                                              Rng& rng) = 0;
  virtual std::optional<Query> NextQuery(const Transcript& history) = 0;
  // Positions in the universe believed to be in the sample.
  virtual std::vector<std::size_t> Recover(const Transcript& history) = 0;
};

struct NonPrivacyResult {
  Transcript transcript;
  std::vector<std::size_t> sample_positions;  // sorted
  std::vector<std::size_t> recovered;         // sorted, distinct
  std::size_t symmetric_difference = 0;
};

absl::StatusOr<NonPrivacyResult> RunNonPrivacyGame(PrivacyAnalyst& analyst,
                                                   Oracle& oracle,
                                                   std::size_t n,
                                                   std::size_t d,
                                                   std::size_t k, Rng& rng);

// Size of the symmetric difference of two index sets (duplicates ignored).
std::size_t SymmetricDifference(std::span<const std::size_t> a,
                                std::span<const std::size_t> b);

}  // namespace sqattack::sq

#endif  // SQATTACK_SQCORE_H_
