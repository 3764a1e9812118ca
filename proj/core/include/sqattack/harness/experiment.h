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

#ifndef SQATTACK_HARNESS_EXPERIMENT_H_
#define SQATTACK_HARNESS_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "sqattack/harness/config.h"
#include "sqattack/sqcore.h"

namespace sqattack::harness {

struct Field {
  std::string name;
  double value = 0.0;
};

struct Event {
  std::string name;
  bool value = false;
};

struct TrialRow {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<Event> events;
  std::vector<Field> fields;
  bool failed = false;  // protocol violation inside the trial
  std::string error;
  std::string transcript;  // line-delimited JSON; empty if none
};

struct RateCell {
  std::string name;
  std::size_t successes = 0;
  std::size_t trials = 0;
  double rate = 0.0;
  double lower = 0.0;  // 95% Clopper-Pearson
  double upper = 1.0;
};

struct SummaryRow {
  std::string experiment_id;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::vector<RateCell> rates;
  std::vector<Field> means;
  std::string error;  // sweep cells that could not run
};

struct ExperimentResult {
  std::vector<TrialRow> trials;  // ordered by trial index
  SummaryRow summary;
};

// Seed of trial t: stream(base, t).
std::uint64_t TrialSeed(std::uint64_t base, std::size_t trial);

// Checks that the command's parameters resolve (for example the packing
// dimension and the memory budget) before any trial runs.
absl::Status Preflight(const ExperimentConfig& config);

absl::StatusOr<TrialRow> RunTrial(const ExperimentConfig& config,
                                  std::size_t trial);

// Called once per finished trial, serialised, in completion order.
using TrialSink = std::function<void(const TrialRow&)>;

// Runs config.trials trials over config.jobs workers. Errors are
// configuration errors; protocol violations mark rows as failed.
absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config,
                                               const TrialSink& sink = {});

// Rates reuse the trial count of non-failed rows; means skip NaN.
SummaryRow Summarize(const std::string& experiment_id,
                     std::span<const TrialRow> rows);

struct SweepCell {
  std::string label;  // "mode=...,n=...,ell=...,sigma=..."
  ExperimentConfig config;
};

// Cartesian product of the grid axes. Empty grid, empty result.
std::vector<SweepCell> ExpandSweep(const ExperimentConfig& config);

using CellSink =
    std::function<void(const SweepCell&, const ExperimentResult*)>;

// One summary row per cell; a failing cell records its error and the sweep
// continues.
std::vector<SummaryRow> RunSweep(const ExperimentConfig& config,
                                 const CellSink& sink = {});

// Non-adaptive analyst: the uniform distribution over [universe] and k
// independent uniformly random subset queries fixed up front.
class FixedQueryAnalyst : public sq::Analyst {
 public:
  FixedQueryAnalyst(std::size_t universe, std::size_t queries);
  absl::StatusOr<sq::Distribution> ChooseDistribution(std::size_t d,
                                                      Rng& rng) override;
  std::optional<sq::Query> NextQuery(const sq::Transcript& history) override;

 private:
  std::size_t universe_;
  std::size_t queries_;
  std::vector<sq::Query> fixed_;
  std::size_t next_ = 0;
};

struct FingerprintTrial {
  std::vector<std::size_t> coalition;  // sorted
  bool consistent = false;
  std::optional<std::size_t> accused;
  double max_score = 0.0;
  double threshold = 0.0;

  bool accused_in_coalition() const;
  bool false_accusation() const;  // consistent and accused outside S
};

absl::StatusOr<FingerprintTrial> RunFingerprintTrial(const FpcBenchConfig& c,
                                                     std::uint64_t seed);

}  // namespace sqattack::harness

#endif  // SQATTACK_HARNESS_EXPERIMENT_H_
