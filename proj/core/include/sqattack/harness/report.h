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

#ifndef SQATTACK_HARNESS_REPORT_H_
#define SQATTACK_HARNESS_REPORT_H_

#include <span>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "sqattack/harness/config.h"
#include "sqattack/harness/experiment.h"

namespace sqattack::harness {

inline constexpr char kVersion[] = "0.1.0";

// One row per trial; event columns are 0/1.
std::string TrialsCsv(std::span<const TrialRow> rows);
// Long format: experiment_id,kind,metric,value,successes,trials,ci_lower,
// ci_upper,error.
std::string SummaryCsv(std::span<const SummaryRow> rows);
std::string SummaryJson(std::span<const SummaryRow> rows);
// Fixed-width table for the terminal.
std::string SummaryTable(std::span<const SummaryRow> rows);
// Config hash, seed, code version and the canonical config.
std::string ManifestJson(const ExperimentConfig& config);

// Writes, flushes and closes; creates parent directories.
absl::Status WriteTextFile(const std::string& path, std::string_view text);

// <dir>/transcripts/trial_<t>.jsonl (t zero-padded to 5 digits).
std::string TranscriptPath(const std::string& dir, std::size_t trial);

// Writes manifest.json, trials.csv and the summary files into dir.
absl::Status WriteExperiment(const std::string& dir,
                             const ExperimentConfig& config,
                             const ExperimentResult& result);

}  // namespace sqattack::harness

#endif  // SQATTACK_HARNESS_REPORT_H_
