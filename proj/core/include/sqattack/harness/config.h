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

#ifndef SQATTACK_HARNESS_CONFIG_H_
#define SQATTACK_HARNESS_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "sqattack/attacks.h"
#include "sqattack/fpcode.h"
#include "sqattack/oracles.h"

namespace sqattack::harness {

enum class Command {
  kAttack,
  kPrivacyAttack,
  kFpcBench,
  kGame,
  kDistinguish,
  kSweep,
  kReplay,
};

std::string_view CommandName(Command c);
absl::StatusOr<Command> ParseCommand(std::string_view name);

// Coalition strategies for fpc-bench.
enum class Adversary { kAveraging, kCopy, kNoisyAveraging };

std::string_view AdversaryName(Adversary a);
absl::StatusOr<Adversary> ParseAdversary(std::string_view name);

struct FpcBenchConfig {
  std::size_t users = 100;
  std::size_t coalition = 20;
  std::optional<std::size_t> length;  // plan_length(users, epsilon) if unset
  double epsilon = 0.01;
  Adversary adversary = Adversary::kAveraging;
  double noise_fraction = 0.1;  // columns replaced by uniform noise
  fpcode::ScoreRule rule = fpcode::ScoreRule::kCorrelation;
  std::optional<double> threshold;
};

// Non-adaptive accuracy game: fixed random queries over a uniform universe.
struct GameConfig {
  std::size_t n = 1000;
  std::size_t universe = 1024;
  std::size_t queries = 10000;
  double alpha = 0.1;
};

struct DistinguishConfig {
  int event = 1;
  int world = 1;
};

// Empty axes keep the base value.
struct SweepGrid {
  std::vector<std::size_t> n;
  std::vector<std::size_t> length;
  std::vector<double> sigma;
  std::vector<attacks::Mode> mode;

  bool empty() const;
};

struct ExperimentConfig {
  std::string id = "experiment";
  Command command = Command::kAttack;
  // Command run by each sweep cell.
  Command sweep_command = Command::kAttack;
  attacks::AttackConfig attack;
  oracles::OracleSpec oracle;
  FpcBenchConfig fpc;
  GameConfig game;
  DistinguishConfig distinguish;
  SweepGrid sweep;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::string output_dir;
  bool write_transcripts = true;
  std::vector<std::string> formats = {"csv"};
  std::size_t jobs = 1;

  absl::Status Validate() const;
};

// Structured JSON config with nested "attack", "oracle", "fpc", "game",
// "distinguish" and "sweep" blocks. Keys absent from the text keep the
// values of `base`; unknown keys are errors.
absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view text,
                                             ExperimentConfig base = {});
absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path,
                                            ExperimentConfig base = {});

// Canonical JSON rendering; ParseConfig(ConfigToJson(c)) == c.
std::string ConfigToJson(const ExperimentConfig& config);
// FNV-1a of ConfigToJson.
std::uint64_t ConfigHash(const ExperimentConfig& config);

inline constexpr char kOutputDirEnv[] = "SQATTACK_OUTPUT_DIR";
// $SQATTACK_OUTPUT_DIR, else "sqattack-out".
std::string DefaultOutputDir();

}  // namespace sqattack::harness

#endif  // SQATTACK_HARNESS_CONFIG_H_
