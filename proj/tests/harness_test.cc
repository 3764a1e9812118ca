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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "sqattack/harness/cli.h"
#include "sqattack/harness/config.h"
#include "sqattack/harness/experiment.h"
#include "sqattack/harness/report.h"

namespace sqattack::harness {
namespace {

namespace fs = std::filesystem;

std::string Scratch(const std::string& name) {
  const fs::path p = fs::path(testing::TempDir()) / "sqattack_harness" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CliResult {
  int code;
  std::string out, err;
};

CliResult Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = CliRun(args, out, err);
  return {code, out.str(), err.str()};
}

const std::vector<std::string> kTinyAttack = {
    "--n", "12", "--kappa", "10", "--s0", "4", "--ell", "200",
    "--phi-plus", "0.1", "--tau", "0.05", "--threshold", "4"};

std::vector<std::string> With(std::vector<std::string> head,
                              const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

TEST(Config, ParsesNestedBlocks) {
  const absl::StatusOr<ExperimentConfig> c = ParseConfig(R"({
    "id": "nested", "trials": 3, "seed": 9,
    "attack": {"mode": "encrypted", "n": 40, "kappa": 50, "s0": 10,
               "ell": 2000, "phi_plus": 0.1, "tau": 0.025,
               "scheme": "pad"},
    "oracle": {"kind": "noisy", "sigma": 0.05, "law": "laplace"},
    "formats": ["csv", "json"]
  })");
  ASSERT_TRUE(c.ok()) << c.status();
  EXPECT_EQ(c->id, "nested");
  EXPECT_EQ(c->trials, 3u);
  EXPECT_EQ(c->seed, 9u);
  EXPECT_EQ(c->attack.mode, attacks::Mode::kEncrypted);
  EXPECT_EQ(c->attack.n, 40u);
  EXPECT_EQ(c->attack.reserve, 10u);
  EXPECT_EQ(*c->attack.code_length, 2000u);
  EXPECT_EQ(c->attack.final_tolerance, 0.025);
  EXPECT_EQ(c->oracle.kind, oracles::OracleKind::kNoisy);
  EXPECT_EQ(c->oracle.law, oracles::NoiseLaw::kLaplace);
  EXPECT_EQ(c->formats.size(), 2u);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_FALSE(ParseConfig(R"({"atack": {}})").ok());
  EXPECT_FALSE(ParseConfig(R"({"attack": {"colour": 1}})").ok());
  EXPECT_FALSE(ParseConfig(R"({"trials": 0})")->Validate().ok());
  EXPECT_FALSE(ParseConfig(R"({"attack": {"mode": "loud"}})").ok());
  EXPECT_FALSE(ParseConfig("{not json").ok());
  EXPECT_FALSE(ParseConfig(R"({"oracle": {"sigma": -1}})")->Validate().ok());
}

TEST(Config, RoundTripsAndHashes) {
  ExperimentConfig c = *ParseConfig(R"({"attack": {"n": 30}, "trials": 2})");
  const ExperimentConfig back = *ParseConfig(ConfigToJson(c));
  EXPECT_EQ(ConfigToJson(back), ConfigToJson(c));
  EXPECT_EQ(ConfigHash(back), ConfigHash(c));
  ExperimentConfig moved = c;
  moved.output_dir = "/elsewhere";
  moved.jobs = 4;
  EXPECT_EQ(ConfigHash(moved), ConfigHash(c));
  moved.seed = 1;
  EXPECT_NE(ConfigHash(moved), ConfigHash(c));
}

TEST(Config, DefaultOutputDirFromEnvironment) {
  unsetenv(kOutputDirEnv);
  EXPECT_EQ(DefaultOutputDir(), "sqattack-out");
  setenv(kOutputDirEnv, "/tmp/somewhere", 1);
  EXPECT_EQ(DefaultOutputDir(), "/tmp/somewhere");
  unsetenv(kOutputDirEnv);
}

TEST(Experiment, TrialSeedsUseTrialStreams) {
  EXPECT_EQ(TrialSeed(5, 3), TrialStreams(5, 3).base());
  EXPECT_NE(TrialSeed(5, 3), TrialSeed(5, 4));
}

TEST(Experiment, SummaryRatesCarryIntervals) {
  ExperimentConfig c;
  c.attack.n = 12;
  c.attack.kappa = 10;
  c.attack.reserve = 4;
  c.attack.code_length = 200;
  c.attack.phi_plus = 0.1;
  c.attack.trace_threshold = 4.0;
  c.trials = 6;
  const ExperimentResult r = *RunExperiment(c);
  ASSERT_EQ(r.trials.size(), 6u);
  for (std::size_t t = 0; t < 6; ++t) EXPECT_EQ(r.trials[t].trial, t);
  EXPECT_EQ(r.summary.trials, 6u);
  EXPECT_FALSE(r.summary.rates.empty());
  for (const RateCell& cell : r.summary.rates) {
    EXPECT_GE(cell.rate, 0.0);
    EXPECT_LE(cell.rate, 1.0);
    EXPECT_LE(cell.lower, cell.rate);
    EXPECT_GE(cell.upper, cell.rate);
    EXPECT_EQ(cell.trials, 6u);
  }
  bool budget = false;
  for (const RateCell& cell : r.summary.rates) {
    if (cell.name == "budget_exact") {
      budget = true;
      EXPECT_EQ(cell.rate, 1.0);
    }
  }
  EXPECT_TRUE(budget);
}

TEST(Experiment, WorkerPoolMatchesSerial) {
  ExperimentConfig c;
  c.attack.n = 12;
  c.attack.kappa = 10;
  c.attack.reserve = 4;
  c.attack.code_length = 200;
  c.attack.phi_plus = 0.1;
  c.attack.trace_threshold = 4.0;
  c.trials = 5;
  const ExperimentResult serial = *RunExperiment(c);
  c.jobs = 3;
  const ExperimentResult pooled = *RunExperiment(c);
  EXPECT_EQ(TrialsCsv(serial.trials), TrialsCsv(pooled.trials));
  const std::span<const SummaryRow> a(&serial.summary, 1);
  const std::span<const SummaryRow> b(&pooled.summary, 1);
  EXPECT_EQ(SummaryCsv(a), SummaryCsv(b));
}

TEST(Experiment, PreflightRejectsInfeasibleConfig) {
  ExperimentConfig c;
  c.attack.mode = attacks::Mode::kEncrypted;
  c.attack.n = 12;
  c.attack.kappa = 10;
  c.attack.reserve = 4;
  c.attack.code_length = 200;
  c.attack.d = 20;
  EXPECT_FALSE(Preflight(c).ok());
  EXPECT_FALSE(RunExperiment(c).ok());
}

TEST(Sweep, EmptyGrid) {
  ExperimentConfig c;
  c.command = Command::kSweep;
  EXPECT_TRUE(ExpandSweep(c).empty());
  EXPECT_TRUE(RunSweep(c).empty());
  const std::string dir = Scratch("empty_sweep");
  const CliResult run = Cli({"sweep", "--out", dir, "--id", "none"});
  EXPECT_EQ(run.code, kExitOk) << run.err;
}

TEST(Sweep, SingleCellEqualsSingleRun) {
  ExperimentConfig c;
  c.attack.n = 12;
  c.attack.kappa = 10;
  c.attack.reserve = 4;
  c.attack.code_length = 200;
  c.attack.phi_plus = 0.1;
  c.attack.trace_threshold = 4.0;
  c.trials = 4;
  c.seed = 3;
  ExperimentConfig sweep = c;
  sweep.command = Command::kSweep;
  sweep.sweep.n = {12};
  const std::vector<SweepCell> cells = ExpandSweep(sweep);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].label, "mode=natural,n=12,ell=200,sigma=0");
  const std::vector<SummaryRow> rows = RunSweep(sweep);
  const ExperimentResult single = *RunExperiment(c);
  ASSERT_EQ(rows.size(), 1u);
  ASSERT_EQ(rows[0].rates.size(), single.summary.rates.size());
  for (std::size_t k = 0; k < rows[0].rates.size(); ++k) {
    EXPECT_EQ(rows[0].rates[k].name, single.summary.rates[k].name);
    EXPECT_EQ(rows[0].rates[k].successes, single.summary.rates[k].successes);
  }
}

TEST(Sweep, FailedCellsAreRecorded) {
  ExperimentConfig c;
  c.command = Command::kSweep;
  c.attack.kappa = 10;
  c.attack.reserve = 4;
  c.attack.code_length = 200;
  c.attack.trace_threshold = 4.0;
  c.sweep.n = {3, 12};
  const std::vector<SummaryRow> rows = RunSweep(c);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].error.empty());
  EXPECT_TRUE(rows[1].error.empty());
}

TEST(Sweep, RecoveryDropsAsNoiseGrows) {
  ExperimentConfig c;
  c.command = Command::kSweep;
  c.attack.n = 40;
  c.attack.kappa = 50;
  c.attack.reserve = 10;
  c.attack.code_length = 2000;
  c.attack.phi_plus = 0.1;
  c.attack.final_tolerance = 1.0 / 40;
  c.trials = 8;
  c.seed = 21;
  c.sweep.sigma = {0, 0.05, 0.2, 0.45};
  const std::vector<SummaryRow> rows = RunSweep(c);
  ASSERT_EQ(rows.size(), 4u);
  std::vector<double> rates;
  for (const SummaryRow& row : rows) {
    for (const RateCell& cell : row.rates) {
      if (cell.name == "recovery_succeeded") rates.push_back(cell.rate);
    }
  }
  ASSERT_EQ(rates.size(), 4u);
  for (std::size_t k = 1; k < rates.size(); ++k) {
    EXPECT_LE(rates[k], rates[k - 1]) << "sigma index " << k;
  }
  EXPECT_GT(rates.front(), rates.back());
}

TEST(Report, CsvAndJson) {
  SummaryRow row;
  row.experiment_id = "a,b";
  row.trials = 2;
  RateCell cell;
  cell.name = "x";
  cell.successes = 1;
  cell.trials = 2;
  cell.rate = 0.5;
  cell.lower = 0.0126;
  cell.upper = 0.9874;
  row.rates.push_back(cell);
  row.means.push_back({"m", 1.5});
  const std::span<const SummaryRow> rows(&row, 1);
  const std::string csv = SummaryCsv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "experiment_id,kind,metric,value,successes,trials,ci_lower,"
            "ci_upper,error");
  EXPECT_NE(csv.find("\"a,b\",rate,x,0.5,1,2,0.0126,0.9874,"),
            std::string::npos);
  EXPECT_NE(SummaryJson(rows).find("\"ci_upper\": 0.9874"), std::string::npos);
  EXPECT_EQ(TranscriptPath("d", 7), "d/transcripts/trial_00007.jsonl");
}

TEST(Report, WriteTextFileCreatesDirectories) {
  const std::string dir = Scratch("write");
  const std::string path = dir + "/a/b/c.txt";
  ASSERT_TRUE(WriteTextFile(path, "hello").ok());
  EXPECT_EQ(Slurp(path), "hello");
}

TEST(Cli, AttackWritesOutputsAndReplays) {
  const std::string dir = Scratch("attack");
  const CliResult run = Cli(With({"attack", "--mode", "natural", "--trials", "3",
                            "--seed", "7", "--oracle", "empirical", "--out",
                            dir, "--id", "e2e"},
                           kTinyAttack));
  ASSERT_EQ(run.code, kExitOk) << run.err;
  EXPECT_NE(run.out.find("recovery_succeeded"), std::string::npos);
  const fs::path base = fs::path(dir) / "e2e";
  EXPECT_TRUE(fs::exists(base / "manifest.json"));
  EXPECT_TRUE(fs::exists(base / "trials.csv"));
  EXPECT_TRUE(fs::exists(base / "summary.csv"));
  const std::string manifest = Slurp(base / "manifest.json");
  EXPECT_NE(manifest.find("config_hash"), std::string::npos);
  EXPECT_NE(manifest.find("\"version\": \"0.1.0\""), std::string::npos);
  const fs::path t0 = base / "transcripts" / "trial_00000.jsonl";
  ASSERT_TRUE(fs::exists(t0));
  const CliResult replay = Cli({"replay", t0.string()});
  EXPECT_EQ(replay.code, kExitOk) << replay.err;
  EXPECT_NE(replay.out.find("match"), std::string::npos);
}

TEST(Cli, ByteIdenticalOutputs) {
  std::vector<std::string> files;
  for (const char* name : {"det_a", "det_b"}) {
    const std::string dir = Scratch(name);
    const CliResult run = Cli(With({"attack", "--mode", "encrypted", "--trials", "2",
                              "--seed", "5", "--oracle", "noisy", "--sigma",
                              "0.02", "--out", dir, "--id", "same",
                              "--format", "json"},
                             kTinyAttack));
    ASSERT_EQ(run.code, kExitOk) << run.err;
    const fs::path base = fs::path(dir) / "same";
    files.push_back(Slurp(base / "transcripts" / "trial_00000.jsonl") +
                    Slurp(base / "transcripts" / "trial_00001.jsonl") +
                    Slurp(base / "summary.json") + Slurp(base / "trials.csv"));
    const std::string manifest = Slurp(base / "manifest.json");
    const std::size_t at = manifest.find("config_hash");
    ASSERT_NE(at, std::string::npos);
    files.back() += manifest.substr(at, 40);
  }
  EXPECT_FALSE(files[0].empty());
  EXPECT_EQ(files[0], files[1]);
}

TEST(Cli, FlagsOverrideConfigFile) {
  const std::string dir = Scratch("override");
  const std::string cfg = dir + "/cfg.json";
  ASSERT_TRUE(WriteTextFile(cfg, R"({"id": "from_file", "trials": 5,
      "attack": {"n": 12, "kappa": 10, "s0": 4, "ell": 200,
                 "phi_plus": 0.1, "trace_threshold": 4}})")
                  .ok());
  const CliResult run = Cli({"attack", "--config", cfg, "--trials", "2", "--out",
                       dir, "--transcripts", "none"});
  ASSERT_EQ(run.code, kExitOk) << run.err;
  const fs::path base = fs::path(dir) / "from_file";
  const std::string manifest = Slurp(base / "manifest.json");
  EXPECT_NE(manifest.find("\"trials\": 2"), std::string::npos);
  EXPECT_FALSE(fs::exists(base / "transcripts"));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(Cli({"attack", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(Cli({"teleport"}).code, kExitUsage);
  EXPECT_EQ(Cli({}).code, kExitUsage);
  const std::string dir = Scratch("codes");
  const CliResult small_d = Cli(With({"attack", "--mode", "encrypted", "--d", "20",
                                "--out", dir},
                               kTinyAttack));
  EXPECT_EQ(small_d.code, kExitConfig);
  EXPECT_NE(small_d.err.find("minimal"), std::string::npos) << small_d.err;
  EXPECT_EQ(Cli({"attack", "--config", dir + "/missing.json"}).code,
            kExitConfig);
  EXPECT_EQ(Cli({"replay", dir + "/missing.jsonl"}).code, kExitConfig);
}

TEST(Cli, ReplayDetectsMismatch) {
  const std::string dir = Scratch("tamper");
  ASSERT_EQ(Cli(With({"attack", "--trials", "1", "--out", dir, "--id", "t"},
                     kTinyAttack))
                .code,
            kExitOk);
  const fs::path t0 = fs::path(dir) / "t" / "transcripts" / "trial_00000.jsonl";
  std::string text = Slurp(t0);
  const std::string key = "\"queries\":";
  const std::size_t at = text.rfind(key);
  ASSERT_NE(at, std::string::npos);
  text.insert(at + key.size(), "1");
  ASSERT_TRUE(WriteTextFile(t0.string(), text).ok());
  const CliResult replay = Cli({"replay", t0.string()});
  EXPECT_EQ(replay.code, kExitProtocol);
  EXPECT_NE(replay.out.find("MISMATCH"), std::string::npos);
}

TEST(Cli, OtherSubcommands) {
  const std::string dir = Scratch("others");
  const CliResult fpc = Cli({"fpc-bench", "--p", "20", "--S", "5", "--ell", "4000",
                       "--threshold", "4", "--trials", "4", "--out", dir});
  EXPECT_EQ(fpc.code, kExitOk) << fpc.err;
  EXPECT_NE(fpc.out.find("accused_in_coalition"), std::string::npos);
  const CliResult game = Cli({"game", "--n", "100", "--universe", "64", "--k", "50",
                        "--alpha", "0.3", "--trials", "2", "--out", dir});
  EXPECT_EQ(game.code, kExitOk) << game.err;
  EXPECT_NE(game.out.find("accurate"), std::string::npos);
  const CliResult dist = Cli(With({"distinguish", "--event", "2", "--world", "0",
                             "--trials", "2", "--out", dir},
                            kTinyAttack));
  EXPECT_EQ(dist.code, kExitOk) << dist.err;
  const CliResult priv = Cli({"privacy-attack", "--n", "12", "--ell", "300",
                        "--threshold", "4", "--trials", "2", "--out", dir});
  EXPECT_EQ(priv.code, kExitOk) << priv.err;
  const CliResult sweep = Cli(With({"sweep", "--grid-sigma", "0,0.3", "--trials",
                              "2", "--out", dir, "--id", "grid"},
                             kTinyAttack));
  EXPECT_EQ(sweep.code, kExitOk) << sweep.err;
  EXPECT_TRUE(fs::exists(fs::path(dir) / "grid" / "summary.csv"));
}

}  // namespace
}  // namespace sqattack::harness
