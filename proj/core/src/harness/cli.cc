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

#include "sqattack/harness/cli.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "sqattack/attacks.h"
#include "sqattack/harness/config.h"
#include "sqattack/harness/experiment.h"
#include "sqattack/harness/report.h"
#include "sv.h"

namespace sqattack::harness {
namespace {

using Apply = std::function<absl::Status(ExperimentConfig&)>;

template <typename T>
struct IsVector : std::false_type {};
template <typename T>
struct IsVector<std::vector<T>> : std::true_type {};

// Flag values applied on top of the config file when given.
class Binder {
 public:
  explicit Binder(CLI::App* app) : app_(app) {}

  template <typename T, typename F>
  void Add(const std::string& name, const std::string& help, F apply) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app_->add_option(name, *value, help);
    if constexpr (IsVector<T>::value) opt->delimiter(',');
    items_.push_back({opt, [value, apply](ExperimentConfig& c) {
                        return apply(c, *value);
                      }});
  }

  template <typename F>
  void Flag(const std::string& name, const std::string& help, F apply) {
    auto value = std::make_shared<bool>(false);
    CLI::Option* opt = app_->add_flag(name, *value, help);
    items_.push_back(
        {opt, [value, apply](ExperimentConfig& c) { return apply(c, *value); }});
  }

  absl::Status ApplyTo(ExperimentConfig& c) const {
    for (const auto& [opt, apply] : items_) {
      if (opt->count() == 0) continue;
      if (absl::Status s = apply(c); !s.ok()) return s;
    }
    return absl::OkStatus();
  }

  CLI::App* app() const { return app_; }

 private:
  CLI::App* app_;
  std::vector<std::pair<CLI::Option*, Apply>> items_;
};

absl::Status Ok() { return absl::OkStatus(); }

template <typename E, typename Parse>
absl::Status SetEnum(E& out, const std::string& name, Parse parse) {
  absl::StatusOr<E> v = parse(name);
  if (!v.ok()) return v.status();
  out = *v;
  return Ok();
}

void AddCommon(Binder& b) {
  b.Add<std::size_t>("--trials", "number of seeded trials",
                     [](ExperimentConfig& c, std::size_t v) {
                       c.trials = v;
                       return Ok();
                     });
  b.Add<std::uint64_t>("--seed", "base seed", [](ExperimentConfig& c,
                                                 std::uint64_t v) {
    c.seed = v;
    return Ok();
  });
  b.Add<std::string>("--out", "output directory", [](ExperimentConfig& c,
                                                     const std::string& v) {
    c.output_dir = v;
    return Ok();
  });
  b.Add<std::size_t>("--jobs", "worker threads", [](ExperimentConfig& c,
                                                    std::size_t v) {
    c.jobs = v;
    return Ok();
  });
  b.Add<std::string>("--id", "experiment id", [](ExperimentConfig& c,
                                                 const std::string& v) {
    c.id = v;
    return Ok();
  });
  b.Add<std::string>("--transcripts", "all or none",
                     [](ExperimentConfig& c, const std::string& v) {
                       if (v != "all" && v != "none") {
                         return absl::InvalidArgumentError(
                             "--transcripts expects all or none");
                       }
                       c.write_transcripts = v == "all";
                       return Ok();
                     });
  b.Add<std::vector<std::string>>(
      "--format", "summary formats (csv, json)",
      [](ExperimentConfig& c, const std::vector<std::string>& v) {
        c.formats = v;
        return Ok();
      });
}

void AddAttack(Binder& b) {
  b.Add<std::string>("--mode", "natural|encrypted|ideal|privacy|ideal-privacy",
                     [](ExperimentConfig& c, const std::string& v) {
                       return SetEnum(c.attack.mode, v, attacks::ParseMode);
                     });
  b.Add<std::size_t>("--n", "sample size", [](ExperimentConfig& c,
                                              std::size_t v) {
    c.attack.n = v;
    c.game.n = v;
    return Ok();
  });
  b.Add<std::size_t>("--d", "element dimension",
                     [](ExperimentConfig& c, std::size_t v) {
                       c.attack.d = v;
                       return Ok();
                     });
  b.Add<std::size_t>("--kappa", "population factor p / n",
                     [](ExperimentConfig& c, std::size_t v) {
                       c.attack.kappa = v;
                       return Ok();
                     });
  b.Add<std::size_t>("--s0", "reserve s0", [](ExperimentConfig& c,
                                              std::size_t v) {
    c.attack.reserve = v;
    return Ok();
  });
  b.Add<std::size_t>("--rounds", "recovery rounds R",
                     [](ExperimentConfig& c, std::size_t v) {
                       c.attack.rounds = v;
                       return Ok();
                     });
  b.Add<double>("--phi-plus", "final subset density",
                [](ExperimentConfig& c, double v) {
                  c.attack.phi_plus = v;
                  return Ok();
                });
  b.Add<double>("--tau", "final tolerance", [](ExperimentConfig& c, double v) {
    c.attack.final_tolerance = v;
    return Ok();
  });
  b.Add<std::size_t>("--ell", "code length", [](ExperimentConfig& c,
                                                std::size_t v) {
    c.attack.code_length = v;
    return Ok();
  });
  b.Add<double>("--epsilon", "tracing failure target",
                [](ExperimentConfig& c, double v) {
                  c.attack.epsilon = v;
                  return Ok();
                });
  b.Add<double>("--consistency-fraction", "column fraction",
                [](ExperimentConfig& c, double v) {
                  c.attack.consistency_fraction = v;
                  return Ok();
                });
  b.Add<double>("--consistency-slack", "column slack",
                [](ExperimentConfig& c, double v) {
                  c.attack.consistency_slack = v;
                  return Ok();
                });
  b.Add<std::string>("--score-rule", "correlation or tardos",
                     [](ExperimentConfig& c, const std::string& v) {
                       return SetEnum(c.attack.score_rule, v,
                                      fpcode::ParseScoreRule);
                     });
  b.Add<double>("--threshold", "fixed tracing threshold",
                [](ExperimentConfig& c, double v) {
                  c.attack.trace_threshold = v;
                  return Ok();
                });
  b.Add<std::string>("--scheme", "otp or prf",
                     [](ExperimentConfig& c, const std::string& v) {
                       return SetEnum(c.attack.scheme, v, crypto::ParseScheme);
                     });
  b.Add<std::size_t>("--scheme-param", "pad budget or stream key bits",
                     [](ExperimentConfig& c, std::size_t v) {
                       c.attack.scheme_parameter = v;
                       return Ok();
                     });
  b.Add<std::size_t>("--memory-budget", "bytes for codes and ciphertexts",
                     [](ExperimentConfig& c, std::size_t v) {
                       c.attack.memory_budget = v;
                       return Ok();
                     });
}

void AddOracle(Binder& b) {
  b.Add<std::string>("--oracle", "empirical|noisy|subsample|cheating",
                     [](ExperimentConfig& c, const std::string& v) {
                       return SetEnum(c.oracle.kind, v,
                                      oracles::ParseOracleKind);
                     });
  b.Add<double>("--sigma", "noise scale", [](ExperimentConfig& c, double v) {
    c.oracle.sigma = v;
    return Ok();
  });
  b.Add<std::string>("--noise", "gaussian or laplace",
                     [](ExperimentConfig& c, const std::string& v) {
                       return SetEnum(c.oracle.law, v, oracles::ParseNoiseLaw);
                     });
  b.Add<double>("--fraction", "subsample fraction",
                [](ExperimentConfig& c, double v) {
                  c.oracle.fraction = v;
                  return Ok();
                });
  b.Flag("--no-table", "cheating oracle without table access",
         [](ExperimentConfig& c, bool v) {
           c.oracle.table_access = !v;
           return Ok();
         });
  b.Add<std::string>("--guess", "half or random-key",
                     [](ExperimentConfig& c, const std::string& v) {
                       return SetEnum(c.oracle.guess, v,
                                      oracles::ParseGuessPolicy);
                     });
  b.Add<std::uint64_t>("--oracle-seed", "oracle seed",
                       [](ExperimentConfig& c, std::uint64_t v) {
                         c.oracle.seed = v;
                         return Ok();
                       });
}

void AddFpc(Binder& b) {
  b.Add<std::size_t>("--p", "users", [](ExperimentConfig& c, std::size_t v) {
    c.fpc.users = v;
    return Ok();
  });
  b.Add<std::size_t>("--S", "coalition size", [](ExperimentConfig& c,
                                                 std::size_t v) {
    c.fpc.coalition = v;
    return Ok();
  });
  b.Add<std::size_t>("--ell", "code length", [](ExperimentConfig& c,
                                                std::size_t v) {
    c.fpc.length = v;
    return Ok();
  });
  b.Add<double>("--epsilon", "tracing failure target",
                [](ExperimentConfig& c, double v) {
                  c.fpc.epsilon = v;
                  return Ok();
                });
  b.Add<std::string>("--adversary", "averaging|copy|noisy-averaging",
                     [](ExperimentConfig& c, const std::string& v) {
                       return SetEnum(c.fpc.adversary, v, ParseAdversary);
                     });
  b.Add<double>("--noise-fraction", "noisy columns",
                [](ExperimentConfig& c, double v) {
                  c.fpc.noise_fraction = v;
                  return Ok();
                });
  b.Add<std::string>("--score-rule", "correlation or tardos",
                     [](ExperimentConfig& c, const std::string& v) {
                       return SetEnum(c.fpc.rule, v, fpcode::ParseScoreRule);
                     });
  b.Add<double>("--threshold", "fixed tracing threshold",
                [](ExperimentConfig& c, double v) {
                  c.fpc.threshold = v;
                  return Ok();
                });
}

void AddGame(Binder& b) {
  b.Add<std::size_t>("--n", "sample size", [](ExperimentConfig& c,
                                              std::size_t v) {
    c.game.n = v;
    return Ok();
  });
  b.Add<std::size_t>("--universe", "universe size",
                     [](ExperimentConfig& c, std::size_t v) {
                       c.game.universe = v;
                       return Ok();
                     });
  b.Add<std::size_t>("--k", "queries", [](ExperimentConfig& c, std::size_t v) {
    c.game.queries = v;
    return Ok();
  });
  b.Add<double>("--alpha", "accuracy", [](ExperimentConfig& c, double v) {
    c.game.alpha = v;
    return Ok();
  });
}

void AddDistinguish(Binder& b) {
  b.Add<int>("--event", "1, 2 or 3", [](ExperimentConfig& c, int v) {
    c.distinguish.event = v;
    return Ok();
  });
  b.Add<int>("--world", "challenge bit", [](ExperimentConfig& c, int v) {
    c.distinguish.world = v;
    return Ok();
  });
}

void AddSweep(Binder& b) {
  b.Add<std::string>("--cell", "command run per cell",
                     [](ExperimentConfig& c, const std::string& v) {
                       return SetEnum(c.sweep_command, v, ParseCommand);
                     });
  b.Add<std::vector<std::size_t>>(
      "--grid-n", "n values", [](ExperimentConfig& c,
                                 const std::vector<std::size_t>& v) {
        c.sweep.n = v;
        return Ok();
      });
  b.Add<std::vector<std::size_t>>(
      "--grid-ell", "code lengths",
      [](ExperimentConfig& c, const std::vector<std::size_t>& v) {
        c.sweep.length = v;
        return Ok();
      });
  b.Add<std::vector<double>>("--grid-sigma", "oracle noise scales",
                             [](ExperimentConfig& c,
                                const std::vector<double>& v) {
                               c.sweep.sigma = v;
                               return Ok();
                             });
  b.Add<std::vector<std::string>>(
      "--grid-mode", "attack modes",
      [](ExperimentConfig& c, const std::vector<std::string>& v) {
        c.sweep.mode.clear();
        for (const std::string& name : v) {
          absl::StatusOr<attacks::Mode> m = attacks::ParseMode(name);
          if (!m.ok()) return m.status();
          c.sweep.mode.push_back(*m);
        }
        return Ok();
      });
}

absl::Status WriteTranscript(const std::string& dir, const TrialRow& row) {
  if (row.transcript.empty()) return absl::OkStatus();
  return WriteTextFile(TranscriptPath(dir, row.trial), row.transcript);
}

int RunCommand(const ExperimentConfig& config, std::ostream& out,
               std::ostream& err) {
  const std::string base_dir =
      config.output_dir.empty() ? DefaultOutputDir() : config.output_dir;
  if (config.command == Command::kSweep) {
    if (absl::Status s = config.Validate(); !s.ok()) {
      err << "error: " << s.message() << "\n";
      return kExitConfig;
    }
    const std::string dir = base_dir + "/" + config.id;
    int status = kExitOk;
    std::size_t cell_index = 0;
    std::vector<SummaryRow> rows = RunSweep(
        config, [&](const SweepCell& cell, const ExperimentResult* r) {
          const std::string cell_dir =
              absl::StrCat(dir, "/cells/", cell_index++);
          if (r == nullptr) return;
          for (const TrialRow& row : r->trials) {
            if (row.failed) status = kExitProtocol;
            (void)WriteTranscript(cell_dir, row);
          }
          (void)WriteExperiment(cell_dir, cell.config, *r);
        });
    if (absl::Status s = WriteTextFile(dir + "/manifest.json",
                                       ManifestJson(config));
        !s.ok()) {
      err << "error: " << s.message() << "\n";
      return kExitConfig;
    }
    for (const std::string& f : config.formats) {
      const std::string text =
          f == "json" ? SummaryJson(rows) : SummaryCsv(rows);
      (void)WriteTextFile(absl::StrCat(dir, "/summary.", f), text);
    }
    out << SummaryTable(rows);
    for (const SummaryRow& r : rows) {
      if (!r.error.empty()) err << "cell " << r.experiment_id << ": " << r.error
                               << "\n";
    }
    return status;
  }
  const std::string dir = base_dir + "/" + config.id;
  absl::Status write_status;
  absl::StatusOr<ExperimentResult> result =
      RunExperiment(config, [&](const TrialRow& row) {
        if (absl::Status s = WriteTranscript(dir, row);
            !s.ok() && write_status.ok()) {
          write_status = s;
        }
      });
  if (!result.ok()) {
    err << "error: " << result.status().message() << "\n";
    return kExitConfig;
  }
  if (!write_status.ok()) {
    err << "error: " << write_status.message() << "\n";
    return kExitConfig;
  }
  if (absl::Status s = WriteExperiment(dir, config, *result); !s.ok()) {
    err << "error: " << s.message() << "\n";
    return kExitConfig;
  }
  out << SummaryTable(std::span<const SummaryRow>(&result->summary, 1));
  for (const TrialRow& row : result->trials) {
    if (row.failed) {
      err << "trial " << row.trial << ": protocol error: " << row.error
          << "\n";
      return kExitProtocol;
    }
  }
  return kExitOk;
}

int RunReplay(const std::vector<std::string>& paths, std::ostream& out,
              std::ostream& err) {
  int status = kExitOk;
  for (const std::string& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      err << "error: cannot open " << path << "\n";
      return kExitConfig;
    }
    std::ostringstream text;
    text << in.rdbuf();
    absl::StatusOr<attacks::ReplayResult> r =
        attacks::ReplayTranscript(text.str());
    if (!r.ok()) {
      err << "error: " << path << ": " << r.status().message() << "\n";
      return kExitConfig;
    }
    auto flags = [](const attacks::EventFlags& f) {
      return absl::StrCat("z1=", f.z1 ? 1 : 0, " z2=", f.z2 ? 1 : 0,
                          " z3=", f.z3 ? 1 : 0);
    };
    out << path << ": stored " << flags(r->stored) << " k=" << r->stored_queries
        << "; recomputed " << flags(r->recomputed)
        << " k=" << r->recomputed_queries << "; "
        << (r->matches() ? "match" : "MISMATCH") << "\n";
    if (!r->matches()) status = kExitProtocol;
  }
  return status;
}

}  // namespace

int CliRun(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Reconstruction attacks against statistical-query oracles",
               "sqattack"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  struct Sub {
    Command command;
    CLI::App* app;
    std::unique_ptr<Binder> binder;
    std::string config_path;
  };
  std::vector<std::unique_ptr<Sub>> subs;
  auto add = [&](Command command, const std::string& help) -> Sub& {
    auto sub = std::make_unique<Sub>();
    sub->command = command;
    sub->app = app.add_subcommand(std::string(CommandName(command)), help);
    sub->binder = std::make_unique<Binder>(sub->app);
    subs.push_back(std::move(sub));
    return *subs.back();
  };
  for (auto [command, help] :
       std::vector<std::pair<Command, std::string>>{
           {Command::kAttack, "natural, encrypted or ideal attack"},
           {Command::kPrivacyAttack, "reconstruction against privacy"},
           {Command::kFpcBench, "fingerprinting completeness and soundness"},
           {Command::kGame, "non-adaptive accuracy game"},
           {Command::kDistinguish, "simulated attack on the challenge oracle"},
           {Command::kSweep, "grid of experiments"}}) {
    Sub& s = add(command, help);
    s.app->add_option("--config", s.config_path, "JSON config file");
    AddCommon(*s.binder);
    switch (command) {
      case Command::kAttack:
      case Command::kPrivacyAttack:
        AddAttack(*s.binder);
        AddOracle(*s.binder);
        break;
      case Command::kDistinguish:
        AddAttack(*s.binder);
        AddOracle(*s.binder);
        AddDistinguish(*s.binder);
        break;
      case Command::kFpcBench:
        AddFpc(*s.binder);
        break;
      case Command::kGame:
        AddGame(*s.binder);
        AddOracle(*s.binder);
        break;
      case Command::kSweep:
        AddAttack(*s.binder);
        AddOracle(*s.binder);
        AddSweep(*s.binder);
        break;
      default:
        break;
    }
  }
  std::vector<std::string> replay_paths;
  CLI::App* replay = app.add_subcommand("replay", "recheck stored Z flags");
  replay->add_option("transcript", replay_paths, "transcript files")
      ->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (replay->parsed()) return RunReplay(replay_paths, out, err);
  for (const auto& s : subs) {
    if (!s->app->parsed()) continue;
    ExperimentConfig config;
    config.command = s->command;
    if (s->command == Command::kPrivacyAttack) {
      config.attack.mode = attacks::Mode::kPrivacy;
    }
    if (s->command == Command::kDistinguish) {
      config.attack.mode = attacks::Mode::kEncrypted;
    }
    if (!s->config_path.empty()) {
      absl::StatusOr<ExperimentConfig> loaded =
          LoadConfig(s->config_path, config);
      if (!loaded.ok()) {
        err << "error: " << loaded.status().message() << "\n";
        return kExitConfig;
      }
      config = *std::move(loaded);
      config.command = s->command;
    }
    if (absl::Status st = s->binder->ApplyTo(config); !st.ok()) {
      err << "error: " << st.message() << "\n";
      return kExitUsage;
    }
    return RunCommand(config, out, err);
  }
  return kExitUsage;
}

int CliRun(int argc, char** argv) {
  std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
  return CliRun(args, std::cout, std::cerr);
}

}  // namespace sqattack::harness
