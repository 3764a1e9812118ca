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

#include "sqattack/harness/config.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "sv.h"

namespace sqattack::harness {
namespace {

using nlohmann::json;

absl::Status Bad(std::string_view where, std::string_view what) {
  return absl::InvalidArgumentError(
      absl::StrCat("config ", Sv(where), ": ", Sv(what)));
}

template <typename T>
absl::Status Read(const json& j, std::string_view where, T& out) {
  try {
    out = j.get<T>();
  } catch (const json::exception& e) {
    return Bad(where, e.what());
  }
  return absl::OkStatus();
}

template <typename T>
absl::Status ReadOptional(const json& j, std::string_view where,
                          std::optional<T>& out) {
  if (j.is_null()) {
    out.reset();
    return absl::OkStatus();
  }
  T v{};
  if (absl::Status s = Read(j, where, v); !s.ok()) return s;
  out = v;
  return absl::OkStatus();
}

template <typename E, typename Parse>
absl::Status ReadEnum(const json& j, std::string_view where, Parse parse,
                      E& out) {
  std::string name;
  if (absl::Status s = Read(j, where, name); !s.ok()) return s;
  absl::StatusOr<E> v = parse(name);
  if (!v.ok()) return Bad(where, Std(v.status().message()));
  out = *v;
  return absl::OkStatus();
}

absl::Status ParseAttack(const json& block, attacks::AttackConfig& a) {
  if (!block.is_object()) return Bad("attack", "expected an object");
  for (const auto& [key, v] : block.items()) {
    const std::string where = "attack." + key;
    absl::Status s;
    if (key == "mode") {
      s = ReadEnum(v, where, attacks::ParseMode, a.mode);
    } else if (key == "n") {
      s = Read(v, where, a.n);
    } else if (key == "d") {
      s = ReadOptional(v, where, a.d);
    } else if (key == "kappa") {
      s = Read(v, where, a.kappa);
    } else if (key == "s0" || key == "reserve") {
      s = Read(v, where, a.reserve);
    } else if (key == "rounds") {
      s = ReadOptional(v, where, a.rounds);
    } else if (key == "phi_plus") {
      s = Read(v, where, a.phi_plus);
    } else if (key == "tau" || key == "final_tolerance") {
      s = Read(v, where, a.final_tolerance);
    } else if (key == "ell" || key == "code_length") {
      s = ReadOptional(v, where, a.code_length);
    } else if (key == "epsilon") {
      s = Read(v, where, a.epsilon);
    } else if (key == "consistency_fraction") {
      s = Read(v, where, a.consistency_fraction);
    } else if (key == "consistency_slack") {
      s = Read(v, where, a.consistency_slack);
    } else if (key == "score_rule") {
      s = ReadEnum(v, where, fpcode::ParseScoreRule, a.score_rule);
    } else if (key == "trace_threshold") {
      s = ReadOptional(v, where, a.trace_threshold);
    } else if (key == "scheme") {
      s = ReadEnum(v, where, crypto::ParseScheme, a.scheme);
    } else if (key == "scheme_parameter") {
      s = ReadOptional(v, where, a.scheme_parameter);
    } else if (key == "memory_budget") {
      s = Read(v, where, a.memory_budget);
    } else {
      s = Bad(where, "unknown key");
    }
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

absl::Status ParseOracle(const json& block, oracles::OracleSpec& o) {
  if (!block.is_object()) return Bad("oracle", "expected an object");
  for (const auto& [key, v] : block.items()) {
    const std::string where = "oracle." + key;
    absl::Status s;
    if (key == "kind") {
      s = ReadEnum(v, where, oracles::ParseOracleKind, o.kind);
    } else if (key == "sigma") {
      s = Read(v, where, o.sigma);
    } else if (key == "law") {
      s = ReadEnum(v, where, oracles::ParseNoiseLaw, o.law);
    } else if (key == "fraction") {
      s = Read(v, where, o.fraction);
    } else if (key == "table_access") {
      s = Read(v, where, o.table_access);
    } else if (key == "guess") {
      s = ReadEnum(v, where, oracles::ParseGuessPolicy, o.guess);
    } else if (key == "seed") {
      s = Read(v, where, o.seed);
    } else {
      s = Bad(where, "unknown key");
    }
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

absl::Status ParseFpc(const json& block, FpcBenchConfig& f) {
  if (!block.is_object()) return Bad("fpc", "expected an object");
  for (const auto& [key, v] : block.items()) {
    const std::string where = "fpc." + key;
    absl::Status s;
    if (key == "p" || key == "users") {
      s = Read(v, where, f.users);
    } else if (key == "S" || key == "coalition") {
      s = Read(v, where, f.coalition);
    } else if (key == "ell" || key == "length") {
      s = ReadOptional(v, where, f.length);
    } else if (key == "epsilon") {
      s = Read(v, where, f.epsilon);
    } else if (key == "adversary") {
      s = ReadEnum(v, where, ParseAdversary, f.adversary);
    } else if (key == "noise_fraction") {
      s = Read(v, where, f.noise_fraction);
    } else if (key == "score_rule") {
      s = ReadEnum(v, where, fpcode::ParseScoreRule, f.rule);
    } else if (key == "threshold") {
      s = ReadOptional(v, where, f.threshold);
    } else {
      s = Bad(where, "unknown key");
    }
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

absl::Status ParseGame(const json& block, GameConfig& g) {
  if (!block.is_object()) return Bad("game", "expected an object");
  for (const auto& [key, v] : block.items()) {
    const std::string where = "game." + key;
    absl::Status s;
    if (key == "n") {
      s = Read(v, where, g.n);
    } else if (key == "universe") {
      s = Read(v, where, g.universe);
    } else if (key == "k" || key == "queries") {
      s = Read(v, where, g.queries);
    } else if (key == "alpha") {
      s = Read(v, where, g.alpha);
    } else {
      s = Bad(where, "unknown key");
    }
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

absl::Status ParseDistinguish(const json& block, DistinguishConfig& d) {
  if (!block.is_object()) return Bad("distinguish", "expected an object");
  for (const auto& [key, v] : block.items()) {
    const std::string where = "distinguish." + key;
    absl::Status s;
    if (key == "event") {
      s = Read(v, where, d.event);
    } else if (key == "world") {
      s = Read(v, where, d.world);
    } else {
      s = Bad(where, "unknown key");
    }
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

absl::Status ParseSweep(const json& block, SweepGrid& g) {
  if (!block.is_object()) return Bad("sweep", "expected an object");
  for (const auto& [key, v] : block.items()) {
    const std::string where = "sweep." + key;
    absl::Status s;
    if (key == "n") {
      s = Read(v, where, g.n);
    } else if (key == "ell" || key == "length") {
      s = Read(v, where, g.length);
    } else if (key == "sigma") {
      s = Read(v, where, g.sigma);
    } else if (key == "mode") {
      std::vector<std::string> names;
      s = Read(v, where, names);
      g.mode.clear();
      for (const std::string& name : names) {
        if (!s.ok()) break;
        absl::StatusOr<attacks::Mode> m = attacks::ParseMode(name);
        if (!m.ok()) {
          s = Bad(where, Std(m.status().message()));
        } else {
          g.mode.push_back(*m);
        }
      }
    } else {
      s = Bad(where, "unknown key");
    }
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

json OptionalJson(const auto& v) { return v.has_value() ? json(*v) : json(); }

}  // namespace

std::string_view CommandName(Command c) {
  switch (c) {
    case Command::kAttack:
      return "attack";
    case Command::kPrivacyAttack:
      return "privacy-attack";
    case Command::kFpcBench:
      return "fpc-bench";
    case Command::kGame:
      return "game";
    case Command::kDistinguish:
      return "distinguish";
    case Command::kSweep:
      return "sweep";
    case Command::kReplay:
      return "replay";
  }
  return "attack";
}

absl::StatusOr<Command> ParseCommand(std::string_view name) {
  for (Command c : {Command::kAttack, Command::kPrivacyAttack,
                    Command::kFpcBench, Command::kGame, Command::kDistinguish,
                    Command::kSweep, Command::kReplay}) {
    if (name == CommandName(c)) return c;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown command '", Sv(name), "'"));
}

std::string_view AdversaryName(Adversary a) {
  switch (a) {
    case Adversary::kAveraging:
      return "averaging";
    case Adversary::kCopy:
      return "copy";
    case Adversary::kNoisyAveraging:
      return "noisy-averaging";
  }
  return "averaging";
}

absl::StatusOr<Adversary> ParseAdversary(std::string_view name) {
  for (Adversary a :
       {Adversary::kAveraging, Adversary::kCopy, Adversary::kNoisyAveraging}) {
    if (name == AdversaryName(a)) return a;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown adversary '", Sv(name),
      "' (expected averaging, copy or noisy-averaging)"));
}

bool SweepGrid::empty() const {
  return n.empty() && length.empty() && sigma.empty() && mode.empty();
}

absl::Status ExperimentConfig::Validate() const {
  if (trials == 0) return absl::InvalidArgumentError("trials must be >= 1");
  if (jobs == 0) return absl::InvalidArgumentError("jobs must be >= 1");
  if (id.empty()) return absl::InvalidArgumentError("id must be nonempty");
  for (const std::string& f : formats) {
    if (f != "csv" && f != "json") {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown report format '", f, "' (expected csv, json)"));
    }
  }
  if (absl::Status s = oracle.Validate(); !s.ok()) return s;
  if (sweep_command == Command::kSweep || sweep_command == Command::kReplay) {
    return absl::InvalidArgumentError("sweep cells cannot run sweep or replay");
  }
  switch (command == Command::kSweep ? sweep_command : command) {
    case Command::kFpcBench:
      if (fpc.users < 2 || fpc.coalition == 0 || fpc.coalition > fpc.users) {
        return absl::InvalidArgumentError(
            "fpc-bench needs p >= 2 and 1 <= |S| <= p");
      }
      if (!(fpc.noise_fraction >= 0 && fpc.noise_fraction <= 1)) {
        return absl::InvalidArgumentError("noise fraction must lie in [0, 1]");
      }
      break;
    case Command::kGame:
      if (game.n == 0 || game.universe < 2 || game.queries == 0) {
        return absl::InvalidArgumentError(
            "game needs n >= 1, universe >= 2 and k >= 1");
      }
      if (!(game.alpha >= 0)) {
        return absl::InvalidArgumentError("alpha must be >= 0");
      }
      break;
    case Command::kDistinguish:
      if (distinguish.event < 1 || distinguish.event > 3) {
        return absl::InvalidArgumentError("event must be 1, 2 or 3");
      }
      if (distinguish.world != 0 && distinguish.world != 1) {
        return absl::InvalidArgumentError("world must be 0 or 1");
      }
      break;
    default:
      break;
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view text,
                                             ExperimentConfig base) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) {
    return absl::InvalidArgumentError("config is not valid JSON");
  }
  if (!root.is_object()) {
    return absl::InvalidArgumentError("config must be a JSON object");
  }
  ExperimentConfig c = std::move(base);
  for (const auto& [key, v] : root.items()) {
    absl::Status s;
    if (key == "id") {
      s = Read(v, key, c.id);
    } else if (key == "command") {
      s = ReadEnum(v, key, ParseCommand, c.command);
    } else if (key == "sweep_command") {
      s = ReadEnum(v, key, ParseCommand, c.sweep_command);
    } else if (key == "attack") {
      s = ParseAttack(v, c.attack);
    } else if (key == "oracle") {
      s = ParseOracle(v, c.oracle);
    } else if (key == "fpc") {
      s = ParseFpc(v, c.fpc);
    } else if (key == "game") {
      s = ParseGame(v, c.game);
    } else if (key == "distinguish") {
      s = ParseDistinguish(v, c.distinguish);
    } else if (key == "sweep") {
      s = ParseSweep(v, c.sweep);
    } else if (key == "trials") {
      s = Read(v, key, c.trials);
    } else if (key == "seed") {
      s = Read(v, key, c.seed);
    } else if (key == "output_dir") {
      s = Read(v, key, c.output_dir);
    } else if (key == "transcripts") {
      s = Read(v, key, c.write_transcripts);
    } else if (key == "formats") {
      s = Read(v, key, c.formats);
    } else if (key == "jobs") {
      s = Read(v, key, c.jobs);
    } else {
      s = Bad(key, "unknown key");
    }
    if (!s.ok()) return s;
  }
  return c;
}

absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path,
                                            ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open config ", path));
  }
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str(), std::move(base));
}

std::string ConfigToJson(const ExperimentConfig& c) {
  const attacks::AttackConfig& a = c.attack;
  json attack = {
      {"mode", attacks::ModeName(a.mode)},
      {"n", a.n},
      {"d", OptionalJson(a.d)},
      {"kappa", a.kappa},
      {"s0", a.reserve},
      {"rounds", OptionalJson(a.rounds)},
      {"phi_plus", a.phi_plus},
      {"tau", a.final_tolerance},
      {"ell", OptionalJson(a.code_length)},
      {"epsilon", a.epsilon},
      {"consistency_fraction", a.consistency_fraction},
      {"consistency_slack", a.consistency_slack},
      {"score_rule", fpcode::ScoreRuleName(a.score_rule)},
      {"trace_threshold", OptionalJson(a.trace_threshold)},
      {"scheme", crypto::SchemeName(a.scheme)},
      {"scheme_parameter", OptionalJson(a.scheme_parameter)},
      {"memory_budget", a.memory_budget},
  };
  const oracles::OracleSpec& o = c.oracle;
  json oracle = {
      {"kind", oracles::OracleKindName(o.kind)},
      {"sigma", o.sigma},
      {"law", oracles::NoiseLawName(o.law)},
      {"fraction", o.fraction},
      {"table_access", o.table_access},
      {"guess", oracles::GuessPolicyName(o.guess)},
      {"seed", o.seed},
  };
  json fpc = {
      {"p", c.fpc.users},
      {"S", c.fpc.coalition},
      {"ell", OptionalJson(c.fpc.length)},
      {"epsilon", c.fpc.epsilon},
      {"adversary", AdversaryName(c.fpc.adversary)},
      {"noise_fraction", c.fpc.noise_fraction},
      {"score_rule", fpcode::ScoreRuleName(c.fpc.rule)},
      {"threshold", OptionalJson(c.fpc.threshold)},
  };
  json game = {{"n", c.game.n},
               {"universe", c.game.universe},
               {"k", c.game.queries},
               {"alpha", c.game.alpha}};
  json modes = json::array();
  for (attacks::Mode m : c.sweep.mode) modes.push_back(attacks::ModeName(m));
  json sweep = {{"n", c.sweep.n},
                {"ell", c.sweep.length},
                {"sigma", c.sweep.sigma},
                {"mode", modes}};
  json root = {
      {"id", c.id},
      {"command", CommandName(c.command)},
      {"sweep_command", CommandName(c.sweep_command)},
      {"attack", attack},
      {"oracle", oracle},
      {"fpc", fpc},
      {"game", game},
      {"distinguish",
       {{"event", c.distinguish.event}, {"world", c.distinguish.world}}},
      {"sweep", sweep},
      {"trials", c.trials},
      {"seed", c.seed},
      {"output_dir", c.output_dir},
      {"transcripts", c.write_transcripts},
      {"formats", c.formats},
      {"jobs", c.jobs},
  };
  return root.dump(2);
}

std::uint64_t ConfigHash(const ExperimentConfig& config) {
  json j = json::parse(ConfigToJson(config));
  // output_dir and jobs are excluded.
  j.erase("output_dir");
  j.erase("jobs");
  return HashName(j.dump());
}

std::string DefaultOutputDir() {
  const char* env = std::getenv(kOutputDirEnv);
  return env != nullptr && *env != '\0' ? std::string(env) : "sqattack-out";
}

}  // namespace sqattack::harness
