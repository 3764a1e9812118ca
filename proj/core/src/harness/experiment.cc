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

#include "sqattack/harness/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "absl/strings/str_cat.h"
#include "sqattack/attacks.h"
#include "sqattack/fpcode.h"
#include "sqattack/oracles.h"
#include "sqattack/stats.h"
#include "sv.h"

namespace sqattack::harness {
namespace {

double AsDouble(std::size_t v) { return static_cast<double>(v); }

void AddAttackOutcome(const attacks::AttackOutcome& o,
                      const attacks::ResolvedConfig& cfg, TrialRow& row) {
  const bool privacy = attacks::IsPrivacyMode(o.mode);
  row.events.push_back({"recovery_succeeded", o.recovery_succeeded});
  if (!privacy) {
    row.events.push_back({"final_accurate", o.final_accurate});
    row.events.push_back(
        {"succeeded_and_inaccurate", o.recovery_succeeded && !o.final_accurate});
  }
  row.events.push_back({"z1", o.z1});
  row.events.push_back({"z2", o.z2});
  if (!privacy) {
    row.events.push_back({"z3", o.z3});
    row.events.push_back({"final_bound_holds", o.final_bound_holds});
  }
  row.events.push_back({"budget_exact", o.queries == cfg.PlannedQueries()});
  row.fields.push_back({"missed", AsDouble(o.missed)});
  row.fields.push_back({"recovery_fraction", o.recovery_fraction});
  row.fields.push_back({"sample_distinct", AsDouble(o.sample_distinct)});
  row.fields.push_back({"traced_total", AsDouble(o.traced_total)});
  row.fields.push_back({"traced_in_sample", AsDouble(o.traced_in_sample)});
  row.fields.push_back({"no_accusations", AsDouble(o.no_accusations)});
  row.fields.push_back({"duplicates", AsDouble(o.duplicates)});
  row.fields.push_back({"queries", AsDouble(o.queries)});
  if (privacy) {
    row.fields.push_back(
        {"symmetric_difference", AsDouble(o.symmetric_difference)});
  } else {
    row.fields.push_back({"phi", o.phi});
    row.fields.push_back({"final_answer", o.final_answer});
    row.fields.push_back({"final_true_mean", o.final_true_mean});
  }
  row.failed = o.aborted;
  row.error = o.error;
}

absl::StatusOr<TrialRow> AttackTrial(const ExperimentConfig& config,
                                     std::uint64_t seed, bool privacy) {
  attacks::AttackConfig ac = config.attack;
  if (privacy != attacks::IsPrivacyMode(ac.mode)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "mode ", Sv(attacks::ModeName(ac.mode)), " does not fit command ",
        privacy ? "privacy-attack" : "attack"));
  }
  absl::StatusOr<attacks::ResolvedConfig> cfg = attacks::Resolve(ac);
  if (!cfg.ok()) return cfg.status();
  const sq::OracleFactory factory = oracles::MakeFactory(config.oracle);
  absl::StatusOr<attacks::AttackRun> run =
      privacy ? attacks::RunPrivacyAttackDetailed(factory, ac, seed)
              : attacks::RunAttackDetailed(factory, ac, seed);
  if (!run.ok()) return run.status();
  TrialRow row;
  AddAttackOutcome(run->outcome, *cfg, row);
  if (config.write_transcripts) {
    row.transcript = attacks::AttackToJsonLines(run->state, run->outcome);
  }
  return row;
}

absl::StatusOr<TrialRow> DistinguishTrial(const ExperimentConfig& config,
                                          std::uint64_t seed) {
  absl::StatusOr<attacks::ResolvedConfig> cfg = attacks::Resolve(config.attack);
  if (!cfg.ok()) return cfg.status();
  absl::StatusOr<attacks::AttackRun> run = attacks::RunSimulation(
      oracles::MakeFactory(config.oracle), config.distinguish.world,
      config.attack, seed);
  if (!run.ok()) return run.status();
  TrialRow row;
  const attacks::AttackOutcome& o = run->outcome;
  const int e = config.distinguish.event;
  row.events.push_back(
      {absl::StrCat("z", e), e == 1 ? o.z1 : (e == 2 ? o.z2 : o.z3)});
  AddAttackOutcome(o, *cfg, row);
  if (config.write_transcripts) {
    row.transcript = attacks::AttackToJsonLines(run->state, run->outcome);
  }
  return row;
}

absl::StatusOr<TrialRow> FpcTrial(const ExperimentConfig& config,
                                  std::uint64_t seed) {
  absl::StatusOr<FingerprintTrial> t = RunFingerprintTrial(config.fpc, seed);
  if (!t.ok()) return t.status();
  TrialRow row;
  row.events.push_back({"accused_in_coalition", t->accused_in_coalition()});
  row.events.push_back({"false_accusation", t->false_accusation()});
  row.events.push_back({"consistent", t->consistent});
  row.events.push_back({"accused", t->accused.has_value()});
  row.fields.push_back({"max_score", t->max_score});
  row.fields.push_back({"threshold", t->threshold});
  return row;
}

absl::StatusOr<TrialRow> GameTrial(const ExperimentConfig& config,
                                   std::uint64_t seed) {
  const GameConfig& g = config.game;
  FixedQueryAnalyst analyst(g.universe, g.queries);
  absl::StatusOr<std::unique_ptr<sq::Oracle>> oracle = [&] {
    oracles::OracleSpec spec = config.oracle;
    spec.seed = Mix64(spec.seed ^ Mix64(seed));
    return oracles::MakeOracle(spec);
  }();
  if (!oracle.ok()) return oracle.status();
  Rng rng(seed);
  absl::StatusOr<sq::AccGameResult> result =
      sq::RunAccGame(analyst, **oracle, g.n, sq::IndexBits(g.universe),
                     g.queries, rng);
  if (!result.ok()) return result.status();
  const sq::Transcript& t = result->transcript;
  double max_error = 0.0;
  double max_sample_error = 0.0;
  for (const sq::TranscriptRecord& r : t.records()) {
    max_error = std::max(max_error, std::abs(r.answer - r.true_mean));
    max_sample_error =
        std::max(max_sample_error, std::abs(r.answer - r.empirical_mean));
  }
  TrialRow row;
  const bool complete = !t.aborted() && t.size() == g.queries;
  row.events.push_back({"accurate", complete && sq::JudgeAccuracy(t, g.alpha)});
  row.events.push_back(
      {"sample_accurate", complete && sq::JudgeSampleAccuracy(t, g.alpha)});
  row.fields.push_back({"max_error", max_error});
  row.fields.push_back({"max_sample_error", max_sample_error});
  row.fields.push_back({"queries", AsDouble(t.size())});
  row.failed = t.aborted();
  if (t.aborted()) row.error = std::string(t.status().message());
  if (config.write_transcripts) row.transcript = sq::TranscriptToJsonLines(t);
  return row;
}

std::string FormatValue(double v) {
  return absl::StrCat(v);
}

}  // namespace

std::uint64_t TrialSeed(std::uint64_t base, std::size_t trial) {
  return TrialStreams(base, trial).base();
}

absl::Status Preflight(const ExperimentConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  switch (config.command) {
    case Command::kAttack:
    case Command::kPrivacyAttack:
    case Command::kDistinguish: {
      const bool privacy = config.command == Command::kPrivacyAttack;
      if (config.command != Command::kDistinguish &&
          privacy != attacks::IsPrivacyMode(config.attack.mode)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "mode ", Sv(attacks::ModeName(config.attack.mode)),
            " does not fit command ", Sv(CommandName(config.command))));
      }
      if (config.command == Command::kDistinguish &&
          config.attack.mode != attacks::Mode::kEncrypted &&
          config.attack.mode != attacks::Mode::kPrivacy) {
        return absl::InvalidArgumentError(
            "distinguish needs mode encrypted or privacy");
      }
      absl::StatusOr<attacks::ResolvedConfig> cfg =
          attacks::Resolve(config.attack);
      return cfg.status();
    }
    case Command::kFpcBench: {
      fpcode::CodeParams p;
      p.users = config.fpc.users;
      p.epsilon = config.fpc.epsilon;
      if (config.fpc.length.has_value()) {
        p.length = *config.fpc.length;
      } else {
        absl::StatusOr<std::size_t> len =
            fpcode::PlanLength(p.users, p.epsilon);
        if (!len.ok()) return len.status();
        p.length = *len;
      }
      return p.Validate();
    }
    default:
      return absl::OkStatus();
  }
}

absl::StatusOr<TrialRow> RunTrial(const ExperimentConfig& config,
                                  std::size_t trial) {
  const std::uint64_t seed = TrialSeed(config.seed, trial);
  absl::StatusOr<TrialRow> row;
  switch (config.command) {
    case Command::kAttack:
      row = AttackTrial(config, seed, false);
      break;
    case Command::kPrivacyAttack:
      row = AttackTrial(config, seed, true);
      break;
    case Command::kFpcBench:
      row = FpcTrial(config, seed);
      break;
    case Command::kGame:
      row = GameTrial(config, seed);
      break;
    case Command::kDistinguish:
      row = DistinguishTrial(config, seed);
      break;
    default:
      return absl::InvalidArgumentError(absl::StrCat(
          "command ", Sv(CommandName(config.command)), " has no trials"));
  }
  if (!row.ok()) return row.status();
  row->trial = trial;
  row->seed = seed;
  return row;
}

absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config,
                                               const TrialSink& sink) {
  if (absl::Status s = Preflight(config); !s.ok()) return s;
  std::vector<std::optional<TrialRow>> rows(config.trials);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  absl::Status first_error;
  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t t = next.fetch_add(1);
      if (t >= config.trials) return;
      absl::StatusOr<TrialRow> row = RunTrial(config, t);
      std::lock_guard<std::mutex> lock(mu);
      if (!row.ok()) {
        if (first_error.ok()) first_error = row.status();
        stop = true;
        return;
      }
      if (sink) sink(*row);
      rows[t] = *std::move(row);
    }
  };
  const std::size_t jobs = std::min(config.jobs, config.trials);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (!first_error.ok()) return first_error;
  ExperimentResult result;
  for (std::optional<TrialRow>& r : rows) result.trials.push_back(*std::move(r));
  result.summary = Summarize(config.id, result.trials);
  return result;
}

SummaryRow Summarize(const std::string& experiment_id,
                     std::span<const TrialRow> rows) {
  SummaryRow s;
  s.experiment_id = experiment_id;
  std::vector<std::string> event_order, field_order;
  std::map<std::string, std::size_t> successes, event_trials;
  std::map<std::string, std::pair<double, std::size_t>> sums;
  for (const TrialRow& row : rows) {
    ++s.trials;
    if (row.failed) ++s.failures;
    for (const Event& e : row.events) {
      if (!event_trials.contains(e.name)) event_order.push_back(e.name);
      ++event_trials[e.name];
      successes[e.name] += (e.value && !row.failed) ? 1 : 0;
    }
    for (const Field& f : row.fields) {
      if (!sums.contains(f.name)) field_order.push_back(f.name);
      auto& [sum, count] = sums[f.name];
      if (!std::isnan(f.value) && !row.failed) {
        sum += f.value;
        ++count;
      }
    }
  }
  for (const std::string& name : event_order) {
    RateCell c;
    c.name = name;
    c.successes = successes[name];
    c.trials = event_trials[name];
    c.rate = c.trials == 0 ? 0.0 : AsDouble(c.successes) / AsDouble(c.trials);
    const stats::Interval ci = stats::BinomialInterval(c.successes, c.trials);
    c.lower = ci.lo;
    c.upper = ci.hi;
    s.rates.push_back(std::move(c));
  }
  for (const std::string& name : field_order) {
    const auto& [sum, count] = sums[name];
    s.means.push_back(
        {name, count == 0 ? std::numeric_limits<double>::quiet_NaN()
                          : sum / AsDouble(count)});
  }
  return s;
}

std::vector<SweepCell> ExpandSweep(const ExperimentConfig& config) {
  std::vector<SweepCell> cells;
  if (config.sweep.empty()) return cells;
  const SweepGrid& g = config.sweep;
  auto axis = [](const auto& values, auto base) {
    using T = decltype(base);
    return values.empty() ? std::vector<T>{base}
                          : std::vector<T>(values.begin(), values.end());
  };
  const std::vector<attacks::Mode> modes = axis(g.mode, config.attack.mode);
  const std::vector<std::size_t> ns = axis(g.n, config.attack.n);
  const std::vector<std::optional<std::size_t>> lengths = [&] {
    std::vector<std::optional<std::size_t>> out;
    if (g.length.empty()) {
      out.push_back(config.attack.code_length);
    } else {
      for (std::size_t l : g.length) out.emplace_back(l);
    }
    return out;
  }();
  const std::vector<double> sigmas = axis(g.sigma, config.oracle.sigma);
  for (attacks::Mode mode : modes) {
    for (std::size_t n : ns) {
      for (const std::optional<std::size_t>& len : lengths) {
        for (double sigma : sigmas) {
          SweepCell cell;
          cell.config = config;
          cell.config.command = config.sweep_command;
          cell.config.sweep = {};
          cell.config.attack.mode = mode;
          cell.config.attack.n = n;
          cell.config.attack.code_length = len;
          cell.config.oracle.sigma = sigma;
          if (sigma > 0 && cell.config.oracle.kind ==
                               oracles::OracleKind::kEmpirical) {
            cell.config.oracle.kind = oracles::OracleKind::kNoisy;
          }
          if (config.sweep_command == Command::kGame) {
            cell.config.game.n = n;
          }
          cell.label = absl::StrCat(
              "mode=", Sv(attacks::ModeName(mode)), ",n=", n,
              ",ell=", len.has_value() ? absl::StrCat(*len) : "auto",
              ",sigma=", FormatValue(sigma));
          cell.config.id = absl::StrCat(config.id, "/", cell.label);
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

std::vector<SummaryRow> RunSweep(const ExperimentConfig& config,
                                 const CellSink& sink) {
  std::vector<SummaryRow> rows;
  for (const SweepCell& cell : ExpandSweep(config)) {
    absl::StatusOr<ExperimentResult> r = RunExperiment(cell.config);
    if (!r.ok()) {
      SummaryRow failed;
      failed.experiment_id = cell.config.id;
      failed.error = std::string(r.status().message());
      rows.push_back(std::move(failed));
      if (sink) sink(cell, nullptr);
      continue;
    }
    if (sink) sink(cell, &*r);
    rows.push_back(r->summary);
  }
  return rows;
}

FixedQueryAnalyst::FixedQueryAnalyst(std::size_t universe, std::size_t queries)
    : universe_(universe), queries_(queries) {}

absl::StatusOr<sq::Distribution> FixedQueryAnalyst::ChooseDistribution(
    std::size_t d, Rng& rng) {
  std::vector<sq::Element> support;
  support.reserve(universe_);
  for (std::size_t i = 0; i < universe_; ++i) {
    support.push_back(sq::Element::Plain(i, d));
  }
  fixed_.clear();
  next_ = 0;
  const std::size_t p = universe_;
  for (std::size_t m = 0; m < queries_; ++m) {
    auto table = std::make_shared<std::vector<std::uint64_t>>(WordsFor(p));
    for (std::uint64_t& w : *table) w = rng();
    auto bit = [table, p](std::uint64_t i) {
      return i < p && (((*table)[i / 64] >> (i % 64)) & 1);
    };
    sq::Query q(absl::StrCat("fixed.", m),
                [bit](const sq::Element& e) { return bit(e.index()); }, p);
    q.WithTable(p, bit);
    fixed_.push_back(std::move(q));
  }
  return sq::Distribution::Uniform(std::move(support));
}

std::optional<sq::Query> FixedQueryAnalyst::NextQuery(const sq::Transcript&) {
  if (next_ >= fixed_.size()) return std::nullopt;
  return fixed_[next_++];
}

bool FingerprintTrial::accused_in_coalition() const {
  return accused.has_value() &&
         std::binary_search(coalition.begin(), coalition.end(), *accused);
}

bool FingerprintTrial::false_accusation() const {
  return consistent && accused.has_value() && !accused_in_coalition();
}

absl::StatusOr<FingerprintTrial> RunFingerprintTrial(const FpcBenchConfig& c,
                                                     std::uint64_t seed) {
  fpcode::CodeParams params;
  params.users = c.users;
  params.epsilon = c.epsilon;
  if (c.length.has_value()) {
    params.length = *c.length;
  } else {
    absl::StatusOr<std::size_t> len = fpcode::PlanLength(c.users, c.epsilon);
    if (!len.ok()) return len.status();
    params.length = *len;
  }
  if (c.coalition == 0 || c.coalition > c.users) {
    return absl::InvalidArgumentError("coalition size must lie in [1, p]");
  }
  const SeedStreams streams(seed);
  absl::StatusOr<fpcode::CodeMatrix> code =
      fpcode::GenFromSeed(params, streams.Seed("codes"));
  if (!code.ok()) return code.status();

  FingerprintTrial out;
  Rng pick = streams.Stream("coalition");
  std::vector<std::size_t> order(c.users);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = 0; k < c.coalition; ++k) {
    std::swap(order[k], order[k + pick.Below(c.users - k)]);
  }
  out.coalition.assign(order.begin(), order.begin() + c.coalition);
  std::sort(out.coalition.begin(), out.coalition.end());

  const std::size_t len = params.length;
  std::vector<double> word(len);
  if (c.adversary == Adversary::kCopy) {
    // The first member drawn.
    for (std::size_t j = 0; j < len; ++j) word[j] = (*code)(order[0], j);
  } else {
    const std::vector<std::uint32_t> counts =
        code->bits().ColumnCounts(out.coalition);
    for (std::size_t j = 0; j < len; ++j) {
      word[j] = static_cast<double>(counts[j]) / c.coalition;
    }
    if (c.adversary == Adversary::kNoisyAveraging) {
      Rng noise = streams.Stream("noise");
      for (std::size_t j = 0; j < len; ++j) {
        if (noise.Uniform() < c.noise_fraction) word[j] = noise.Uniform();
      }
    }
  }
  const fpcode::CombinedWord combined(std::move(word));
  absl::StatusOr<fpcode::SubsetView> view =
      fpcode::Restrict(*code, out.coalition);
  if (!view.ok()) return view.status();
  absl::StatusOr<bool> consistent =
      fpcode::IsConsistent(*view, combined, params.consistency_fraction,
                           params.consistency_slack);
  if (!consistent.ok()) return consistent.status();
  out.consistent = *consistent;
  fpcode::TraceOptions options;
  options.rule = c.rule;
  options.threshold = c.threshold;
  absl::StatusOr<fpcode::TraceOutcome> trace =
      fpcode::Trace(*code, combined, options);
  if (!trace.ok()) return trace.status();
  out.accused = trace->accused;
  out.max_score = trace->max_score;
  out.threshold = trace->threshold;
  return out;
}

}  // namespace sqattack::harness
