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

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "sqattack/attacks.h"
#include "sv.h"

namespace sqattack::attacks {
namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

std::string_view WorldName(CipherWorld w) {
  switch (w) {
    case CipherWorld::kReal:
      return "real";
    case CipherWorld::kIdeal:
      return "ideal";
    case CipherWorld::kChallenge0:
      return "challenge0";
    case CipherWorld::kChallenge1:
      return "challenge1";
  }
  return "real";
}

json Number(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

json RoundJson(const RoundRecord& r) {
  json j;
  j["type"] = "round";
  j["round"] = r.round;
  j["accused"] = r.trace.accused.has_value() ? json(*r.trace.accused) : json();
  j["max_score"] = Number(r.trace.max_score);
  j["threshold"] = Number(r.trace.threshold);
  j["added"] = r.added;
  j["duplicate"] = r.duplicate;
  j["consistent"] = r.consistent;
  j["uncovered"] = r.uncovered;
  return j;
}

}  // namespace

std::string AttackToJsonLines(const AttackState& st,
                              const AttackOutcome& outcome) {
  const ResolvedConfig& cfg = st.cfg;
  std::string out;
  json h;
  h["type"] = "header";
  h["version"] = kFormatVersion;
  h["mode"] = ModeName(cfg.mode());
  h["seed"] = st.seed;
  h["n"] = cfg.config.n;
  h["kappa"] = cfg.config.kappa;
  h["users"] = cfg.users;
  h["rounds"] = cfg.rounds;
  h["length"] = cfg.length;
  h["reserve"] = cfg.config.reserve;
  h["phi_plus"] = cfg.config.phi_plus;
  h["final_tolerance"] = cfg.config.final_tolerance;
  h["consistency_fraction"] = cfg.config.consistency_fraction;
  h["consistency_slack"] = cfg.config.consistency_slack;
  h["score_rule"] = fpcode::ScoreRuleName(cfg.config.score_rule);
  h["scheme"] = cfg.scheme.has_value()
                    ? json(crypto::SchemeName(cfg.scheme->scheme))
                    : json();
  h["dimension"] = cfg.dimension;
  h["world"] = WorldName(st.world);
  h["sample_set"] = st.sample_set;
  absl::StrAppend(&out, h.dump(), "\n");

  std::size_t next_round = 0;
  for (const sq::TranscriptRecord& r : st.transcript.records()) {
    while (next_round < st.rounds.size() &&
           r.round > static_cast<std::int64_t>(st.rounds[next_round].round)) {
      absl::StrAppend(&out, RoundJson(st.rounds[next_round]).dump(), "\n");
      ++next_round;
    }
    absl::StrAppend(&out, sq::RecordToJson(r), "\n");
  }
  for (; next_round < st.rounds.size(); ++next_round) {
    absl::StrAppend(&out, RoundJson(st.rounds[next_round]).dump(), "\n");
  }
  if (!IsPrivacyMode(cfg.mode())) {
    json f;
    f["type"] = "final";
    f["phi"] = st.phi;
    f["final_answer"] = Number(st.final_answer);
    f["final_true_mean"] = Number(st.final_true_mean);
    f["subset_size"] = st.subset.size();
    f["done"] = st.final_done;
    absl::StrAppend(&out, f.dump(), "\n");
  }
  json g;
  g["type"] = "flags";
  g["z1"] = outcome.z1;
  g["z2"] = outcome.z2;
  g["z3"] = outcome.z3;
  g["queries"] = outcome.queries;
  g["missed"] = outcome.missed;
  g["recovery_succeeded"] = outcome.recovery_succeeded;
  g["final_accurate"] = outcome.final_accurate;
  g["aborted"] = outcome.aborted;
  g["error"] = outcome.error;
  absl::StrAppend(&out, g.dump(), "\n");
  return out;
}

absl::StatusOr<ReplayResult> ReplayTranscript(std::string_view jsonl) {
  std::optional<json> header, final_rec, flags;
  std::map<std::int64_t, std::vector<sq::TranscriptRecord>> by_round;
  std::vector<json> rounds;
  std::size_t queries = 0;
  for (absl::string_view line :
       absl::StrSplit(Sv(jsonl), '\n', absl::SkipWhitespace())) {
    json j = json::parse(Std(line), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      return absl::DataLossError("transcript line is not a JSON object");
    }
    const std::string type = j.value("type", "");
    if (type == "header") {
      header = std::move(j);
    } else if (type == "query") {
      absl::StatusOr<sq::TranscriptRecord> r = sq::RecordFromJson(Std(line));
      if (!r.ok()) return r.status();
      ++queries;
      if (r->label == "recovery") by_round[r->round].push_back(*std::move(r));
    } else if (type == "round") {
      rounds.push_back(std::move(j));
    } else if (type == "final") {
      final_rec = std::move(j);
    } else if (type == "flags") {
      flags = std::move(j);
    }
  }
  if (!header.has_value() || !flags.has_value()) {
    return absl::DataLossError("transcript lacks a header or flags record");
  }
  if (header->value("version", 0) != kFormatVersion) {
    return absl::DataLossError("unsupported transcript version");
  }
  absl::StatusOr<Mode> mode = ParseMode(header->value("mode", ""));
  if (!mode.ok()) return mode.status();
  const std::size_t n = header->value("n", std::size_t{0});
  const std::size_t reserve = header->value("reserve", std::size_t{0});
  const double fraction = header->value("consistency_fraction", 0.99);
  const double slack = header->value("consistency_slack", 1.0 / 3.0);
  const double tolerance = header->value("final_tolerance", 0.0);

  ReplayResult out;
  out.stored.z1 = flags->value("z1", false);
  out.stored.z2 = flags->value("z2", false);
  out.stored.z3 = flags->value("z3", false);
  out.stored_queries = flags->value("queries", std::size_t{0});
  out.recomputed_queries = queries;

  bool z1 = true;
  std::set<std::size_t> traced;
  for (const json& r : rounds) {
    const std::int64_t round = r.value("round", std::int64_t{0});
    if (r.value("added", false) && r["accused"].is_number()) {
      traced.insert(r["accused"].get<std::size_t>());
    }
    const std::vector<sq::TranscriptRecord>& recs = by_round[round];
    if (recs.empty() || !recs.front().target.has_value()) continue;
    std::vector<double> word, targets;
    const double scale =
        IsPrivacyMode(*mode)
            ? PrivacyRescale(n, static_cast<std::size_t>(round))
            : 1.0;
    for (const sq::TranscriptRecord& q : recs) {
      word.push_back(q.answer * scale);
      targets.push_back(q.target.value_or(0.0));
    }
    const fpcode::CombinedWord combined(std::move(word));
    absl::StatusOr<bool> ok = fpcode::IsConsistentWithMeans(
        targets, combined.values(), fraction, slack);
    if (!ok.ok()) return ok.status();
    z1 = z1 && *ok;
  }
  std::size_t missed = 0;
  for (const json& i : header->value("sample_set", json::array())) {
    if (!traced.contains(i.get<std::size_t>())) ++missed;
  }
  out.recomputed.z1 = z1;
  out.recomputed.z2 = missed <= reserve;
  bool z3 = false;
  if (final_rec.has_value() && final_rec->value("done", false) &&
      (*final_rec)["final_answer"].is_number()) {
    const double a = (*final_rec)["final_answer"].get<double>();
    const double phi = final_rec->value("phi", 0.0);
    z3 = std::abs(a - phi) <= tolerance;
  }
  out.recomputed.z3 = out.recomputed.z2 && z3;
  return out;
}

}  // namespace sqattack::attacks
