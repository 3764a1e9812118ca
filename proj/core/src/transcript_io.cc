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

#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "sqattack/sqcore.h"
#include "sv.h"

namespace sqattack::sq {
namespace {

using nlohmann::json;

json Number(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

double ReadNumber(const json& j) {
  return j.is_number() ? j.get<double>()
                       : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string RecordToJson(const TranscriptRecord& r) {
  json j;
  j["type"] = "query";
  j["seq"] = r.sequence;
  j["round"] = r.round;
  j["label"] = r.label;
  j["query"] = r.query_id;
  j["answer"] = Number(r.answer);
  j["true_mean"] = Number(r.true_mean);
  j["empirical_mean"] = Number(r.empirical_mean);
  if (r.target.has_value()) j["target"] = Number(*r.target);
  return j.dump();
}

absl::StatusOr<TranscriptRecord> RecordFromJson(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::DataLossError("transcript line is not a JSON object");
  }
  if (j.value("type", "") != "query" || !j.contains("answer") ||
      !j.contains("seq")) {
    return absl::DataLossError("not a query record");
  }
  TranscriptRecord r;
  r.sequence = j["seq"].get<std::uint64_t>();
  r.round = j.value("round", std::int64_t{0});
  r.label = j.value("label", "");
  r.query_id = j.value("query", "");
  r.answer = ReadNumber(j["answer"]);
  r.true_mean = ReadNumber(j.value("true_mean", json()));
  r.empirical_mean = ReadNumber(j.value("empirical_mean", json()));
  if (j.contains("target")) r.target = ReadNumber(j["target"]);
  return r;
}

std::string TranscriptToJsonLines(const Transcript& t) {
  std::string out;
  for (const TranscriptRecord& r : t.records()) {
    absl::StrAppend(&out, RecordToJson(r), "\n");
  }
  return out;
}

absl::StatusOr<Transcript> TranscriptFromJsonLines(std::string_view text) {
  Transcript t;
  for (absl::string_view line :
       absl::StrSplit(Sv(text), '\n', absl::SkipEmpty())) {
    json j = json::parse(Std(line), nullptr, false);
    if (j.is_discarded()) return absl::DataLossError("malformed JSON line");
    if (j.value("type", "") != "query") continue;
    absl::StatusOr<TranscriptRecord> r = RecordFromJson(Std(line));
    if (!r.ok()) return r.status();
    const std::uint64_t seq = r->sequence;
    if (absl::Status s = t.Append(*std::move(r)); !s.ok()) return s;
    if (t.records().back().sequence != seq) {
      return absl::DataLossError("transcript records out of order");
    }
  }
  return t;
}

}  // namespace sqattack::sq
