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

#include "sqattack/harness/report.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "sv.h"

namespace sqattack::harness {
namespace {

using nlohmann::json;

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  return absl::StrFormat("%.10g", v);
}

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) {
    return std::string(s);
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

json JsonNumber(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

std::string TrialsCsv(std::span<const TrialRow> rows) {
  std::vector<std::string> events, fields;
  std::map<std::string, int> seen_e, seen_f;
  for (const TrialRow& r : rows) {
    for (const Event& e : r.events) {
      if (seen_e.emplace(e.name, 0).second) events.push_back(e.name);
    }
    for (const Field& f : r.fields) {
      if (seen_f.emplace(f.name, 0).second) fields.push_back(f.name);
    }
  }
  std::string out = "trial,seed,failed";
  for (const std::string& e : events) absl::StrAppend(&out, ",", e);
  for (const std::string& f : fields) absl::StrAppend(&out, ",", f);
  absl::StrAppend(&out, ",error\n");
  for (const TrialRow& r : rows) {
    absl::StrAppend(&out, r.trial, ",", r.seed, ",", r.failed ? 1 : 0);
    for (const std::string& name : events) {
      std::string cell;
      for (const Event& e : r.events) {
        if (e.name == name) cell = e.value ? "1" : "0";
      }
      absl::StrAppend(&out, ",", cell);
    }
    for (const std::string& name : fields) {
      std::string cell;
      for (const Field& f : r.fields) {
        if (f.name == name) cell = Num(f.value);
      }
      absl::StrAppend(&out, ",", cell);
    }
    absl::StrAppend(&out, ",", CsvField(r.error), "\n");
  }
  return out;
}

std::string SummaryCsv(std::span<const SummaryRow> rows) {
  std::string out =
      "experiment_id,kind,metric,value,successes,trials,ci_lower,ci_upper,"
      "error\n";
  for (const SummaryRow& s : rows) {
    const std::string id = CsvField(s.experiment_id);
    absl::StrAppend(&out, id, ",count,trials,", s.trials, ",,", s.trials,
                    ",,,", CsvField(s.error), "\n");
    absl::StrAppend(&out, id, ",count,failures,", s.failures, ",,", s.trials,
                    ",,,\n");
    for (const RateCell& c : s.rates) {
      absl::StrAppend(&out, id, ",rate,", CsvField(c.name), ",", Num(c.rate),
                      ",", c.successes, ",", c.trials, ",", Num(c.lower), ",",
                      Num(c.upper), ",\n");
    }
    for (const Field& f : s.means) {
      absl::StrAppend(&out, id, ",mean,", CsvField(f.name), ",", Num(f.value),
                      ",,", s.trials, ",,,\n");
    }
  }
  return out;
}

std::string SummaryJson(std::span<const SummaryRow> rows) {
  json arr = json::array();
  for (const SummaryRow& s : rows) {
    json rates = json::array();
    for (const RateCell& c : s.rates) {
      rates.push_back({{"metric", c.name},
                       {"rate", c.rate},
                       {"successes", c.successes},
                       {"trials", c.trials},
                       {"ci_lower", c.lower},
                       {"ci_upper", c.upper}});
    }
    json means = json::object();
    for (const Field& f : s.means) means[f.name] = JsonNumber(f.value);
    arr.push_back({{"experiment_id", s.experiment_id},
                   {"trials", s.trials},
                   {"failures", s.failures},
                   {"rates", rates},
                   {"means", means},
                   {"error", s.error}});
  }
  return arr.dump(2) + "\n";
}

std::string SummaryTable(std::span<const SummaryRow> rows) {
  std::string out;
  for (const SummaryRow& s : rows) {
    absl::StrAppend(&out, s.experiment_id, "  (trials ", s.trials,
                    ", failures ", s.failures, ")\n");
    if (!s.error.empty()) {
      absl::StrAppend(&out, "  error: ", s.error, "\n");
      continue;
    }
    for (const RateCell& c : s.rates) {
      absl::StrAppend(&out, absl::StrFormat("  %-26s %7.4f  [%.4f, %.4f]  %zu/%zu\n",
                                            c.name, c.rate, c.lower, c.upper,
                                            c.successes, c.trials));
    }
    for (const Field& f : s.means) {
      absl::StrAppend(&out, absl::StrFormat("  mean %-21s %s\n", f.name,
                                            Num(f.value)));
    }
  }
  return out;
}

std::string ManifestJson(const ExperimentConfig& config) {
  json m = {
      {"config_hash", absl::StrFormat("%016x", ConfigHash(config))},
      {"seed", config.seed},
      {"version", kVersion},
      {"command", CommandName(config.command)},
      {"config", json::parse(ConfigToJson(config))},
  };
  return m.dump(2) + "\n";
}

absl::Status WriteTextFile(const std::string& path, std::string_view text) {
  std::error_code ec;
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) {
      return absl::UnavailableError(absl::StrCat(
          "cannot create directory ", p.parent_path().string(), ": ",
          ec.message()));
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  out.close();
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  return absl::OkStatus();
}

std::string TranscriptPath(const std::string& dir, std::size_t trial) {
  return absl::StrFormat("%s/transcripts/trial_%05d.jsonl", dir, trial);
}

absl::Status WriteExperiment(const std::string& dir,
                             const ExperimentConfig& config,
                             const ExperimentResult& result) {
  if (absl::Status s = WriteTextFile(dir + "/manifest.json",
                                     ManifestJson(config));
      !s.ok()) {
    return s;
  }
  if (absl::Status s = WriteTextFile(dir + "/trials.csv",
                                     TrialsCsv(result.trials));
      !s.ok()) {
    return s;
  }
  const std::span<const SummaryRow> rows(&result.summary, 1);
  for (const std::string& f : config.formats) {
    const std::string text = f == "json" ? SummaryJson(rows) : SummaryCsv(rows);
    if (absl::Status s = WriteTextFile(
            absl::StrCat(dir, "/summary.", f == "json" ? "json" : "csv"), text);
        !s.ok()) {
      return s;
    }
  }
  return absl::OkStatus();
}

}  // namespace sqattack::harness
