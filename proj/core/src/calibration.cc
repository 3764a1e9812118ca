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
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <string>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "sqattack/fpcode.h"
#include "sv.h"

namespace sqattack::fpcode {
namespace {

std::string CacheKey(std::size_t users, std::size_t length, double epsilon,
                     ScoreRule rule, const CalibrationSettings& s) {
  return absl::StrFormat("v1:%d:%d:%.17g:%s:%d:%d:%d:%d", users, length,
                         epsilon, Sv(ScoreRuleName(rule)), s.runs, s.bit_budget,
                         s.min_columns, s.coalition);
}

class ThresholdCache {
 public:
  static ThresholdCache& Get() {
    static ThresholdCache* cache = new ThresholdCache();
    return *cache;
  }

  double Lookup(std::size_t users, std::size_t length, double epsilon,
                ScoreRule rule) {
    const CalibrationSettings settings;
    const std::string key = CacheKey(users, length, epsilon, rule, settings);
    std::lock_guard<std::mutex> lock(mu_);
    LoadFileOnce();
    if (auto it = values_.find(key); it != values_.end()) return it->second;
    const std::vector<double> samples =
        CalibrationSamples(users, length, epsilon, rule, settings);
    double z = std::numeric_limits<double>::lowest();
    if (!samples.empty()) {
      const double q = 1.0 - epsilon;
      std::size_t idx = static_cast<std::size_t>(
          std::ceil(q * static_cast<double>(samples.size())));
      idx = std::clamp<std::size_t>(idx, 1, samples.size()) - 1;
      z = samples[idx];
    }
    values_[key] = z;
    if (!samples.empty()) SaveFile();
    return z;
  }

 private:
  void LoadFileOnce() {
    if (loaded_) return;
    loaded_ = true;
    const char* path = std::getenv("SQATTACK_CALIBRATION_CACHE");
    if (path == nullptr || *path == '\0') return;
    path_ = path;
    std::ifstream in(path_);
    if (!in) return;
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (!j.is_object()) return;
    for (auto& [k, v] : j.items()) {
      if (v.is_number()) values_[k] = v.get<double>();
    }
  }

  void SaveFile() {
    if (path_.empty()) return;
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : values_) {
      if (v != std::numeric_limits<double>::lowest()) j[k] = v;
    }
    const std::string tmp = path_ + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) return;
      out << j.dump(1) << "\n";
    }
    std::rename(tmp.c_str(), path_.c_str());
  }

  std::mutex mu_;
  bool loaded_ = false;
  std::string path_;
  std::map<std::string, double> values_;
};

}  // namespace

std::size_t CalibrationLength(std::size_t users, std::size_t length,
                              const CalibrationSettings& settings) {
  const std::size_t cap = std::max(settings.min_columns,
                                   settings.bit_budget / std::max<std::size_t>(users, 1));
  return std::min(length, cap);
}

std::vector<double> CalibrationSamples(std::size_t users, std::size_t length,
                                       double epsilon, ScoreRule rule,
                                       const CalibrationSettings& settings) {
  std::vector<double> maxima;
  if (users < 2 || length < 1) return maxima;
  const std::size_t l = CalibrationLength(users, length, settings);
  const std::size_t coalition =
      std::clamp<std::size_t>(settings.coalition, 1, users - 1);
  const SeedStreams streams(
      HashName(CacheKey(users, length, epsilon, rule, settings)));
  CodeParams params;
  params.users = users;
  params.epsilon = epsilon;
  params.length = l;
  std::vector<std::size_t> members(coalition);
  for (std::size_t k = 0; k < coalition; ++k) members[k] = k;
  maxima.reserve(settings.runs);
  for (std::size_t run = 0; run < settings.runs; ++run) {
    absl::StatusOr<CodeMatrix> code =
        GenFromSeed(params, streams.Seed("run", run));
    if (!code.ok()) break;
    absl::StatusOr<SubsetView> subset = Restrict(*code, members);
    const CombinedWord word(subset->ColumnMeans());
    absl::StatusOr<std::vector<double>> z = Scores(*code, word, rule);
    double best = std::numeric_limits<double>::lowest();
    for (std::size_t i = coalition; i < users; ++i) best = std::max(best, (*z)[i]);
    maxima.push_back(best);
  }
  std::sort(maxima.begin(), maxima.end());
  return maxima;
}

double CalibratedThreshold(std::size_t users, std::size_t length,
                           double epsilon, ScoreRule rule) {
  return ThresholdCache::Get().Lookup(users, length, epsilon, rule);
}

}  // namespace sqattack::fpcode
