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

#include "sqattack/stats.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>

namespace sqattack::stats {

Interval BinomialInterval(std::size_t successes, std::size_t trials,
                          double confidence) {
  if (trials == 0) return {0.0, 1.0};
  const double alpha = 1.0 - confidence;
  const double k = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  Interval out;
  out.lo = successes == 0
               ? 0.0
               : boost::math::quantile(
                     boost::math::beta_distribution<>(k, n - k + 1),
                     alpha / 2);
  out.hi = successes == trials
               ? 1.0
               : boost::math::quantile(
                     boost::math::beta_distribution<>(k + 1, n - k),
                     1 - alpha / 2);
  return out;
}

double ChiSquareUpperTail(double statistic, double df) {
  if (statistic <= 0) return 1.0;
  return boost::math::cdf(
      boost::math::complement(boost::math::chi_squared(df), statistic));
}

double ChiSquarePValue(std::span<const double> observed,
                       std::span<const double> expected) {
  double stat = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  return ChiSquareUpperTail(stat, static_cast<double>(observed.size()) - 1);
}

double TwoProportionPValue(std::size_t ones_a, std::size_t n_a,
                           std::size_t ones_b, std::size_t n_b) {
  const double na = static_cast<double>(n_a);
  const double nb = static_cast<double>(n_b);
  const double total = na + nb;
  const double ones = static_cast<double>(ones_a + ones_b);
  const double zeros = total - ones;
  if (ones == 0 || zeros == 0) return 1.0;
  const double obs[4] = {static_cast<double>(ones_a),
                         na - static_cast<double>(ones_a),
                         static_cast<double>(ones_b),
                         nb - static_cast<double>(ones_b)};
  const double exp[4] = {na * ones / total, na * zeros / total,
                         nb * ones / total, nb * zeros / total};
  double stat = 0;
  for (int i = 0; i < 4; ++i) {
    const double d = obs[i] - exp[i];
    stat += d * d / exp[i];
  }
  return ChiSquareUpperTail(stat, 1.0);
}

double KolmogorovQ(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0;
  double sign = 1;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult KolmogorovSmirnov(std::span<const double> a,
                           std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(i / nx - j / ny));
  }
  const double ne = std::sqrt(nx * ny / (nx + ny));
  KsResult out;
  out.statistic = d;
  out.p_value = KolmogorovQ((ne + 0.12 + 0.11 / ne) * d);
  return out;
}

}  // namespace sqattack::stats
