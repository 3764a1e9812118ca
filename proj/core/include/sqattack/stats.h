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

#ifndef SQATTACK_STATS_H_
#define SQATTACK_STATS_H_

#include <cstddef>
#include <span>

namespace sqattack::stats {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Clopper-Pearson interval for a binomial proportion.
Interval BinomialInterval(std::size_t successes, std::size_t trials,
                          double confidence = 0.95);

// P[X >= statistic] for X chi-square with df degrees of freedom.
double ChiSquareUpperTail(double statistic, double df);

// Pearson goodness-of-fit p-value; expected counts must be positive.
double ChiSquarePValue(std::span<const double> observed,
                       std::span<const double> expected);

// Pearson test of equal proportions in a 2x2 table (no continuity
// correction). Returns the p-value.
double TwoProportionPValue(std::size_t ones_a, std::size_t n_a,
                           std::size_t ones_b, std::size_t n_b);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult KolmogorovSmirnov(std::span<const double> a,
                           std::span<const double> b);

// Kolmogorov survival function Q(lambda).
double KolmogorovQ(double lambda);

}  // namespace sqattack::stats

#endif  // SQATTACK_STATS_H_
