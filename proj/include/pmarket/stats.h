// Copyright 2026 The pmarket Authors.
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

#ifndef PMARKET_STATS_H_
#define PMARKET_STATS_H_

#include <span>
#include <vector>

namespace pmarket {

double Mean(std::span<const double> x);

// Sample standard deviation (n - 1 denominator); zero for fewer than two
// values.
double SampleSd(std::span<const double> x);

// One-sided Student-t confidence bounds on the mean.
double UpperConfidenceBound(std::span<const double> x,
                            double confidence = 0.95);
double LowerConfidenceBound(std::span<const double> x,
                            double confidence = 0.95);

// Ranks starting at 1, ties sharing their average rank.
std::vector<double> AverageRanks(std::span<const double> x);

// Spearman rank correlation; zero when either side is constant.
double Spearman(std::span<const double> x, std::span<const double> y);

}  // namespace pmarket

#endif  // PMARKET_STATS_H_
