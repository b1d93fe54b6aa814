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

#include "pmarket/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace pmarket {
namespace {

double HalfWidth(std::span<const double> x, double confidence) {
  if (x.size() < 2) {
    throw std::invalid_argument("a confidence bound needs two or more values");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence must lie in (0, 1)");
  }
  const double n = static_cast<double>(x.size());
  boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(dist, confidence);
  return t * SampleSd(x) / std::sqrt(n);
}

}  // namespace

double Mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of no values");
  return std::accumulate(x.begin(), x.end(), 0.0) / x.size();
}

double SampleSd(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = Mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / (x.size() - 1));
}

double UpperConfidenceBound(std::span<const double> x, double confidence) {
  return Mean(x) + HalfWidth(x, confidence);
}

double LowerConfidenceBound(std::span<const double> x, double confidence) {
  return Mean(x) - HalfWidth(x, confidence);
}

std::vector<double> AverageRanks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = 0.5 * (i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("Spearman needs paired samples");
  }
  if (x.size() < 2) return 0.0;
  const std::vector<double> rx = AverageRanks(x);
  const std::vector<double> ry = AverageRanks(y);
  const double mx = Mean(rx);
  const double my = Mean(ry);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace pmarket
