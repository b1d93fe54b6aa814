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

#ifndef PMARKET_TYPES_H_
#define PMARKET_TYPES_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pmarket {

using VehicleId = std::int64_t;

// Value of time is carried in cents per second everywhere inside the
// library; configuration and reports use currency per hour.
inline constexpr double kCentsPerSecondPerCurrencyPerHour = 100.0 / 3600.0;

inline double VotToCentsPerSecond(double currency_per_hour) {
  return currency_per_hour * kCentsPerSecondPerCurrencyPerHour;
}
inline double VotToCurrencyPerHour(double cents_per_second) {
  return cents_per_second / kCentsPerSecondPerCurrencyPerHour;
}

struct Vehicle {
  VehicleId id = 0;
  int approach = 0;
  int lane = 0;
  int movement = 0;
  double arrival_time = 0.0;
  double vot_true = 0.0;      // cents/s
  double vot_declared = 0.0;  // cents/s
  bool connected = true;

  // The VOT the market sees: declared, or zero for vehicles outside the game.
  double EffectiveVot() const { return connected ? vot_declared : 0.0; }
};

// Discharge (stop-line crossing) time per vehicle under one strategy.
struct DischargeSchedule {
  std::string strategy;
  std::map<VehicleId, double> times;

  double at(VehicleId id) const { return times.at(id); }
  bool Contains(VehicleId id) const { return times.count(id) > 0; }
};

}  // namespace pmarket

#endif  // PMARKET_TYPES_H_
