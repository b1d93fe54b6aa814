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

#ifndef PMARKET_ISOLATED_SIM_H_
#define PMARKET_ISOLATED_SIM_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pmarket/reservation.h"
#include "pmarket/topology.h"
#include "pmarket/types.h"

// Event-driven simulation of one reservation-controlled junction.

namespace pmarket {

enum class Discipline {
  kFcfs,      // arrival order, never reordered
  kMinDelay,  // optimizer with unit weights, no payments
  kMarket,    // optimizer with declared VOT weights and side payments
};

std::string DisciplineName(Discipline d);

struct IsolatedConfig {
  Discipline discipline = Discipline::kMarket;
  ServiceParams service;
  ReservationConfig reservation;
  // Vehicles due to discharge within this many seconds are committed and
  // no longer reordered.
  double commit_horizon = 2.0;
};

struct VehicleOutcome {
  double visible_time = 0.0;    // entered the control zone
  double discharge_time = 0.0;  // crossed the stop line
  bool overflowed = false;      // waited outside the control zone
  // Direct-transaction payments, positive when paying.
  double payment = 0.0;
  // Second-price auction payments for the same decisions.
  double auction_payment = 0.0;
};

struct RunStats {
  std::int64_t decisions = 0;
  std::int64_t adoptions = 0;
  std::int64_t games = 0;  // adoptions with both payers and payees
  double max_budget_imbalance = 0.0;
  double min_operator_revenue = 0.0;
  double operator_revenue = 0.0;
  int max_zone_occupancy = 0;
  int max_optimized = 0;
};

struct RunResult {
  std::vector<VehicleOutcome> outcomes;  // indexed by vehicle id
  RunStats stats;
};

// Runs the stream to completion. Vehicle ids must equal their index in
// `stream`, which is sorted by arrival time.
RunResult RunIsolated(const Topology& topology,
                      std::span<const Vehicle> stream,
                      const IsolatedConfig& config);

}  // namespace pmarket

#endif  // PMARKET_ISOLATED_SIM_H_
