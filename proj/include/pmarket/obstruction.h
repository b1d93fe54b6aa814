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

#ifndef PMARKET_OBSTRUCTION_H_
#define PMARKET_OBSTRUCTION_H_

#include <cstdint>

#include "pmarket/arrivals.h"
#include "pmarket/control.h"

// A vehicle that parks at the stop line to sell priority, simulated on a
// two-movement junction under phase-switching control with payments. The
// controller sees every queued vehicle, including those stacked beyond the
// control zone behind the stopped one.

namespace pmarket {

enum class Cadence {
  kEndOfPhase,  // re-plan whenever a green ends
  kEndOfCycle,  // re-plan once per cycle
};

struct ObstructionConfig {
  double volume_per_lane = 500.0;  // veh/h/lane
  double actor_vot = 14.1;         // currency/h
  VotSampler vot;
  std::uint64_t seed = 1;
  double warmup = 600.0;           // s before the actor arrives
  double episode = 1800.0;         // s the actor stays at the stop line
  double time_step = 0.1;          // s
  double control_zone_radius = 150.0;
  // A follower passes the actor only through a gap of this many
  // saturation headways in the adjacent lane.
  double gap_headways = 2.0;
  Cadence cadence = Cadence::kEndOfCycle;
  PhaseSwitchingConfig signal;
  ServiceParams service;
};

struct ObstructionResult {
  double episode_minutes = 0.0;
  double income = 0.0;            // cents received net of payments made
  double benefit_per_minute = 0.0;  // cents per minute
  std::int64_t games = 0;
  std::int64_t actor_paid = 0;      // settlements where the actor paid
  std::int64_t actor_received = 0;  // settlements where it was paid
  // Vehicles discharged during the episode, per lane.
  std::int64_t blocked_lane_throughput = 0;
  std::int64_t neighbor_lane_throughput = 0;
  double max_budget_imbalance = 0.0;
};

ObstructionResult RunObstruction(const ObstructionConfig& config);

}  // namespace pmarket

#endif  // PMARKET_OBSTRUCTION_H_
