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

#ifndef PMARKET_ARTERIAL_H_
#define PMARKET_ARTERIAL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pmarket/arrivals.h"
#include "pmarket/control.h"
#include "pmarket/types.h"

// Four signalized junctions on an east-west arterial under slotted
// max-weight control. Each junction is the three-lane four-leg layout;
// through vehicles on the arterial continue to the next junction, every
// other movement leaves the network.

namespace pmarket {

enum class ArterialControl {
  kMarket,      // VOT-weighted max-weight with direct-transaction payments
  kUnitWeight,  // max-weight on unweighted time gains, no payments
  kFixedTime,   // the pretimed plan only
};

std::string ArterialControlName(ArterialControl c);

struct ArterialConfig {
  // veh/h entering each junction from outside, split evenly over its
  // external approaches.
  double volume = 900.0;
  double left_share = 1.0 / 3.0;
  double penetration = 1.0;
  VotSampler vot;
  std::uint64_t seed = 1;
  double warmup = 600.0;
  int measured_arrivals = 2000;

  // Coordinated junctions run offsets of `offset_step` * index and share
  // queue information with their neighbours. Uncoordinated junctions draw
  // an integer offset in [0, cycle) and decide alone.
  bool coordinated = true;
  ArterialControl control = ArterialControl::kMarket;

  int num_junctions = 4;
  double cycle = 40.0;
  double offset_step = 20.0;
  double slot = 10.0;  // s between phase decisions
  double yellow = 1.8;
  double spacing = 1000.0 / 3.0;  // m between adjacent stop lines
  double entry_length = 150.0;    // m of each external approach
  double free_flow_speed = 60.0;  // km/h
  double time_step = 0.1;
  ServiceParams service;
  FluxParams flux;
};

struct ArterialVehicle {
  VehicleId id = 0;
  double arrival_time = 0.0;
  double vot_true = 0.0;  // cents/s
  double vot_declared = 0.0;
  bool connected = true;
  bool measured = false;  // arrived after the warm-up
  int junctions = 0;      // stop lines crossed
  double free_flow_time = 0.0;
  double exit_time = 0.0;  // last stop-line crossing
  double payment = 0.0;    // positive when paying

  double Delay() const { return exit_time - arrival_time - free_flow_time; }
};

struct ArterialStats {
  std::int64_t decisions = 0;
  std::int64_t adoptions = 0;  // slots served by a non-pretimed phase
  std::int64_t games = 0;
  double max_budget_imbalance = 0.0;
};

struct ArterialResult {
  std::vector<ArterialVehicle> vehicles;  // indexed by id
  ArterialStats stats;
};

ArterialResult RunArterial(const ArterialConfig& config);

}  // namespace pmarket

#endif  // PMARKET_ARTERIAL_H_
