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

#ifndef PMARKET_TOPOLOGY_H_
#define PMARKET_TOPOLOGY_H_

#include <string>
#include <vector>

#include "pmarket/control.h"

namespace pmarket {

enum class Turn { kLeft = 0, kThrough = 1 };

struct LaneInfo {
  int approach = 0;
  int movement = 0;
};

struct MovementInfo {
  int approach = 0;
  Turn turn = Turn::kThrough;
  std::vector<int> lanes;
};

// A single junction: lanes feed movements, movements conflict pairwise.
struct Topology {
  std::string name;
  int num_approaches = 0;
  std::vector<LaneInfo> lanes;
  std::vector<MovementInfo> movements;
  ConflictMatrix conflicts;
  std::vector<Phase> phases;
  // Phases grouped into signal groups; each group covers every movement.
  std::vector<std::vector<int>> signal_groups;
  double approach_length = 150.0;  // m, where arrivals are generated
  double control_zone_radius = 150.0;
  double free_flow_speed = 60.0;  // km/h

  int num_lanes() const { return static_cast<int>(lanes.size()); }
  int num_movements() const { return static_cast<int>(movements.size()); }
  double FreeFlowSpeedMps() const { return free_flow_speed / 3.6; }
  // Seconds from the arrival point to the stop line at free-flow speed.
  double FreeFlowTraversal() const {
    return approach_length / FreeFlowSpeedMps();
  }
  // Vehicles per lane that fit inside the control zone.
  int ZoneCapacity() const;
  std::vector<Phase> GroupPhases(int group) const;

  // Throws std::invalid_argument on a broken invariant.
  void Validate() const;
};

// Spacing per queued vehicle used to size control zones.
inline constexpr double kVehicleSpacing = 7.5;

// Three-lane four-leg intersection. Approaches are indexed by travel
// direction (0 northbound, 1 eastbound, 2 southbound, 3 westbound); each
// has an exclusive left lane and two through lanes. Movement 2a + 0 is the
// left turn and 2a + 1 the through movement of approach a. Phases I-IV
// pair opposing movements, V-VIII serve one approach each.
Topology FourLegIntersection(double control_zone_radius);

// Two conflicting movements with two lanes each.
Topology TwoMovementIntersection(double control_zone_radius);

}  // namespace pmarket

#endif  // PMARKET_TOPOLOGY_H_
