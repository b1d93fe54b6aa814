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

#include "pmarket/topology.h"

#include <cmath>
#include <stdexcept>

namespace pmarket {

int Topology::ZoneCapacity() const {
  return static_cast<int>(std::floor(control_zone_radius / kVehicleSpacing +
                                     1e-9));
}

std::vector<Phase> Topology::GroupPhases(int group) const {
  std::vector<Phase> out;
  for (int p : signal_groups.at(group)) out.push_back(phases.at(p));
  return out;
}

void Topology::Validate() const {
  if (!conflicts.IsSymmetric()) {
    throw std::invalid_argument("conflict matrix must be symmetric");
  }
  if (conflicts.size() != num_movements()) {
    throw std::invalid_argument("conflict matrix size mismatch");
  }
  if (!(control_zone_radius > 0.0) ||
      control_zone_radius > approach_length + 1e-9) {
    throw std::invalid_argument("control zone must lie on the approach");
  }
  if (ZoneCapacity() < 1) {
    throw std::invalid_argument("control zone holds no vehicle");
  }
  for (const LaneInfo& l : lanes) {
    if (l.movement < 0 || l.movement >= num_movements()) {
      throw std::invalid_argument("lane feeds an unknown movement");
    }
  }
  for (const Phase& p : phases) {
    if (!p.IsConflictFree(conflicts)) {
      throw std::invalid_argument("phase " + p.id + " is not conflict free");
    }
  }
  for (const auto& group : signal_groups) {
    std::vector<bool> covered(num_movements(), false);
    for (int p : group) {
      for (int m : phases.at(p).movements) covered.at(m) = true;
    }
    for (bool c : covered) {
      if (!c) throw std::invalid_argument("signal group misses a movement");
    }
  }
}

Topology FourLegIntersection(double control_zone_radius) {
  Topology t;
  t.name = "four-leg";
  t.num_approaches = 4;
  t.control_zone_radius = control_zone_radius;
  for (int a = 0; a < 4; ++a) {
    MovementInfo left{a, Turn::kLeft, {}};
    MovementInfo through{a, Turn::kThrough, {}};
    for (int k = 0; k < 3; ++k) {
      const int movement = 2 * a + (k == 0 ? 0 : 1);
      (k == 0 ? left : through).lanes.push_back(t.num_lanes());
      t.lanes.push_back({a, movement});
    }
    t.movements.push_back(left);
    t.movements.push_back(through);
  }
  t.conflicts = ConflictMatrix(8);
  for (int m1 = 0; m1 < 8; ++m1) {
    for (int m2 = m1 + 1; m2 < 8; ++m2) {
      const int a1 = m1 / 2, a2 = m2 / 2;
      if (a1 == a2) continue;
      const bool opposing = (a1 + 2) % 4 == a2;
      const bool left1 = m1 % 2 == 0, left2 = m2 % 2 == 0;
      if (!opposing || left1 != left2) t.conflicts.Set(m1, m2);
    }
  }
  auto mv = [](int approach, Turn turn) {
    return 2 * approach + static_cast<int>(turn);
  };
  t.phases = {
      {"I", {mv(0, Turn::kLeft), mv(2, Turn::kLeft)}},
      {"II", {mv(0, Turn::kThrough), mv(2, Turn::kThrough)}},
      {"III", {mv(1, Turn::kLeft), mv(3, Turn::kLeft)}},
      {"IV", {mv(1, Turn::kThrough), mv(3, Turn::kThrough)}},
      {"V", {mv(0, Turn::kLeft), mv(0, Turn::kThrough)}},
      {"VI", {mv(2, Turn::kLeft), mv(2, Turn::kThrough)}},
      {"VII", {mv(1, Turn::kLeft), mv(1, Turn::kThrough)}},
      {"VIII", {mv(3, Turn::kLeft), mv(3, Turn::kThrough)}},
  };
  t.signal_groups = {{0, 1, 2, 3}, {4, 5, 6, 7}};
  t.Validate();
  return t;
}

Topology TwoMovementIntersection(double control_zone_radius) {
  Topology t;
  t.name = "two-movement";
  t.num_approaches = 2;
  t.control_zone_radius = control_zone_radius;
  for (int a = 0; a < 2; ++a) {
    MovementInfo m{a, Turn::kThrough, {}};
    for (int k = 0; k < 2; ++k) {
      m.lanes.push_back(t.num_lanes());
      t.lanes.push_back({a, a});
    }
    t.movements.push_back(m);
  }
  t.conflicts = ConflictMatrix(2);
  t.conflicts.Set(0, 1);
  t.phases = {{"I", {0}}, {"II", {1}}};
  t.signal_groups = {{0, 1}};
  t.Validate();
  return t;
}

}  // namespace pmarket
