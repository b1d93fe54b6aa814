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

#ifndef PMARKET_RESERVATION_H_
#define PMARKET_RESERVATION_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pmarket/control.h"
#include "pmarket/types.h"

// Reservation-based control: vehicles request stop-line slots and the
// controller picks the admissible service order with the best weighted
// discharge times.

namespace pmarket {

inline constexpr int kMaxLanes = 32;

struct ReservationConfig {
  // Instances up to this many free vehicles are solved exactly.
  int exact_limit = 10;
  // Search-node budget for the exact solver; exhausting it returns the best
  // order found so far.
  std::int64_t node_limit = 200000;
  // Farthest a vehicle may be moved forward in one local-search move.
  int relocation_window = 8;
  int max_passes = 4;
};

// Service constraints for a reservation queue. A service order is
// admissible when it keeps every lane first-in first-out; the discharge
// time of each vehicle then follows from its earliest time, its lane
// predecessor plus one saturation headway, and every earlier conflicting
// discharge plus the conflict separation.
class ReservationModel {
 public:
  struct State {
    std::array<double, kMaxLanes> lane_last;
    std::array<double, 32> movement_last;
  };

  ReservationModel(ConflictMatrix conflicts, ServiceParams params);

  const ConflictMatrix& conflicts() const { return conflicts_; }
  const ServiceParams& params() const { return params_; }

  State MakeState(const ServiceState& service) const;
  State EmptyState() const;

  // Discharge time of `v` served next from `state`; updates the state.
  double Serve(const QueuedVehicle& v, State& state) const;

  // Serves `vehicles` in the order given by `order` (indices), returning
  // the weighted objective sum w * tau. Fills `times` (indexed like
  // `vehicles`) when non-null.
  double Evaluate(std::span<const QueuedVehicle> vehicles,
                  std::span<const int> order, const State& start,
                  std::vector<double>* times) const;

  // True when swapping u and v, adjacent in an order, cannot change any
  // discharge time.
  bool Independent(const QueuedVehicle& u, const QueuedVehicle& v) const {
    return u.lane != v.lane && !conflicts_.Conflicts(u.movement, v.movement);
  }

 private:
  ConflictMatrix conflicts_;
  ServiceParams params_;
};

struct ReservationResult {
  std::vector<int> order;      // indices into the input vehicles
  std::vector<double> times;   // indexed like the input vehicles
  double objective = 0.0;
  double incumbent_objective = 0.0;
  bool exact = false;
  std::int64_t nodes = 0;

  double Gain() const { return incumbent_objective - objective; }
};

// Finds a service order for `vehicles`, which arrive in incumbent priority
// order (so each lane is already front to back). The incumbent order is
// returned unless another order is strictly better.
ReservationResult OptimizeReservation(const ReservationModel& model,
                                      const ReservationModel::State& start,
                                      std::span<const QueuedVehicle> vehicles,
                                      const ReservationConfig& config);

// Exhaustive search over admissible orders with pruning; exact when the
// node budget is not exhausted. `seed_order` must be admissible and is
// returned unless some order beats it strictly.
ReservationResult SolveReservationExact(const ReservationModel& model,
                                        const ReservationModel::State& start,
                                        std::span<const QueuedVehicle> vehicles,
                                        std::vector<int> seed_order,
                                        std::int64_t node_limit);

// Best insertion of the last vehicle followed by forward relocations until
// no move improves.
ReservationResult ImproveReservation(const ReservationModel& model,
                                     const ReservationModel::State& start,
                                     std::span<const QueuedVehicle> vehicles,
                                     const ReservationConfig& config);

// Service order by earliest stop-line time, keeping lanes first-in
// first-out; ties keep the input order.
std::vector<int> FcfsOrder(std::span<const QueuedVehicle> vehicles);

// Copies `vehicles` with every weight set to one.
std::vector<QueuedVehicle> UnitWeights(std::span<const QueuedVehicle> vehicles);

// Discharge schedule of `result` keyed by vehicle id.
DischargeSchedule ToSchedule(std::span<const QueuedVehicle> vehicles,
                             std::span<const double> times,
                             std::string strategy);

}  // namespace pmarket

#endif  // PMARKET_RESERVATION_H_
