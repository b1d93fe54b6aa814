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

#ifndef PMARKET_MECHANISM_H_
#define PMARKET_MECHANISM_H_

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pmarket/tu_game.h"
#include "pmarket/types.h"

// Priority market: turns a strategy switch into payers, payees and a
// budget-balanced set of side payments.

namespace pmarket {

class ScheduleMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Payers gain from the proposed schedule, payees lose, the rest are
// indifferent (including every vehicle with effective VOT zero).
struct GroupAssignment {
  std::vector<VehicleId> payers;
  std::vector<VehicleId> payees;
  std::vector<VehicleId> indifferent;
  // Seconds gained under the proposed schedule: old minus new.
  std::map<VehicleId, double> delta_tau;
};

GroupAssignment GroupVehicles(const DischargeSchedule& old_schedule,
                              const DischargeSchedule& new_schedule,
                              std::span<const Vehicle> vehicles);

struct GroupGains {
  double payers = 0.0;  // G_A > 0
  double payees = 0.0;  // G_B < 0
};

// Valuated gains of both groups; nullopt when either group is empty, in
// which case there is no game to play.
std::optional<GroupGains> ComputeGroupGains(const GroupAssignment& groups,
                                            std::span<const Vehicle> vehicles);

// Payoffs when both sides agree equal the group gains halved; conflicting
// choices carry zero expected payoff. Requires payers > 0 > payees.
std::pair<PayoffMatrix, PayoffMatrix> BuildPayoffMatrices(double gain_payers,
                                                          double gain_payees);

struct Settlement {
  bool no_game = false;
  // Whether the proposed schedule goes ahead. Always true for direct
  // transactions; the auction may keep the status quo.
  bool adopted = true;
  double gain_a = 0.0;
  double gain_b = 0.0;
  double sigma_total = 0.0;
  // Positive entries pay, negative entries receive.
  std::map<VehicleId, double> payments;
  // Money leaving the vehicles (auction only).
  double operator_revenue = 0.0;

  double PaymentOf(VehicleId id) const {
    auto it = payments.find(id);
    return it == payments.end() ? 0.0 : it->second;
  }
  double Total() const;
};

// Direct transaction: payers pay payees through the TU game. Requires
// G_A + G_B > 0 when both groups are non-empty.
Settlement Settle(const GroupAssignment& groups,
                  std::span<const Vehicle> vehicles);

// Group-level second-price auction baseline. Each side bids its aggregate
// valuated gain, the higher bid wins and pays the losing bid to the operator
// pro rata; ties keep the status quo with no payments.
Settlement SecondPriceAuction(const DischargeSchedule& old_schedule,
                              const DischargeSchedule& new_schedule,
                              std::span<const Vehicle> vehicles);

}  // namespace pmarket

#endif  // PMARKET_MECHANISM_H_
