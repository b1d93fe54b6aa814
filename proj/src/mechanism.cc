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

#include "pmarket/mechanism.h"

#include <cmath>
#include <string>

namespace pmarket {
namespace {

std::map<VehicleId, const Vehicle*> IndexVehicles(
    std::span<const Vehicle> vehicles) {
  std::map<VehicleId, const Vehicle*> index;
  for (const Vehicle& v : vehicles) index[v.id] = &v;
  return index;
}

double ValuatedGain(const GroupAssignment& groups,
                    const std::map<VehicleId, const Vehicle*>& index,
                    VehicleId id) {
  auto it = index.find(id);
  if (it == index.end()) {
    throw ScheduleMismatchError("no vehicle record for id " +
                                std::to_string(id));
  }
  return it->second->EffectiveVot() * groups.delta_tau.at(id);
}

}  // namespace

double Settlement::Total() const {
  double total = 0.0;
  for (const auto& [id, amount] : payments) total += amount;
  return total;
}

GroupAssignment GroupVehicles(const DischargeSchedule& old_schedule,
                              const DischargeSchedule& new_schedule,
                              std::span<const Vehicle> vehicles) {
  if (old_schedule.times.size() != new_schedule.times.size()) {
    throw ScheduleMismatchError("schedules cover different vehicle sets");
  }
  const auto index = IndexVehicles(vehicles);
  GroupAssignment groups;
  auto new_it = new_schedule.times.begin();
  for (const auto& [id, old_tau] : old_schedule.times) {
    if (new_it->first != id) {
      throw ScheduleMismatchError("vehicle " + std::to_string(id) +
                                  " missing from the proposed schedule");
    }
    const double gain = old_tau - new_it->second;
    ++new_it;
    groups.delta_tau[id] = gain;
    auto v = index.find(id);
    if (v == index.end()) {
      throw ScheduleMismatchError("no vehicle record for id " +
                                  std::to_string(id));
    }
    const double valuated = v->second->EffectiveVot() * gain;
    if (valuated > 0.0) {
      groups.payers.push_back(id);
    } else if (valuated < 0.0) {
      groups.payees.push_back(id);
    } else {
      groups.indifferent.push_back(id);
    }
  }
  return groups;
}

std::optional<GroupGains> ComputeGroupGains(const GroupAssignment& groups,
                                            std::span<const Vehicle> vehicles) {
  if (groups.payers.empty() || groups.payees.empty()) return std::nullopt;
  const auto index = IndexVehicles(vehicles);
  GroupGains gains;
  for (VehicleId id : groups.payers) {
    gains.payers += ValuatedGain(groups, index, id);
  }
  for (VehicleId id : groups.payees) {
    gains.payees += ValuatedGain(groups, index, id);
  }
  return gains;
}

std::pair<PayoffMatrix, PayoffMatrix> BuildPayoffMatrices(double gain_payers,
                                                          double gain_payees) {
  if (!(gain_payers > 0.0) || !(gain_payees < 0.0)) {
    throw std::invalid_argument(
        "payoff matrices need a positive payer gain and a negative payee gain");
  }
  return {PayoffMatrix(0.0, gain_payers / 2.0, -gain_payers / 2.0, 0.0),
          PayoffMatrix(0.0, gain_payees / 2.0, -gain_payees / 2.0, 0.0)};
}

Settlement Settle(const GroupAssignment& groups,
                  std::span<const Vehicle> vehicles) {
  Settlement settlement;
  const std::optional<GroupGains> gains = ComputeGroupGains(groups, vehicles);
  if (!gains) {
    settlement.no_game = true;
    return settlement;
  }
  if (!(gains->payers + gains->payees > 0.0)) {
    throw std::invalid_argument(
        "direct transactions require a strictly improving schedule");
  }
  settlement.gain_a = gains->payers;
  settlement.gain_b = gains->payees;
  const auto [a, b] = BuildPayoffMatrices(gains->payers, gains->payees);
  const TuSolution solution = SolveTuGame(a, b);
  settlement.sigma_total = solution.sigma;

  const auto index = IndexVehicles(vehicles);
  for (VehicleId id : groups.payers) {
    settlement.payments[id] =
        ValuatedGain(groups, index, id) / gains->payers * solution.sigma;
  }
  for (VehicleId id : groups.payees) {
    settlement.payments[id] =
        -ValuatedGain(groups, index, id) / gains->payees * solution.sigma;
  }
  return settlement;
}

Settlement SecondPriceAuction(const DischargeSchedule& old_schedule,
                              const DischargeSchedule& new_schedule,
                              std::span<const Vehicle> vehicles) {
  const GroupAssignment groups =
      GroupVehicles(old_schedule, new_schedule, vehicles);
  const auto index = IndexVehicles(vehicles);
  Settlement settlement;
  double bid_switch = 0.0;
  double bid_keep = 0.0;
  for (VehicleId id : groups.payers) {
    bid_switch += ValuatedGain(groups, index, id);
  }
  for (VehicleId id : groups.payees) {
    bid_keep -= ValuatedGain(groups, index, id);
  }
  settlement.gain_a = bid_switch;
  settlement.gain_b = -bid_keep;
  settlement.no_game = groups.payers.empty() || groups.payees.empty();

  if (bid_switch == bid_keep) {
    settlement.adopted = false;
    return settlement;
  }
  settlement.adopted = bid_switch > bid_keep;
  const auto& winners = settlement.adopted ? groups.payers : groups.payees;
  const double winning_bid = settlement.adopted ? bid_switch : bid_keep;
  const double price = settlement.adopted ? bid_keep : bid_switch;
  settlement.sigma_total = price;
  settlement.operator_revenue = price;
  if (price == 0.0) return settlement;
  for (VehicleId id : winners) {
    const double share = std::abs(ValuatedGain(groups, index, id)) / winning_bid;
    settlement.payments[id] = share * price;
  }
  return settlement;
}

}  // namespace pmarket
