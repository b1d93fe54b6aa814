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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

namespace pmarket {
namespace {

struct Case {
  std::vector<Vehicle> vehicles;
  DischargeSchedule old_schedule;
  DischargeSchedule new_schedule;
};

// Each entry is (vot, gain); old time 100, new time 100 - gain.
Case MakeCase(const std::vector<std::pair<double, double>>& entries) {
  Case c;
  VehicleId id = 1;
  for (auto [vot, gain] : entries) {
    Vehicle v;
    v.id = id;
    v.vot_true = v.vot_declared = vot;
    c.vehicles.push_back(v);
    c.old_schedule.times[id] = 100.0;
    c.new_schedule.times[id] = 100.0 - gain;
    ++id;
  }
  return c;
}

bool Contains(const std::vector<VehicleId>& ids, VehicleId id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

TEST_CASE("grouping by valuated gain") {
  Case c = MakeCase({{10, 2}, {5, -1}, {8, 0}});
  GroupAssignment g = GroupVehicles(c.old_schedule, c.new_schedule, c.vehicles);
  CHECK(g.payers == std::vector<VehicleId>{1});
  CHECK(g.payees == std::vector<VehicleId>{2});
  CHECK(g.indifferent == std::vector<VehicleId>{3});
  CHECK(g.delta_tau.at(1) == 2.0);
  CHECK(g.delta_tau.at(2) == -1.0);
}

TEST_CASE("non-connected vehicles are indifferent") {
  Case c = MakeCase({{0, 3}, {7, 3}});
  c.vehicles[1].connected = false;
  GroupAssignment g = GroupVehicles(c.old_schedule, c.new_schedule, c.vehicles);
  CHECK(g.payers.empty());
  CHECK(g.indifferent.size() == 2);
}

TEST_CASE("two gainers and two losers") {
  Case c = MakeCase({{12, 4}, {9, 3}, {6, -2}, {4, -1}});
  GroupAssignment g = GroupVehicles(c.old_schedule, c.new_schedule, c.vehicles);
  CHECK(g.payers.size() == 2);
  CHECK(g.payees.size() == 2);
}

TEST_CASE("schedule mismatch") {
  Case c = MakeCase({{1, 1}, {2, 2}});
  c.new_schedule.times.erase(2);
  c.new_schedule.times[9] = 1.0;
  CHECK_THROWS_AS(GroupVehicles(c.old_schedule, c.new_schedule, c.vehicles),
                  ScheduleMismatchError);
  c.new_schedule.times.erase(9);
  CHECK_THROWS_AS(GroupVehicles(c.old_schedule, c.new_schedule, c.vehicles),
                  ScheduleMismatchError);
}

TEST_CASE("group gains") {
  Case c = MakeCase({{10, 2}, {5, -1}});
  auto g = ComputeGroupGains(
      GroupVehicles(c.old_schedule, c.new_schedule, c.vehicles), c.vehicles);
  REQUIRE(g.has_value());
  CHECK(g->payers == 20.0);
  CHECK(g->payees == -5.0);

  c = MakeCase({{0.5, 6}, {1, 4}, {1, -6}});
  g = ComputeGroupGains(
      GroupVehicles(c.old_schedule, c.new_schedule, c.vehicles), c.vehicles);
  REQUIRE(g.has_value());
  CHECK(g->payers == 7.0);
  CHECK(g->payees == -6.0);

  c = MakeCase({{3, 2}});
  CHECK_FALSE(ComputeGroupGains(
                  GroupVehicles(c.old_schedule, c.new_schedule, c.vehicles),
                  c.vehicles)
                  .has_value());
}

TEST_CASE("payoff matrices") {
  auto [a, b] = BuildPayoffMatrices(10, -6);
  CHECK(a == PayoffMatrix(0, 5, -5, 0));
  CHECK(b == PayoffMatrix(0, -3, 3, 0));
  std::tie(a, b) = BuildPayoffMatrices(2, -2);
  CHECK(a == PayoffMatrix(0, 1, -1, 0));
  CHECK(b == PayoffMatrix(0, -1, 1, 0));
  CHECK(a - b == 0.5 * PayoffMatrix(0, 4, -4, 0));
  CHECK_THROWS_AS(BuildPayoffMatrices(-1, -2), std::invalid_argument);
  CHECK_THROWS_AS(BuildPayoffMatrices(1, 0), std::invalid_argument);
}

TEST_CASE("settlement pro-rata split") {
  Case c = MakeCase({{3, 2}, {2, 2}, {6, -1}, {4, 0}});
  GroupAssignment g = GroupVehicles(c.old_schedule, c.new_schedule, c.vehicles);
  Settlement s = Settle(g, c.vehicles);
  CHECK_FALSE(s.no_game);
  CHECK(s.sigma_total == doctest::Approx(4.0));
  CHECK(s.PaymentOf(1) == doctest::Approx(2.4));
  CHECK(s.PaymentOf(2) == doctest::Approx(1.6));
  CHECK(s.PaymentOf(3) == doctest::Approx(-4.0));
  CHECK(s.PaymentOf(4) == 0.0);
  CHECK(std::abs(s.Total()) < 1e-9);
}

TEST_CASE("symmetric single payer and payee") {
  Case c = MakeCase({{2, 3}, {3, -2}});
  GroupAssignment g = GroupVehicles(c.old_schedule, c.new_schedule, c.vehicles);
  // Equal gains are not strictly improving.
  CHECK_THROWS_AS(Settle(g, c.vehicles), std::invalid_argument);
  // Just above the threshold the split tends to k/2.
  c.new_schedule.times[1] = 100.0 - 3.0000001;
  g = GroupVehicles(c.old_schedule, c.new_schedule, c.vehicles);
  Settlement s = Settle(g, c.vehicles);
  CHECK(s.PaymentOf(1) == doctest::Approx(3.0));
  CHECK(s.PaymentOf(2) == doctest::Approx(-3.0));
}

TEST_CASE("settlement without a game") {
  Case c = MakeCase({{2, 3}, {3, 0}});
  Settlement s = Settle(
      GroupVehicles(c.old_schedule, c.new_schedule, c.vehicles), c.vehicles);
  CHECK(s.no_game);
  CHECK(s.sigma_total == 0.0);
  CHECK(s.payments.empty());
}

TEST_CASE("second price auction") {
  Case c = MakeCase({{3, 2}, {2, 2}, {6, -1}});
  Settlement s = SecondPriceAuction(c.old_schedule, c.new_schedule, c.vehicles);
  CHECK(s.adopted);
  CHECK(s.operator_revenue == doctest::Approx(6.0));
  CHECK(s.PaymentOf(1) == doctest::Approx(3.6));
  CHECK(s.PaymentOf(2) == doctest::Approx(2.4));
  CHECK(s.PaymentOf(3) == 0.0);
  CHECK(s.Total() == doctest::Approx(s.operator_revenue));

  c = MakeCase({{2, 2}, {6, -1}});
  s = SecondPriceAuction(c.old_schedule, c.new_schedule, c.vehicles);
  CHECK_FALSE(s.adopted);
  CHECK(s.PaymentOf(1) == 0.0);
  CHECK(s.PaymentOf(2) == doctest::Approx(4.0));
  CHECK(s.operator_revenue == doctest::Approx(4.0));

  c = MakeCase({{3, 2}, {6, -1}});
  s = SecondPriceAuction(c.old_schedule, c.new_schedule, c.vehicles);
  CHECK_FALSE(s.adopted);
  CHECK(s.payments.empty());
  CHECK(s.operator_revenue == 0.0);
}

TEST_CASE("property: budget balance, rationality, compensation, scaling") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> vot(0.0, 1.5);
  std::uniform_real_distribution<double> gain(-20.0, 20.0);
  std::uniform_int_distribution<int> count(2, 12);
  int games = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    std::vector<std::pair<double, double>> entries;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) entries.push_back({vot(rng), gain(rng)});
    Case c = MakeCase(entries);
    GroupAssignment g =
        GroupVehicles(c.old_schedule, c.new_schedule, c.vehicles);
    CHECK(g.payers.size() + g.payees.size() + g.indifferent.size() ==
          static_cast<std::size_t>(n));
    for (VehicleId id : g.payers) CHECK_FALSE(Contains(g.payees, id));
    auto gains = ComputeGroupGains(g, c.vehicles);
    if (!gains || gains->payers + gains->payees <= 0.0) continue;
    ++games;
    Settlement s = Settle(g, c.vehicles);
    CHECK(std::abs(s.Total()) < 1e-9);
    CHECK(std::abs(s.sigma_total - (gains->payers - gains->payees) / 4.0) <
          1e-9);
    for (VehicleId id : g.payers) {
      const Vehicle& v = c.vehicles[id - 1];
      CHECK(s.PaymentOf(id) <= v.vot_declared * g.delta_tau.at(id) + 1e-12);
      CHECK(s.PaymentOf(id) > 0.0);
    }
    for (VehicleId id : g.payees) CHECK(s.PaymentOf(id) < 0.0);
    for (VehicleId id : g.indifferent) CHECK(s.PaymentOf(id) == 0.0);

    const double k = 1.0 + vot(rng) * 3.0;
    Case scaled = c;
    for (Vehicle& v : scaled.vehicles) v.vot_true = v.vot_declared *= k;
    GroupAssignment gs =
        GroupVehicles(scaled.old_schedule, scaled.new_schedule, scaled.vehicles);
    CHECK(gs.payers == g.payers);
    CHECK(gs.payees == g.payees);
    Settlement ss = Settle(gs, scaled.vehicles);
    CHECK(std::abs(ss.sigma_total - k * s.sigma_total) < 1e-9);
    for (const auto& [id, amount] : s.payments) {
      CHECK(std::abs(ss.PaymentOf(id) - k * amount) < 1e-9);
    }

    Settlement auction =
        SecondPriceAuction(c.old_schedule, c.new_schedule, c.vehicles);
    CHECK(auction.adopted);
    CHECK(auction.operator_revenue >= 0.0);
    CHECK(std::abs(auction.Total() - auction.operator_revenue) < 1e-9);
  }
  CHECK(games > 500);
}

}  // namespace
}  // namespace pmarket
