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

#include "pmarket/arterial.h"

#include <cmath>

#include "doctest.h"

namespace pmarket {
namespace {

ArterialConfig Small(double volume, ArterialControl control,
                     bool coordinated = true) {
  ArterialConfig c;
  c.volume = volume;
  c.control = control;
  c.coordinated = coordinated;
  c.warmup = 200.0;
  c.measured_arrivals = 600;
  return c;
}

TEST_CASE("control names") {
  CHECK(ArterialControlName(ArterialControl::kMarket) == "market");
  CHECK(ArterialControlName(ArterialControl::kUnitWeight) == "unit-weight");
  CHECK(ArterialControlName(ArterialControl::kFixedTime) == "fixed-time");
}

TEST_CASE("zero volume") {
  const ArterialResult r = RunArterial(Small(0.0, ArterialControl::kMarket));
  CHECK(r.vehicles.empty());
  CHECK(r.stats.games == 0);
}

TEST_CASE("every vehicle leaves after its free-flow time") {
  for (ArterialControl control :
       {ArterialControl::kMarket, ArterialControl::kUnitWeight,
        ArterialControl::kFixedTime}) {
    for (bool coordinated : {true, false}) {
      const ArterialConfig c = Small(1200.0, control, coordinated);
      const ArterialResult r = RunArterial(c);
      int measured = 0;
      for (std::size_t i = 0; i < r.vehicles.size(); ++i) {
        const ArterialVehicle& v = r.vehicles[i];
        CHECK(v.id == static_cast<VehicleId>(i));
        CHECK(v.junctions >= 1);
        CHECK(v.junctions <= c.num_junctions);
        CHECK(std::isfinite(v.exit_time));
        CHECK(v.Delay() >= -1e-9);
        measured += v.measured;
      }
      CHECK(measured == c.measured_arrivals);
    }
  }
}

TEST_CASE("payments balance and only the market charges") {
  const ArterialResult m = RunArterial(Small(1600.0, ArterialControl::kMarket));
  CHECK(m.stats.games > 0);
  CHECK(m.stats.max_budget_imbalance <= 1e-9);
  double total = 0.0;
  for (const ArterialVehicle& v : m.vehicles) total += v.payment;
  CHECK(std::abs(total) <= 1e-6);
  for (ArterialControl control :
       {ArterialControl::kUnitWeight, ArterialControl::kFixedTime}) {
    const ArterialResult r = RunArterial(Small(1600.0, control));
    for (const ArterialVehicle& v : r.vehicles) CHECK(v.payment == 0.0);
  }
  const ArterialResult f =
      RunArterial(Small(1600.0, ArterialControl::kFixedTime));
  CHECK(f.stats.adoptions == 0);
}

TEST_CASE("controls see the same demand") {
  const ArterialResult a = RunArterial(Small(800.0, ArterialControl::kMarket));
  const ArterialResult b =
      RunArterial(Small(800.0, ArterialControl::kFixedTime, false));
  REQUIRE(a.vehicles.size() == b.vehicles.size());
  for (std::size_t i = 0; i < a.vehicles.size(); ++i) {
    CHECK(a.vehicles[i].arrival_time == b.vehicles[i].arrival_time);
    CHECK(a.vehicles[i].vot_true == b.vehicles[i].vot_true);
    CHECK(a.vehicles[i].junctions == b.vehicles[i].junctions);
    CHECK(a.vehicles[i].free_flow_time == b.vehicles[i].free_flow_time);
  }
}

TEST_CASE("unconnected vehicles never trade") {
  ArterialConfig c = Small(1600.0, ArterialControl::kMarket);
  c.penetration = 0.0;
  const ArterialResult r = RunArterial(c);
  for (const ArterialVehicle& v : r.vehicles) CHECK(v.payment == 0.0);
}

TEST_CASE("deterministic per seed") {
  const ArterialResult a = RunArterial(Small(1200.0, ArterialControl::kMarket));
  const ArterialResult b = RunArterial(Small(1200.0, ArterialControl::kMarket));
  REQUIRE(a.vehicles.size() == b.vehicles.size());
  for (std::size_t i = 0; i < a.vehicles.size(); ++i) {
    CHECK(a.vehicles[i].exit_time == b.vehicles[i].exit_time);
    CHECK(a.vehicles[i].payment == b.vehicles[i].payment);
  }
}

}  // namespace
}  // namespace pmarket
