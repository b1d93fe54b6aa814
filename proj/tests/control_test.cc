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

#include "pmarket/control.h"

#include <cmath>
#include <random>

#include "doctest.h"

namespace pmarket {
namespace {

QueuedVehicle Q(VehicleId id, int lane, int movement, double earliest,
                double weight = 1.0) {
  return QueuedVehicle{id, lane, movement, earliest, weight};
}

SignalPlan AlwaysGreen(int movement, double from) {
  return SignalPlan({{1u << movement, from, 1e9}}, 0.0);
}

TEST_CASE("discharge with green on arrival") {
  std::vector<QueuedVehicle> v{Q(1, 0, 0, 9.0)};
  DischargeSchedule s = PredictDischarge(v, AlwaysGreen(0, -100), {},
                                         ServiceParams{}, "test");
  CHECK(s.at(1) == 9.0);
}

TEST_CASE("queued vehicles discharge one headway apart") {
  std::vector<QueuedVehicle> v{Q(1, 0, 0, 0.0), Q(2, 0, 0, 0.0)};
  DischargeSchedule s =
      PredictDischarge(v, AlwaysGreen(0, 30), {}, ServiceParams{}, "test");
  CHECK(s.at(1) == doctest::Approx(32.0));
  CHECK(s.at(2) == doctest::Approx(33.8));
}

TEST_CASE("red gates every vehicle") {
  std::vector<QueuedVehicle> v{Q(1, 0, 0, 1.0), Q(2, 1, 0, 2.0),
                               Q(3, 0, 0, 3.0)};
  DischargeSchedule s =
      PredictDischarge(v, AlwaysGreen(0, 10), {}, ServiceParams{}, "test");
  for (const auto& [id, tau] : s.times) CHECK(tau >= 10.0);
  CHECK(s.at(3) > s.at(1));
}

TEST_CASE("vehicles roll over to the next cycle") {
  // Movement 0 is green in [0, 5) of every 20 s.
  SignalPlan plan({{1u, 0.0, 5.0}, {2u, 5.0, 20.0}}, 20.0);
  std::vector<QueuedVehicle> v;
  for (int i = 0; i < 3; ++i) v.push_back(Q(i, 0, 0, 0.0));
  DischargeSchedule s = PredictDischarge(v, plan, {}, ServiceParams{}, "t");
  CHECK(s.at(0) == doctest::Approx(2.0));
  CHECK(s.at(1) == doctest::Approx(3.8));
  CHECK(s.at(2) == doctest::Approx(22.0));
}

TEST_CASE("unserved movement is unschedulable") {
  std::vector<QueuedVehicle> v{Q(1, 0, 3, 0.0)};
  CHECK_THROWS_AS(
      PredictDischarge(v, AlwaysGreen(0, 0), {}, ServiceParams{}, "t"),
      UnschedulableError);
}

TEST_CASE("phase sequence validation") {
  ConflictMatrix conflicts(2);
  conflicts.Set(0, 1);
  CHECK(conflicts.IsSymmetric());
  PhaseSequence ok = PhaseSequence::Make({{"I", {0}}, {"II", {1}}},
                                         {10.0, 20.0}, 1.8);
  CHECK(ok.cycle_length == doctest::Approx(33.6));
  CHECK_NOTHROW(ok.Validate(conflicts));
  CHECK(ok.Label() == "I-II");
  PhaseSequence bad = PhaseSequence::Make({{"X", {0, 1}}}, {10.0}, 1.8);
  CHECK_THROWS_AS(bad.Validate(conflicts), std::invalid_argument);
  ok.cycle_length = 40.0;
  CHECK_THROWS_AS(ok.Validate(conflicts), std::invalid_argument);
}

TEST_CASE("green allocation fills the cycle") {
  std::vector<Phase> phases{{"I", {0}}, {"II", {1}}, {"III", {2}},
                            {"IV", {3}}};
  std::vector<QueuedVehicle> v{Q(1, 0, 0, 0), Q(2, 0, 0, 0), Q(3, 1, 1, 0)};
  PhaseSwitchingConfig config;
  std::vector<double> g = AllocateGreens(phases, v, config);
  double total = 0.0;
  for (double x : g) {
    CHECK(x >= config.min_green);
    total += x;
  }
  CHECK(total + 4 * config.lost_time == doctest::Approx(config.cycle_length));
  CHECK(g[0] > g[1]);
  CHECK(g[2] == doctest::Approx(config.min_green));
}

struct FourPhaseFixture {
  std::vector<Phase> group{{"I", {0}}, {"II", {1}}, {"III", {2}},
                           {"IV", {3}}};
  PhaseSwitchingConfig config;
  SignalPlan Incumbent(double now) const {
    std::vector<double> greens(4, (config.cycle_length - 4 * 1.8) / 4);
    return SignalPlan::FromSequence(
        PhaseSequence::Make(group, greens, config.lost_time), now);
  }
};

TEST_CASE("phase switching serves a lone movement first") {
  FourPhaseFixture f;
  std::vector<QueuedVehicle> v;
  for (int i = 0; i < 4; ++i) v.push_back(Q(i, 3, 3, 0.0, 0.5));
  PhaseSwitchingDecision d = PhaseSwitching(
      v, f.group, f.Incumbent(0.0), ServiceState(4, 4), 0.0, f.config, {});
  CHECK(d.adopted);
  CHECK(d.sequence.phases.front().id == "IV");
  CHECK(d.gain > 0.0);
}

TEST_CASE("phase switching keeps the incumbent on a tie") {
  FourPhaseFixture f;
  std::vector<QueuedVehicle> v;
  PhaseSwitchingDecision d = PhaseSwitching(
      v, f.group, f.Incumbent(0.0), ServiceState(4, 4), 0.0, f.config, {});
  CHECK_FALSE(d.adopted);
  CHECK(d.gain == 0.0);
}

TEST_CASE("phase switching maximizes the weighted gain") {
  FourPhaseFixture f;
  std::vector<QueuedVehicle> v{Q(1, 0, 0, 0.0, 0.1), Q(2, 0, 0, 0.0, 0.1),
                               Q(3, 2, 2, 0.0, 2.0)};
  const SignalPlan incumbent = f.Incumbent(0.0);
  PhaseSwitchingDecision d = PhaseSwitching(v, f.group, incumbent,
                                            ServiceState(4, 4), 0.0, f.config,
                                            {});
  CHECK(d.adopted);
  CHECK(d.sequence.phases.front().id == "III");
  // Exhaustive check over every ordering.
  std::vector<int> perm{0, 1, 2, 3};
  const std::vector<double> greens = AllocateGreens(f.group, v, f.config);
  do {
    std::vector<Phase> p;
    std::vector<double> g;
    for (int i : perm) {
      p.push_back(f.group[i]);
      g.push_back(greens[i]);
    }
    auto sched = PredictDischarge(
        v,
        SignalPlan::FromSequence(PhaseSequence::Make(p, g, 1.8), 0.0),
        ServiceState(4, 4), {}, "x");
    CHECK(WeightedGain(v, d.incumbent_schedule, sched) <= d.gain + 1e-12);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

double NewellOracle(double rho) {
  const double vf = 60.0, w = 25.0, jam = 133.0;
  return vf * rho * (1.0 - std::exp((w / vf) * (1.0 - jam / rho)));
}

TEST_CASE("newell flux") {
  FluxParams p;
  CHECK_NOTHROW(p.Validate());
  CHECK(NewellFlux(133.0, p) == 0.0);
  CHECK(NewellFlux(0.0, p) == 0.0);
  CHECK(NewellFlux(50.0, p) == doctest::Approx(NewellOracle(50.0)));
  CHECK(NewellFlux(1e-6, p) == doctest::Approx(60.0 * 1e-6).epsilon(1e-6));
  CHECK_THROWS_AS(NewellFlux(-1.0, p), std::domain_error);
  CHECK_THROWS_AS(NewellFlux(134.0, p), std::domain_error);
  FluxParams bad{20.0, 25.0, 133.0};
  CHECK_THROWS_AS(bad.Validate(), std::invalid_argument);
  double prev = NewellFlux(0.0, p);
  for (int i = 1; i <= 10000; ++i) {
    const double rho = 133.0 * i / 10000.0;
    const double phi = NewellFlux(rho, p);
    CHECK(std::abs(phi - prev) < 1.0);
    if (i < 10000) CHECK(phi > 0.0);
    prev = phi;
  }
}

TEST_CASE("movement weights") {
  std::vector<WeightedDelta> q;
  CHECK(MovementWeight(q) == 0.0);
  q = {{0.0, 5.0}, {0.0, 3.0}};
  CHECK(MovementWeight(q) == 0.0);
  q = {{1.0, 3.0}, {0.5, 4.0}};
  CHECK(MovementWeight(q) == 5.0);
}

TEST_CASE("max-weight selection") {
  std::vector<PhaseOption> empty_options(2);
  CHECK(MaxWeightSelect(empty_options, 1) == 1);

  std::vector<PhaseOption> options(2);
  options[0].terms = {{0, 1.0, 5.0, 0.0, 100.0}};
  options[1].terms = {{1, 1.0, 0.0, 0.0, 100.0}};
  CHECK(MaxWeightSelect(options, 1) == 0);

  options[0].terms[0].downstream = 50.0;
  CHECK(MovementPressure(options[0].terms[0]) == 0.0);
  CHECK(MaxWeightSelect(options, 1) == 1);
}

TEST_CASE("property: max-weight argmax invariant to queue scaling") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::uniform_real_distribution<double> k(0.1, 10.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<PhaseOption> options(4);
    for (auto& o : options) {
      for (int m = 0; m < 2; ++m) {
        o.terms.push_back({m, u(rng), u(rng), u(rng) * u(rng), u(rng) * 100});
      }
    }
    const int chosen = MaxWeightSelect(options, 0);
    const double c = k(rng);
    for (auto& o : options) {
      for (auto& t : o.terms) {
        t.queue *= c;
        t.downstream *= c;
      }
    }
    CHECK(MaxWeightSelect(options, 0) == chosen);
  }
}

TEST_CASE("lyapunov value") {
  std::vector<MaxWeightTerm> t{{0, 2.0, 3.0, 0, 0}, {1, -1.0, 4.0, 0, 0}};
  CHECK(LyapunovValue(t) == doctest::Approx(9.0));
}

}  // namespace
}  // namespace pmarket
