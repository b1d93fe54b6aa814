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

#include "pmarket/reservation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "doctest.h"

namespace pmarket {
namespace {

ReservationModel TwoMovementModel() {
  ConflictMatrix c(2);
  c.Set(0, 1);
  return ReservationModel(c, ServiceParams{});
}

// Independent evaluator: pairwise constraints over the whole prefix.
double OracleObjective(const std::vector<QueuedVehicle>& v,
                       const std::vector<int>& order,
                       const ConflictMatrix& conflicts) {
  std::vector<double> tau(v.size());
  double total = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const QueuedVehicle& cur = v[order[k]];
    double t = cur.earliest;
    for (std::size_t j = 0; j < k; ++j) {
      const QueuedVehicle& prev = v[order[j]];
      const double pt = tau[order[j]];
      if (prev.lane == cur.lane) t = std::max(t, pt + 1.8);
      if (conflicts.Conflicts(prev.movement, cur.movement)) {
        t = std::max(t, pt + 3.8);
      }
    }
    tau[order[k]] = t;
    total += cur.weight * t;
  }
  return total;
}

bool Admissible(const std::vector<QueuedVehicle>& v,
                const std::vector<int>& order) {
  std::map<int, int> last;
  for (int idx : order) {
    auto it = last.find(v[idx].lane);
    if (it != last.end() && it->second > idx) return false;
    last[v[idx].lane] = idx;
  }
  return true;
}

double BruteForce(const std::vector<QueuedVehicle>& v,
                  const ConflictMatrix& conflicts) {
  std::vector<int> perm(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) perm[i] = static_cast<int>(i);
  double best = std::numeric_limits<double>::infinity();
  do {
    if (!Admissible(v, perm)) continue;
    best = std::min(best, OracleObjective(v, perm, conflicts));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<QueuedVehicle> RandomInstance(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> lane(0, 2);
  std::uniform_real_distribution<double> earliest(0.0, 12.0);
  std::uniform_real_distribution<double> weight(0.05, 1.2);
  std::vector<QueuedVehicle> v;
  std::vector<double> lane_time(3, 0.0);
  for (int i = 0; i < n; ++i) {
    QueuedVehicle q;
    q.id = i;
    q.lane = lane(rng);
    q.movement = q.lane == 2 ? 1 : 0;
    q.earliest = earliest(rng);
    q.weight = weight(rng);
    v.push_back(q);
  }
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return a.earliest < b.earliest;
  });
  return v;
}

TEST_CASE("evaluate matches the pairwise oracle") {
  ReservationModel model = TwoMovementModel();
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto v = RandomInstance(rng, 7);
    std::vector<int> order = FcfsOrder(v);
    CHECK(model.Evaluate(v, order, model.EmptyState(), nullptr) ==
          doctest::Approx(OracleObjective(v, order, model.conflicts())));
  }
}

TEST_CASE("single lane keeps first-come first-served") {
  ReservationModel model = TwoMovementModel();
  std::vector<QueuedVehicle> v{{1, 0, 0, 0.0, 0.1}, {2, 0, 0, 1.0, 5.0},
                               {3, 0, 0, 2.0, 9.0}};
  ReservationResult r =
      OptimizeReservation(model, model.EmptyState(), v, ReservationConfig{});
  CHECK(r.order == std::vector<int>{0, 1, 2});
  CHECK(r.Gain() == 0.0);
}

TEST_CASE("high value vehicle goes first") {
  ReservationModel model = TwoMovementModel();
  std::vector<QueuedVehicle> v{{1, 0, 0, 5.0, 5.0 / 36},
                               {2, 2, 1, 5.0, 40.0 / 36}};
  ReservationResult r =
      OptimizeReservation(model, model.EmptyState(), v, ReservationConfig{});
  CHECK(r.order == std::vector<int>{1, 0});
  CHECK(r.times[1] == 5.0);
  CHECK(r.times[0] == doctest::Approx(8.8));
  CHECK(r.Gain() > 0.0);
}

TEST_CASE("exact solver matches brute force") {
  ReservationModel model = TwoMovementModel();
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> size(1, 8);
  for (int trial = 0; trial < 150; ++trial) {
    auto v = RandomInstance(rng, size(rng));
    ReservationResult r =
        OptimizeReservation(model, model.EmptyState(), v, ReservationConfig{});
    CHECK(r.exact);
    CHECK(Admissible(v, r.order));
    CHECK(r.objective ==
          doctest::Approx(BruteForce(v, model.conflicts())).epsilon(1e-12));
  }
}

TEST_CASE("local search never worsens the incumbent") {
  ReservationModel model = TwoMovementModel();
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    auto v = RandomInstance(rng, 30);
    ReservationResult r =
        ImproveReservation(model, model.EmptyState(), v, ReservationConfig{});
    CHECK(Admissible(v, r.order));
    CHECK(r.objective <= r.incumbent_objective + 1e-9);
    CHECK(r.objective ==
          doctest::Approx(OracleObjective(v, r.order, model.conflicts())));
  }
}

TEST_CASE("min-delay on exchangeable vehicles equals first-come order") {
  ReservationModel model = TwoMovementModel();
  std::vector<QueuedVehicle> v{{1, 0, 0, 0.0, 1}, {2, 2, 1, 10.0, 1},
                               {3, 0, 0, 20.0, 1}};
  ReservationResult r = OptimizeReservation(
      model, model.EmptyState(), UnitWeights(v), ReservationConfig{});
  CHECK(r.Gain() == 0.0);
  CHECK(r.order == FcfsOrder(v));
}

TEST_CASE("fcfs sorts by earliest time within lane order") {
  std::vector<QueuedVehicle> v{{1, 0, 0, 3.0, 1}, {2, 1, 0, 1.0, 1},
                               {3, 2, 1, 2.0, 1}};
  CHECK(FcfsOrder(v) == std::vector<int>{1, 2, 0});
  std::vector<QueuedVehicle> same_lane{{1, 0, 0, 3.0, 1}, {2, 0, 0, 1.0, 1}};
  CHECK(FcfsOrder(same_lane) == std::vector<int>{0, 1});
}

TEST_CASE("conflicting discharges keep the clearance") {
  ReservationModel model = TwoMovementModel();
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    auto v = RandomInstance(rng, 20);
    ReservationResult r =
        OptimizeReservation(model, model.EmptyState(), v, ReservationConfig{});
    for (std::size_t a = 0; a < v.size(); ++a) {
      for (std::size_t b = a + 1; b < v.size(); ++b) {
        if (model.conflicts().Conflicts(v[a].movement, v[b].movement)) {
          CHECK(std::abs(r.times[a] - r.times[b]) >= 3.8 - 1e-9);
        }
        if (v[a].lane == v[b].lane) {
          CHECK(r.times[b] - r.times[a] >= 1.8 - 1e-9);
        }
      }
    }
  }
}

}  // namespace
}  // namespace pmarket
