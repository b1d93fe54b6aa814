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

#include "pmarket/obstruction.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

#include "pmarket/mechanism.h"
#include "pmarket/topology.h"

namespace pmarket {
namespace {

constexpr VehicleId kActor = VehicleId{1} << 40;
constexpr double kEps = 1e-9;

struct Queued {
  VehicleId id;
  double stop_line_time;
};

// End of the first window of `plan` that closes after `now`.
double NextWindowEnd(const SignalPlan& plan, double now) {
  const double period = plan.period();
  double best = now + period;
  for (const SignalPlan::Window& w : plan.windows()) {
    double end = w.end;
    if (period > 0.0 && end <= now + kEps) {
      end += std::ceil((now + kEps - end) / period) * period;
    }
    if (end > now + kEps) best = std::min(best, end);
  }
  return best;
}

// Start of the first cycle of `plan` beginning after `now`.
double CycleEnd(const SignalPlan& plan, double now) {
  const double period = plan.period();
  const double origin = plan.windows().back().end - period;
  double end = origin + period * std::ceil((now + kEps - origin) / period);
  if (end <= now + kEps) end += period;
  return end;
}

// The window serving `movement` at `t`, if it is green then.
bool GreenAt(const SignalPlan& plan, int movement, double t,
             SignalPlan::Window* window) {
  *window = plan.NextGreen(movement, t);
  return window->start <= t && t < window->end;
}

}  // namespace

ObstructionResult RunObstruction(const ObstructionConfig& config) {
  if (config.volume_per_lane < 0.0) {
    throw std::invalid_argument("volume must be >= 0");
  }
  if (!(config.actor_vot > 0.0)) {
    throw std::invalid_argument("actor VOT must be positive");
  }
  if (!(config.time_step > 0.0) || !(config.episode > 0.0) ||
      config.warmup < 0.0) {
    throw std::invalid_argument("time step and episode must be positive");
  }
  const Topology topology = TwoMovementIntersection(config.control_zone_radius);
  const int num_lanes = topology.num_lanes();
  const int blocked = topology.movements[0].lanes[0];
  const int neighbor = topology.movements[0].lanes[1];
  const double traversal = topology.FreeFlowTraversal();
  const double headway = config.service.saturation_headway;
  const double horizon = config.warmup + traversal + config.episode + 3600.0;

  // Poisson arrivals spread uniformly over the lanes.
  std::vector<Vehicle> vehicles;
  {
    Rng rng(config.seed);
    const double rate = config.volume_per_lane * num_lanes;
    if (rate > 0.0) {
      std::exponential_distribution<double> gap(rate / 3600.0);
      std::uniform_int_distribution<int> lane(0, num_lanes - 1);
      for (double t = gap(rng); t < horizon; t += gap(rng)) {
        Vehicle v;
        v.id = static_cast<VehicleId>(vehicles.size());
        v.arrival_time = t;
        v.lane = lane(rng);
        v.movement = topology.lanes[v.lane].movement;
        v.approach = topology.lanes[v.lane].approach;
        v.vot_true = VotToCentsPerSecond(config.vot.Sample(rng));
        v.vot_declared = v.vot_true;
        vehicles.push_back(v);
      }
    }
  }
  Vehicle actor;
  actor.id = kActor;
  actor.lane = blocked;
  actor.movement = topology.lanes[blocked].movement;
  actor.approach = topology.lanes[blocked].approach;
  actor.arrival_time = config.warmup;
  actor.vot_true = VotToCentsPerSecond(config.actor_vot);
  actor.vot_declared = actor.vot_true;
  auto info = [&](VehicleId id) -> const Vehicle& {
    return id == kActor ? actor : vehicles[id];
  };

  std::vector<Phase> phases;
  for (const Phase& p : topology.phases) phases.push_back(p);
  const PhaseSwitchingConfig& signal = config.signal;
  const double equal_green =
      (signal.cycle_length - phases.size() * signal.lost_time) / phases.size();
  SignalPlan plan = SignalPlan::FromSequence(
      PhaseSequence::Make(phases,
                          std::vector<double>(phases.size(), equal_green),
                          signal.lost_time),
      0.0);
  double next_decision = config.cadence == Cadence::kEndOfCycle
                             ? CycleEnd(plan, 0.0)
                             : NextWindowEnd(plan, 0.0);

  std::vector<std::deque<Queued>> lanes(num_lanes);
  ServiceState state(num_lanes, topology.num_movements());
  ObstructionResult result;
  std::size_t next_arrival = 0;
  bool actor_joined = false;
  double episode_start = -1.0;

  for (std::int64_t step = 0;; ++step) {
    const double t = step * config.time_step;
    const bool stopped = episode_start >= 0.0;
    if (stopped && t >= episode_start + config.episode) break;
    if (t > horizon) throw std::logic_error("actor never reached the stop line");

    while (next_arrival < vehicles.size() &&
           vehicles[next_arrival].arrival_time <= t) {
      const Vehicle& v = vehicles[next_arrival++];
      lanes[v.lane].push_back({v.id, v.arrival_time + traversal});
    }
    if (!actor_joined && t >= actor.arrival_time) {
      actor_joined = true;
      lanes[blocked].push_back({kActor, actor.arrival_time + traversal});
    }
    if (!stopped && !lanes[blocked].empty() &&
        lanes[blocked].front().id == kActor &&
        lanes[blocked].front().stop_line_time <= t) {
      episode_start = t;
    }

    if (t >= next_decision - kEps) {
      std::vector<QueuedVehicle> visible;
      std::vector<Vehicle> players;
      for (int l = 0; l < num_lanes; ++l) {
        const int n = static_cast<int>(lanes[l].size());
        for (int k = 0; k < n; ++k) {
          const Vehicle& v = info(lanes[l][k].id);
          QueuedVehicle q;
          q.id = v.id;
          q.lane = l;
          q.movement = v.movement;
          q.earliest = std::max(lanes[l][k].stop_line_time, t);
          q.weight = v.EffectiveVot();
          visible.push_back(q);
          players.push_back(v);
        }
      }
      const PhaseSwitchingDecision d = PhaseSwitching(
          visible, phases, plan, state, t, signal, config.service);
      if (d.adopted) {
        plan = SignalPlan::FromSequence(d.sequence, t);
        const GroupAssignment groups =
            GroupVehicles(d.incumbent_schedule, d.proposed_schedule, players);
        const Settlement s = Settle(groups, players);
        result.max_budget_imbalance =
            std::max(result.max_budget_imbalance, std::abs(s.Total()));
        if (episode_start >= 0.0 && !s.no_game) {
          ++result.games;
          const double paid = s.PaymentOf(kActor);
          result.income -= paid;
          if (paid > 0.0) ++result.actor_paid;
          if (paid < 0.0) ++result.actor_received;
        }
      }
      next_decision = config.cadence == Cadence::kEndOfCycle
                           ? CycleEnd(plan, t)
                           : NextWindowEnd(plan, t);
    }

    for (int l = 0; l < num_lanes; ++l) {
      const int movement = topology.lanes[l].movement;
      SignalPlan::Window w;
      if (!GreenAt(plan, movement, t, &w)) continue;
      if (t < w.start + config.service.startup) continue;
      if (t < state.lane_last[l] + headway - kEps) continue;
      std::deque<Queued>& q = lanes[l];
      const bool head_ready = !q.empty() && q.front().stop_line_time <= t;
      if (head_ready && !(q.front().id == kActor && episode_start >= 0.0)) {
        q.pop_front();
      } else if (l == neighbor && !head_ready && episode_start >= 0.0 &&
                 lanes[blocked].size() > 1 &&
                 lanes[blocked][1].stop_line_time <= t &&
                 t >= state.lane_last[l] + config.gap_headways * headway -
                          kEps) {
        // A follower squeezes past the stopped vehicle.
        lanes[blocked].erase(lanes[blocked].begin() + 1);
        ++result.blocked_lane_throughput;
      } else {
        continue;
      }
      state.lane_last[l] = t;
      state.movement_last[movement] =
          std::max(state.movement_last[movement], t);
      if (episode_start >= 0.0 && l == neighbor && head_ready) {
        ++result.neighbor_lane_throughput;
      }
    }
  }

  result.episode_minutes = config.episode / 60.0;
  const double vot_per_minute = actor.vot_true * 60.0;
  result.benefit_per_minute =
      -vot_per_minute + result.income / result.episode_minutes;
  return result;
}

}  // namespace pmarket
