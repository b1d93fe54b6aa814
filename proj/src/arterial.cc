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

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "pmarket/mechanism.h"
#include "pmarket/topology.h"

namespace pmarket {
namespace {

constexpr double kEps = 1e-9;
constexpr double kAdoptionThreshold = 1e-9;
constexpr int kEastbound = 1;
constexpr int kWestbound = 3;

// Pretimed slot order: arterial through, arterial left, cross through,
// cross left.
const char* const kPretimed[] = {"IV", "III", "II", "I"};

struct Hop {
  int junction;
  int movement;
  int lane;
};

struct Entry {
  int vehicle;
  double stop_line_time;
};

struct JunctionState {
  double offset = 0.0;
  double next_decision = 0.0;
  int phase = -1;
  std::vector<double> onset;  // green onset per movement, kNever when red
  std::vector<std::deque<Entry>> lanes;
  ServiceState service;
};

int PositiveMod(long long a, int m) {
  const long long r = a % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

class ArterialRun {
 public:
  explicit ArterialRun(const ArterialConfig& config)
      : config_(config),
        topology_(FourLegIntersection(config.entry_length)),
        speed_(config.free_flow_speed / 3.6),
        slots_per_cycle_(static_cast<int>(std::lround(config.cycle /
                                                      config.slot))) {
    Validate();
    for (const char* id : kPretimed) pretimed_.push_back(PhaseIndex(id));
    Generate();
    junctions_.resize(config.num_junctions);
    Rng offsets(config.seed ^ 0x5bd1e995ULL);
    std::uniform_int_distribution<int> pick(
        0, static_cast<int>(config.cycle) - 1);
    for (int j = 0; j < config.num_junctions; ++j) {
      JunctionState& js = junctions_[j];
      js.offset = config.coordinated
                      ? std::fmod(config.offset_step * j, config.cycle)
                      : static_cast<double>(pick(offsets));
      js.next_decision = std::fmod(js.offset, config.slot);
      js.onset.assign(topology_.num_movements(), kNever);
      js.lanes.resize(topology_.num_lanes());
      js.service = ServiceState(topology_.num_lanes(),
                                topology_.num_movements());
    }
  }

  ArterialResult Run() {
    std::size_t next = 0;
    std::size_t done = 0;
    for (std::int64_t step = 0; done < result_.vehicles.size(); ++step) {
      const double t = step * config_.time_step;
      while (next < result_.vehicles.size() &&
             result_.vehicles[next].arrival_time <= t) {
        const int id = static_cast<int>(next++);
        Enqueue(id, 0, result_.vehicles[id].arrival_time +
                           config_.entry_length / speed_);
      }
      Decide(t);
      done += Discharge(t);
    }
    return std::move(result_);
  }

 private:
  void Validate() const {
    if (config_.volume < 0.0) throw std::invalid_argument("volume must be >= 0");
    if (config_.num_junctions < 1) {
      throw std::invalid_argument("need at least one junction");
    }
    if (!(config_.slot > config_.yellow) || !(config_.time_step > 0.0) ||
        std::abs(slots_per_cycle_ * config_.slot - config_.cycle) > kEps) {
      throw std::invalid_argument("cycle must be a whole number of slots");
    }
    if (config_.left_share < 0.0 || config_.left_share > 1.0) {
      throw std::invalid_argument("left share must lie in [0, 1]");
    }
    config_.flux.Validate();
  }

  int PhaseIndex(const std::string& id) const {
    for (std::size_t i = 0; i < topology_.phases.size(); ++i) {
      if (topology_.phases[i].id == id) return static_cast<int>(i);
    }
    throw std::logic_error("missing phase " + id);
  }

  // One route choice at a junction reached on `approach`.
  Hop ChooseHop(int junction, int approach, Rng& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> through_lane(1, 2);
    const bool left = unit(rng) < config_.left_share;
    Hop h;
    h.junction = junction;
    h.movement = 2 * approach + (left ? 0 : 1);
    h.lane = 3 * approach + (left ? 0 : through_lane(rng));
    return h;
  }

  void Generate() {
    const int n = config_.num_junctions;
    // External approaches: eastbound into junction 0, westbound into the
    // last junction, and both cross streets at every junction.
    std::vector<std::pair<int, int>> entries = {{0, kEastbound},
                                                {n - 1, kWestbound}};
    for (int j = 0; j < n; ++j) {
      entries.push_back({j, 0});
      entries.push_back({j, 2});
    }
    // Every junction receives `volume` from outside, split evenly over its
    // external approaches.
    std::vector<int> per_junction(n, 0);
    for (const auto& e : entries) ++per_junction[e.first];
    std::vector<double> weights;
    for (const auto& e : entries) weights.push_back(1.0 / per_junction[e.first]);
    const double rate = config_.volume * n;
    if (rate <= 0.0) return;
    Rng rng(config_.seed);
    std::exponential_distribution<double> gap(rate / 3600.0);
    std::discrete_distribution<int> entry(weights.begin(), weights.end());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double t = 0.0;
    int measured = 0;
    while (measured < config_.measured_arrivals) {
      t += gap(rng);
      ArterialVehicle v;
      v.id = static_cast<VehicleId>(result_.vehicles.size());
      v.arrival_time = t;
      auto [junction, approach] = entries[entry(rng)];
      v.vot_true = VotToCentsPerSecond(config_.vot.Sample(rng));
      v.vot_declared = v.vot_true;
      v.connected = unit(rng) < config_.penetration;
      v.measured = t >= config_.warmup;
      std::vector<Hop> route;
      while (true) {
        const Hop h = ChooseHop(junction, approach, rng);
        route.push_back(h);
        const bool through = h.movement % 2 == 1;
        if (!through || approach == 0 || approach == 2) break;
        junction += approach == kEastbound ? 1 : -1;
        if (junction < 0 || junction >= n) break;
      }
      v.junctions = static_cast<int>(route.size());
      v.free_flow_time = config_.entry_length / speed_ +
                         (v.junctions - 1) * config_.spacing / speed_;
      result_.vehicles.push_back(v);
      routes_.push_back(std::move(route));
      if (v.measured) ++measured;
    }
    hop_.assign(result_.vehicles.size(), 0);
  }

  void Enqueue(int vehicle, int hop, double stop_line_time) {
    const Hop& h = routes_[vehicle][hop];
    junctions_[h.junction].lanes[h.lane].push_back({vehicle, stop_line_time});
    hop_[vehicle] = hop;
  }

  double Weight(int vehicle) const {
    switch (config_.control) {
      case ArterialControl::kMarket: {
        const ArterialVehicle& v = result_.vehicles[vehicle];
        return v.connected ? v.vot_declared : 0.0;
      }
      case ArterialControl::kUnitWeight:
      case ArterialControl::kFixedTime:
        return 1.0;
    }
    return 0.0;
  }

  int PretimedPhase(const JunctionState& js, double t) const {
    const long long slot =
        std::llround(std::floor((t - js.offset) / config_.slot + kEps));
    return pretimed_[PositiveMod(slot, slots_per_cycle_)];
  }

  // Serves `phase` for the slot starting at `t`, then the pretimed plan.
  SignalPlan CandidatePlan(const JunctionState& js, int phase,
                           double t) const {
    std::vector<SignalPlan::Window> cycle;
    for (int k = 1; k <= slots_per_cycle_; ++k) {
      const double start = t + k * config_.slot;
      const int p = PretimedPhase(js, start);
      cycle.push_back({topology_.phases[p].Mask(), start + config_.yellow,
                       start + config_.slot});
    }
    SignalPlan plan(std::move(cycle), config_.cycle);
    const std::uint32_t mask = topology_.phases[phase].Mask();
    std::uint32_t fresh = 0;
    for (int m = 0; m < topology_.num_movements(); ++m) {
      if (!((mask >> m) & 1u)) continue;
      if (js.onset[m] != kNever) {
        plan = plan.WithLeadingWindow({1u << m, js.onset[m], t + config_.slot});
      } else {
        fresh |= 1u << m;
      }
    }
    if (fresh) {
      plan = plan.WithLeadingWindow(
          {fresh, t + config_.yellow, t + config_.slot});
    }
    return plan;
  }

  std::vector<QueuedVehicle> Visible(const JunctionState& js, double t) const {
    std::vector<QueuedVehicle> out;
    for (int l = 0; l < topology_.num_lanes(); ++l) {
      for (const Entry& e : js.lanes[l]) {
        QueuedVehicle q;
        q.id = e.vehicle;
        q.lane = l;
        q.movement = routes_[e.vehicle][hop_[e.vehicle]].movement;
        q.earliest = std::max(e.stop_line_time, t);
        q.weight = Weight(e.vehicle);
        out.push_back(q);
      }
    }
    return out;
  }

  // Per-phase predictions and per-movement weights at one junction.
  struct Evaluation {
    std::vector<QueuedVehicle> vehicles;
    int incumbent = 0;
    std::vector<DischargeSchedule> schedules;  // per phase
    // weights[p][m]: weighted time gained by movement m under phase p.
    std::vector<std::vector<double>> weights;
    std::vector<double> queue;  // vehicles per movement
  };

  Evaluation Evaluate(int j, double t) const {
    const JunctionState& js = junctions_[j];
    Evaluation ev;
    ev.vehicles = Visible(js, t);
    ev.incumbent = PretimedPhase(js, t);
    const int num_phases = static_cast<int>(topology_.phases.size());
    ev.schedules.resize(num_phases);
    for (int p = 0; p < num_phases; ++p) {
      ev.schedules[p] = PredictDischarge(ev.vehicles, CandidatePlan(js, p, t),
                                         js.service, config_.service,
                                         topology_.phases[p].id);
    }
    ev.queue.assign(topology_.num_movements(), 0.0);
    for (const QueuedVehicle& q : ev.vehicles) ev.queue[q.movement] += 1.0;
    ev.weights.assign(num_phases,
                      std::vector<double>(topology_.num_movements(), 0.0));
    const DischargeSchedule& base = ev.schedules[ev.incumbent];
    for (int p = 0; p < num_phases; ++p) {
      for (const QueuedVehicle& q : ev.vehicles) {
        ev.weights[p][q.movement] +=
            q.weight * (base.at(q.id) - ev.schedules[p].at(q.id));
      }
    }
    return ev;
  }

  double Density(const JunctionState& js, int approach, int junction) const {
    double count = 0.0;
    for (int k = 0; k < 3; ++k) count += js.lanes[3 * approach + k].size();
    const bool internal =
        (approach == kEastbound && junction > 0) ||
        (approach == kWestbound && junction < config_.num_junctions - 1);
    const double length_km =
        (internal ? config_.spacing : config_.entry_length) / 1000.0;
    return std::min(count / (3.0 * length_km), config_.flux.jam_density);
  }

  // Downstream junction and approach for an arterial through movement.
  bool Downstream(int junction, int movement, int* next, int* approach) const {
    const int a = movement / 2;
    if (movement % 2 == 0 || (a != kEastbound && a != kWestbound)) return false;
    *next = junction + (a == kEastbound ? 1 : -1);
    *approach = a;
    return *next >= 0 && *next < config_.num_junctions;
  }

  void Decide(double t) {
    std::vector<int> due;
    for (int j = 0; j < config_.num_junctions; ++j) {
      if (t + kEps >= junctions_[j].next_decision) due.push_back(j);
    }
    if (due.empty()) return;
    std::vector<Evaluation> evals(config_.num_junctions);
    std::vector<bool> have(config_.num_junctions, false);
    auto eval = [&](int j) -> const Evaluation& {
      if (!have[j]) {
        evals[j] = Evaluate(j, t);
        have[j] = true;
      }
      return evals[j];
    };
    for (int j : due) {
      JunctionState& js = junctions_[j];
      js.next_decision += config_.slot;
      ++result_.stats.decisions;
      int chosen = PretimedPhase(js, t);
      if (config_.control != ArterialControl::kFixedTime) {
        const Evaluation& ev = eval(j);
        chosen = SelectPhase(j, ev, eval);
        if (chosen != ev.incumbent) {
          const DischargeSchedule& old_s = ev.schedules[ev.incumbent];
          const DischargeSchedule& new_s = ev.schedules[chosen];
          if (WeightedGain(ev.vehicles, old_s, new_s) > kAdoptionThreshold) {
            ++result_.stats.adoptions;
            if (config_.control == ArterialControl::kMarket) {
              Settle(ev, old_s, new_s);
            }
          } else {
            chosen = ev.incumbent;
          }
        }
      }
      Switch(js, chosen, t);
    }
  }

  template <typename EvalFn>
  int SelectPhase(int j, const Evaluation& ev, EvalFn& eval) const {
    const JunctionState& js = junctions_[j];
    std::vector<PhaseOption> options;
    for (std::size_t p = 0; p < topology_.phases.size(); ++p) {
      PhaseOption opt;
      opt.phase = topology_.phases[p];
      for (int m : opt.phase.movements) {
        MaxWeightTerm term;
        term.movement = m;
        term.weight = ev.weights[p][m];
        term.queue = ev.queue[m];
        term.flux = NewellFlux(Density(js, m / 2, j), config_.flux);
        int next = 0;
        int approach = 0;
        if (config_.coordinated && Downstream(j, m, &next, &approach)) {
          const Evaluation& down = eval(next);
          for (int c : {2 * approach, 2 * approach + 1}) {
            const double r = c % 2 == 0 ? config_.left_share
                                        : 1.0 - config_.left_share;
            double w = 0.0;
            for (std::size_t q = 0; q < topology_.phases.size(); ++q) {
              if (topology_.phases[q].Serves(c)) {
                w = std::max(w, down.weights[q][c]);
              }
            }
            term.downstream += w * r * down.queue[c];
          }
        }
        opt.terms.push_back(term);
      }
      options.push_back(std::move(opt));
    }
    return MaxWeightSelect(options, ev.incumbent);
  }

  void Settle(const Evaluation& ev, const DischargeSchedule& old_s,
              const DischargeSchedule& new_s) {
    std::vector<Vehicle> players;
    players.reserve(ev.vehicles.size());
    for (const QueuedVehicle& q : ev.vehicles) {
      const ArterialVehicle& a = result_.vehicles[q.id];
      Vehicle v;
      v.id = a.id;
      v.movement = q.movement;
      v.lane = q.lane;
      v.arrival_time = a.arrival_time;
      v.vot_true = a.vot_true;
      v.vot_declared = a.vot_declared;
      v.connected = a.connected;
      players.push_back(v);
    }
    const GroupAssignment groups = GroupVehicles(old_s, new_s, players);
    const Settlement s = pmarket::Settle(groups, players);
    if (!s.no_game) ++result_.stats.games;
    result_.stats.max_budget_imbalance =
        std::max(result_.stats.max_budget_imbalance, std::abs(s.Total()));
    for (const auto& [id, amount] : s.payments) {
      result_.vehicles[id].payment += amount;
    }
  }

  void Switch(JunctionState& js, int phase, double t) {
    const Phase& next = topology_.phases[phase];
    for (int m = 0; m < topology_.num_movements(); ++m) {
      if (!next.Serves(m)) {
        js.onset[m] = kNever;
      } else if (js.onset[m] == kNever) {
        js.onset[m] = t + config_.yellow;
      }
    }
    js.phase = phase;
  }

  int Discharge(double t) {
    int finished = 0;
    const double headway = config_.service.saturation_headway;
    for (int j = 0; j < config_.num_junctions; ++j) {
      JunctionState& js = junctions_[j];
      for (int l = 0; l < topology_.num_lanes(); ++l) {
        std::deque<Entry>& q = js.lanes[l];
        if (q.empty() || q.front().stop_line_time > t) continue;
        const int m = topology_.lanes[l].movement;
        if (js.onset[m] == kNever || t < js.onset[m] + config_.service.startup) {
          continue;
        }
        if (t < js.service.lane_last[l] + headway - kEps) continue;
        const int id = q.front().vehicle;
        q.pop_front();
        js.service.lane_last[l] = t;
        js.service.movement_last[m] = t;
        const int hop = hop_[id] + 1;
        if (hop < static_cast<int>(routes_[id].size())) {
          Enqueue(id, hop, t + config_.spacing / speed_);
        } else {
          result_.vehicles[id].exit_time = t;
          ++finished;
        }
      }
    }
    return finished;
  }

  ArterialConfig config_;
  Topology topology_;
  double speed_;
  int slots_per_cycle_;
  std::vector<int> pretimed_;
  std::vector<JunctionState> junctions_;
  std::vector<std::vector<Hop>> routes_;
  std::vector<int> hop_;
  ArterialResult result_;
};

}  // namespace

std::string ArterialControlName(ArterialControl c) {
  switch (c) {
    case ArterialControl::kMarket:
      return "market";
    case ArterialControl::kUnitWeight:
      return "unit-weight";
    case ArterialControl::kFixedTime:
      return "fixed-time";
  }
  return "unknown";
}

ArterialResult RunArterial(const ArterialConfig& config) {
  return ArterialRun(config).Run();
}

}  // namespace pmarket
