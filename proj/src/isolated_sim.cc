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

#include "pmarket/isolated_sim.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

#include "pmarket/mechanism.h"

namespace pmarket {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAdoptionThreshold = 1e-9;

class IsolatedRun {
 public:
  IsolatedRun(const Topology& topology, std::span<const Vehicle> stream,
              const IsolatedConfig& config)
      : topology_(topology),
        stream_(stream),
        config_(config),
        model_(topology.conflicts, config.service),
        base_(model_.EmptyState()),
        tail_(model_.EmptyState()),
        occupancy_(topology.num_lanes(), 0),
        overflow_(topology.num_lanes()) {
    result_.outcomes.resize(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
      if (stream[i].id != static_cast<VehicleId>(i)) {
        throw std::invalid_argument("vehicle ids must match stream positions");
      }
      if (i > 0 && stream[i].arrival_time < stream[i - 1].arrival_time) {
        throw std::invalid_argument("stream must be sorted by arrival time");
      }
    }
    edge_delay_ = (topology.approach_length - topology.control_zone_radius) /
                  topology.FreeFlowSpeedMps();
    capacity_ = topology.ZoneCapacity();
  }

  RunResult Run() {
    std::size_t next = 0;
    double clock = -kInf;
    while (next < stream_.size() || !locked_.empty() || !free_.empty()) {
      const double t_edge = next < stream_.size()
                                ? stream_[next].arrival_time + edge_delay_
                                : kInf;
      const double t_dis = NextDischarge();
      const double t = std::min(t_edge, t_dis);
      if (t < clock) throw std::logic_error("event order violated");
      clock = t;
      Lock(t);
      if (t_dis <= t_edge) {
        Discharge(t);
      } else {
        Arrive(t, static_cast<int>(next++));
      }
    }
    return std::move(result_);
  }

 private:
  struct Locked {
    double tau;
    int id;
    bool operator>(const Locked& o) const {
      return tau != o.tau ? tau > o.tau : id > o.id;
    }
  };

  double NextDischarge() const {
    double t = locked_.empty() ? kInf : locked_.top().tau;
    for (double tau : free_tau_) t = std::min(t, tau);
    return t;
  }

  // Commits every free vehicle due within the commit horizon. The committed
  // set is closed under service dependencies, so the remaining free times
  // are unchanged when evaluated from the new base state.
  void Lock(double t) {
    const double limit = t + config_.commit_horizon;
    std::size_t keep = 0;
    for (std::size_t i = 0; i < free_.size(); ++i) {
      const QueuedVehicle& q = free_[i];
      if (free_tau_[i] <= limit) {
        base_.lane_last[q.lane] = free_tau_[i];
        base_.movement_last[q.movement] =
            std::max(base_.movement_last[q.movement], free_tau_[i]);
        locked_.push({free_tau_[i], static_cast<int>(q.id)});
      } else {
        free_[keep] = q;
        free_tau_[keep] = free_tau_[i];
        ++keep;
      }
    }
    free_.resize(keep);
    free_tau_.resize(keep);
  }

  void Discharge(double t) {
    std::vector<int> entering;
    while (!locked_.empty() && locked_.top().tau <= t) {
      const Locked l = locked_.top();
      locked_.pop();
      result_.outcomes[l.id].discharge_time = l.tau;
      const int lane = stream_[l.id].lane;
      --occupancy_[lane];
      if (!overflow_[lane].empty()) {
        entering.push_back(overflow_[lane].front());
        overflow_[lane].pop_front();
      }
    }
    for (int id : entering) Enter(t, id);
  }

  void Arrive(double t, int id) {
    const int lane = stream_[id].lane;
    if (occupancy_[lane] < capacity_ && overflow_[lane].empty()) {
      Enter(t, id);
    } else {
      result_.outcomes[id].overflowed = true;
      overflow_[lane].push_back(id);
    }
  }

  double Weight(const Vehicle& v) const {
    switch (config_.discipline) {
      case Discipline::kMinDelay:
        return 1.0;
      case Discipline::kMarket:
        return v.EffectiveVot();
      case Discipline::kFcfs:
        return 0.0;
    }
    return 0.0;
  }

  void Enter(double t, int id) {
    const Vehicle& v = stream_[id];
    const int lane = v.lane;
    ++occupancy_[lane];
    result_.stats.max_zone_occupancy =
        std::max(result_.stats.max_zone_occupancy, occupancy_[lane]);
    result_.outcomes[id].visible_time = t;
    QueuedVehicle q;
    q.id = id;
    q.lane = lane;
    q.movement = v.movement;
    q.earliest =
        std::max(v.arrival_time + topology_.FreeFlowTraversal(), t);
    q.weight = Weight(v);
    free_.push_back(q);
    const double appended = model_.Serve(q, tail_);
    free_tau_.push_back(appended);
    ++result_.stats.decisions;
    if (config_.discipline == Discipline::kFcfs) return;

    result_.stats.max_optimized =
        std::max(result_.stats.max_optimized, static_cast<int>(free_.size()));
    for (QueuedVehicle& f : free_) f.earliest = std::max(f.earliest, t);
    const ReservationResult r =
        OptimizeReservation(model_, base_, free_, config_.reservation);
    if (!(r.Gain() > kAdoptionThreshold)) return;
    ++result_.stats.adoptions;
    if (config_.discipline == Discipline::kMarket) Settle(r);

    std::vector<QueuedVehicle> reordered;
    std::vector<double> times;
    reordered.reserve(free_.size());
    times.reserve(free_.size());
    tail_ = base_;
    for (int idx : r.order) {
      reordered.push_back(free_[idx]);
      times.push_back(model_.Serve(free_[idx], tail_));
    }
    free_ = std::move(reordered);
    free_tau_ = std::move(times);
  }

  void Settle(const ReservationResult& r) {
    DischargeSchedule old_schedule;
    DischargeSchedule new_schedule;
    std::vector<Vehicle> involved;
    for (std::size_t i = 0; i < free_.size(); ++i) {
      if (free_tau_[i] == r.times[i]) continue;
      const VehicleId id = free_[i].id;
      old_schedule.times[id] = free_tau_[i];
      new_schedule.times[id] = r.times[i];
      involved.push_back(stream_[id]);
    }
    const GroupAssignment groups =
        GroupVehicles(old_schedule, new_schedule, involved);
    const Settlement direct = pmarket::Settle(groups, involved);
    if (!direct.no_game) ++result_.stats.games;
    result_.stats.max_budget_imbalance =
        std::max(result_.stats.max_budget_imbalance, std::abs(direct.Total()));
    for (const auto& [id, amount] : direct.payments) {
      result_.outcomes[id].payment += amount;
    }
    const Settlement auction =
        SecondPriceAuction(old_schedule, new_schedule, involved);
    if (!auction.adopted) {
      throw std::logic_error("auction rejected a strictly better schedule");
    }
    result_.stats.operator_revenue += auction.operator_revenue;
    result_.stats.min_operator_revenue =
        std::min(result_.stats.min_operator_revenue, auction.operator_revenue);
    for (const auto& [id, amount] : auction.payments) {
      result_.outcomes[id].auction_payment += amount;
    }
  }

  const Topology& topology_;
  std::span<const Vehicle> stream_;
  IsolatedConfig config_;
  ReservationModel model_;
  // State after every committed vehicle.
  ReservationModel::State base_;
  // State after every committed and free vehicle in service order.
  ReservationModel::State tail_;
  std::vector<QueuedVehicle> free_;
  std::vector<double> free_tau_;
  std::priority_queue<Locked, std::vector<Locked>, std::greater<Locked>>
      locked_;
  std::vector<int> occupancy_;
  std::vector<std::deque<int>> overflow_;
  double edge_delay_ = 0.0;
  int capacity_ = 0;
  RunResult result_;
};

}  // namespace

std::string DisciplineName(Discipline d) {
  switch (d) {
    case Discipline::kFcfs:
      return "fcfs";
    case Discipline::kMinDelay:
      return "min-delay";
    case Discipline::kMarket:
      return "market";
  }
  return "unknown";
}

RunResult RunIsolated(const Topology& topology,
                      std::span<const Vehicle> stream,
                      const IsolatedConfig& config) {
  topology.Validate();
  return IsolatedRun(topology, stream, config).Run();
}

}  // namespace pmarket
