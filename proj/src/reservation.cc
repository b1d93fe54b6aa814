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
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pmarket {
namespace {

constexpr double kImprovement = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool SameState(const ReservationModel::State& a,
               const ReservationModel::State& b) {
  return a.lane_last == b.lane_last && a.movement_last == b.movement_last;
}

void CheckVehicles(std::span<const QueuedVehicle> vehicles,
                   const ConflictMatrix& conflicts) {
  for (const QueuedVehicle& v : vehicles) {
    if (v.lane < 0 || v.lane >= kMaxLanes) {
      throw std::invalid_argument("lane index out of range");
    }
    if (v.movement < 0 || v.movement >= conflicts.size()) {
      throw std::invalid_argument("movement index out of range");
    }
  }
}

// Depth-first branch and bound over lane interleavings.
class ExactSearch {
 public:
  ExactSearch(const ReservationModel& model,
              std::span<const QueuedVehicle> vehicles, std::int64_t node_limit)
      : model_(model), vehicles_(vehicles), node_limit_(node_limit) {
    for (int i = 0; i < static_cast<int>(vehicles.size()); ++i) {
      const int lane = vehicles[i].lane;
      auto it = std::find(lane_ids_.begin(), lane_ids_.end(), lane);
      if (it == lane_ids_.end()) {
        lane_ids_.push_back(lane);
        chains_.emplace_back();
        it = lane_ids_.end() - 1;
      }
      chains_[it - lane_ids_.begin()].push_back(i);
    }
    next_.assign(chains_.size(), 0);
  }

  void Run(const ReservationModel::State& start, std::vector<int> seed) {
    best_order_ = std::move(seed);
    best_ = model_.Evaluate(vehicles_, best_order_, start, nullptr);
    path_.clear();
    Dfs(start, 0.0, -1);
  }

  double best() const { return best_; }
  const std::vector<int>& best_order() const { return best_order_; }
  std::int64_t nodes() const { return nodes_; }
  bool complete() const { return nodes_ <= node_limit_; }

 private:
  double LowerBound(const ReservationModel::State& state) const {
    const double h = model_.params().saturation_headway;
    double bound = 0.0;
    for (std::size_t c = 0; c < chains_.size(); ++c) {
      double t = state.lane_last[lane_ids_[c]];
      for (std::size_t k = next_[c]; k < chains_[c].size(); ++k) {
        const QueuedVehicle& v = vehicles_[chains_[c][k]];
        t = std::max(v.earliest, t + h);
        bound += v.weight * t;
      }
    }
    return bound;
  }

  void Dfs(const ReservationModel::State& state, double cost, int last) {
    if (++nodes_ > node_limit_) return;
    if (path_.size() == vehicles_.size()) {
      if (cost < best_ - kImprovement) {
        best_ = cost;
        best_order_ = path_;
      }
      return;
    }
    for (std::size_t c = 0; c < chains_.size(); ++c) {
      if (next_[c] >= chains_[c].size()) continue;
      const int idx = chains_[c][next_[c]];
      const QueuedVehicle& v = vehicles_[idx];
      if (last >= 0) {
        const QueuedVehicle& u = vehicles_[last];
        if (model_.Independent(u, v) && v.lane < u.lane) continue;
      }
      ReservationModel::State child = state;
      const double tau = model_.Serve(v, child);
      const double child_cost = cost + v.weight * tau;
      ++next_[c];
      if (child_cost + LowerBound(child) < best_ - kImprovement) {
        path_.push_back(idx);
        Dfs(child, child_cost, idx);
        path_.pop_back();
      }
      --next_[c];
      if (nodes_ > node_limit_) return;
    }
  }

  const ReservationModel& model_;
  std::span<const QueuedVehicle> vehicles_;
  std::int64_t node_limit_;
  std::vector<int> lane_ids_;
  std::vector<std::vector<int>> chains_;
  std::vector<std::size_t> next_;
  std::vector<int> path_;
  std::vector<int> best_order_;
  double best_ = kInf;
  std::int64_t nodes_ = 0;
};

// Local search state: an order with cached prefix states and costs.
class OrderSearch {
 public:
  OrderSearch(const ReservationModel& model,
              std::span<const QueuedVehicle> vehicles,
              const ReservationModel::State& start)
      : model_(model), vehicles_(vehicles), start_(start) {
    order_.resize(vehicles.size());
    std::iota(order_.begin(), order_.end(), 0);
    Refresh(0);
  }

  const std::vector<int>& order() const { return order_; }
  double objective() const { return prefix_cost_.back(); }

  // Moves the vehicle at position `from` forward to the best position in
  // [lowest, from). Returns true when the objective improved.
  bool Relocate(int from, int lowest) {
    const int v = order_[from];
    lowest = std::max(lowest, LanePredecessorPosition(from) + 1);
    const double current = objective();
    double best = current;
    int best_to = from;
    for (int to = from - 1; to >= lowest; --to) {
      // Jumping over an independent vehicle changes nothing.
      if (model_.Independent(vehicles_[order_[to]], vehicles_[v])) continue;
      const double value = EvaluateMove(from, to);
      if (value < best - kImprovement) {
        best = value;
        best_to = to;
      }
    }
    if (best_to == from) return false;
    order_.erase(order_.begin() + from);
    order_.insert(order_.begin() + best_to, v);
    Refresh(best_to);
    return true;
  }

 private:
  int LanePredecessorPosition(int pos) const {
    const int lane = vehicles_[order_[pos]].lane;
    for (int k = pos - 1; k >= 0; --k) {
      if (vehicles_[order_[k]].lane == lane) return k;
    }
    return -1;
  }

  void Refresh(int from) {
    const std::size_t n = order_.size();
    prefix_.resize(n + 1);
    prefix_cost_.resize(n + 1);
    if (from == 0) {
      prefix_[0] = start_;
      prefix_cost_[0] = 0.0;
    }
    for (std::size_t k = from; k < n; ++k) {
      prefix_[k + 1] = prefix_[k];
      const QueuedVehicle& v = vehicles_[order_[k]];
      prefix_cost_[k + 1] =
          prefix_cost_[k] + v.weight * model_.Serve(v, prefix_[k + 1]);
    }
  }

  // Objective after moving position `from` to `to` (< from).
  double EvaluateMove(int from, int to) const {
    ReservationModel::State state = prefix_[to];
    double cost = prefix_cost_[to];
    const QueuedVehicle& moved = vehicles_[order_[from]];
    cost += moved.weight * model_.Serve(moved, state);
    for (int k = to; k < from; ++k) {
      const QueuedVehicle& v = vehicles_[order_[k]];
      cost += v.weight * model_.Serve(v, state);
    }
    const int n = static_cast<int>(order_.size());
    for (int k = from + 1; k <= n; ++k) {
      if (SameState(state, prefix_[k])) {
        return cost + (prefix_cost_[n] - prefix_cost_[k]);
      }
      if (k == n) break;
      const QueuedVehicle& v = vehicles_[order_[k]];
      cost += v.weight * model_.Serve(v, state);
    }
    return cost;
  }

  const ReservationModel& model_;
  std::span<const QueuedVehicle> vehicles_;
  ReservationModel::State start_;
  std::vector<int> order_;
  std::vector<ReservationModel::State> prefix_;
  std::vector<double> prefix_cost_;
};

}  // namespace

ReservationModel::ReservationModel(ConflictMatrix conflicts,
                                   ServiceParams params)
    : conflicts_(std::move(conflicts)), params_(params) {
  if (!conflicts_.IsSymmetric()) {
    throw std::invalid_argument("conflict matrix must be symmetric");
  }
  for (int m = 0; m < conflicts_.size(); ++m) {
    if (conflicts_.Conflicts(m, m)) {
      throw std::invalid_argument("a movement cannot conflict with itself");
    }
  }
}

ReservationModel::State ReservationModel::EmptyState() const {
  State s;
  s.lane_last.fill(kNever);
  s.movement_last.fill(kNever);
  return s;
}

ReservationModel::State ReservationModel::MakeState(
    const ServiceState& service) const {
  State s = EmptyState();
  if (service.lane_last.size() > s.lane_last.size() ||
      service.movement_last.size() > s.movement_last.size()) {
    throw std::invalid_argument("service state exceeds the model limits");
  }
  std::copy(service.lane_last.begin(), service.lane_last.end(),
            s.lane_last.begin());
  std::copy(service.movement_last.begin(), service.movement_last.end(),
            s.movement_last.begin());
  return s;
}

double ReservationModel::Serve(const QueuedVehicle& v, State& state) const {
  double tau =
      std::max(v.earliest, state.lane_last[v.lane] + params_.saturation_headway);
  const double sep = params_.ConflictSeparation();
  std::uint32_t mask = conflicts_.Mask(v.movement);
  while (mask) {
    const int m = __builtin_ctz(mask);
    mask &= mask - 1;
    tau = std::max(tau, state.movement_last[m] + sep);
  }
  state.lane_last[v.lane] = tau;
  state.movement_last[v.movement] =
      std::max(state.movement_last[v.movement], tau);
  return tau;
}

double ReservationModel::Evaluate(std::span<const QueuedVehicle> vehicles,
                                  std::span<const int> order,
                                  const State& start,
                                  std::vector<double>* times) const {
  State state = start;
  double objective = 0.0;
  if (times) times->assign(vehicles.size(), 0.0);
  for (int idx : order) {
    const QueuedVehicle& v = vehicles[idx];
    const double tau = Serve(v, state);
    objective += v.weight * tau;
    if (times) (*times)[idx] = tau;
  }
  return objective;
}

ReservationResult SolveReservationExact(const ReservationModel& model,
                                        const ReservationModel::State& start,
                                        std::span<const QueuedVehicle> vehicles,
                                        std::vector<int> seed_order,
                                        std::int64_t node_limit) {
  CheckVehicles(vehicles, model.conflicts());
  std::vector<int> identity(vehicles.size());
  std::iota(identity.begin(), identity.end(), 0);
  ReservationResult result;
  result.incumbent_objective =
      model.Evaluate(vehicles, identity, start, nullptr);
  ExactSearch search(model, vehicles, node_limit);
  search.Run(start, seed_order.empty() ? identity : std::move(seed_order));
  result.order = search.best_order();
  result.objective =
      model.Evaluate(vehicles, result.order, start, &result.times);
  result.exact = search.complete();
  result.nodes = search.nodes();
  return result;
}

ReservationResult ImproveReservation(const ReservationModel& model,
                                     const ReservationModel::State& start,
                                     std::span<const QueuedVehicle> vehicles,
                                     const ReservationConfig& config) {
  CheckVehicles(vehicles, model.conflicts());
  ReservationResult result;
  const int n = static_cast<int>(vehicles.size());
  OrderSearch search(model, vehicles, start);
  result.incumbent_objective = search.objective();
  if (n > 1) {
    search.Relocate(n - 1, 0);
    for (int pass = 0; pass < config.max_passes; ++pass) {
      bool improved = false;
      for (int from = 1; from < n; ++from) {
        improved |= search.Relocate(from, from - config.relocation_window);
      }
      if (!improved) break;
    }
  }
  result.order = search.order();
  result.objective =
      model.Evaluate(vehicles, result.order, start, &result.times);
  return result;
}

ReservationResult OptimizeReservation(const ReservationModel& model,
                                      const ReservationModel::State& start,
                                      std::span<const QueuedVehicle> vehicles,
                                      const ReservationConfig& config) {
  ReservationResult result = ImproveReservation(model, start, vehicles, config);
  if (static_cast<int>(vehicles.size()) <= config.exact_limit) {
    ReservationResult exact = SolveReservationExact(
        model, start, vehicles, result.order, config.node_limit);
    exact.incumbent_objective = result.incumbent_objective;
    return exact;
  }
  return result;
}

std::vector<int> FcfsOrder(std::span<const QueuedVehicle> vehicles) {
  const int n = static_cast<int>(vehicles.size());
  std::vector<int> order;
  order.reserve(n);
  std::vector<bool> used(n, false);
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    std::vector<bool> lane_seen(kMaxLanes, false);
    for (int i = 0; i < n; ++i) {
      if (used[i] || lane_seen[vehicles[i].lane]) continue;
      lane_seen[vehicles[i].lane] = true;
      if (pick < 0 || vehicles[i].earliest < vehicles[pick].earliest) pick = i;
    }
    used[pick] = true;
    order.push_back(pick);
  }
  return order;
}

std::vector<QueuedVehicle> UnitWeights(
    std::span<const QueuedVehicle> vehicles) {
  std::vector<QueuedVehicle> out(vehicles.begin(), vehicles.end());
  for (QueuedVehicle& v : out) v.weight = 1.0;
  return out;
}

DischargeSchedule ToSchedule(std::span<const QueuedVehicle> vehicles,
                             std::span<const double> times,
                             std::string strategy) {
  DischargeSchedule schedule;
  schedule.strategy = std::move(strategy);
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    schedule.times[vehicles[i].id] = times[i];
  }
  return schedule;
}

}  // namespace pmarket
