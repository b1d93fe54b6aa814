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

#ifndef PMARKET_CONTROL_H_
#define PMARKET_CONTROL_H_

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pmarket/types.h"

// Signal-level controllers: the discharge-time service model, phase
// switching, and max-weight phase selection. The reservation optimizer lives
// in reservation.h.

namespace pmarket {

inline constexpr double kNever = -std::numeric_limits<double>::infinity();

class UnschedulableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Service model shared by every controller.
struct ServiceParams {
  double saturation_headway = 1.8;  // s between same-lane discharges
  double startup = 2.0;             // s after green onset
  double clearance = 1.8;           // s between conflicting discharges

  // Minimum gap between a discharge and the next conflicting one: the
  // clearance interval followed by a fresh startup.
  double ConflictSeparation() const { return clearance + startup; }
};

// Symmetric movement conflict relation, at most 32 movements.
class ConflictMatrix {
 public:
  ConflictMatrix() = default;
  explicit ConflictMatrix(int num_movements);

  int size() const { return static_cast<int>(masks_.size()); }
  void Set(int a, int b);
  bool Conflicts(int a, int b) const { return (masks_[a] >> b) & 1u; }
  std::uint32_t Mask(int a) const { return masks_[a]; }
  bool IsSymmetric() const;

 private:
  std::vector<std::uint32_t> masks_;
};

struct Phase {
  std::string id;
  std::vector<int> movements;

  bool Serves(int movement) const;
  std::uint32_t Mask() const;
  bool IsConflictFree(const ConflictMatrix& conflicts) const;
};

// Ordered phases with their green times. Each phase slot opens with the
// lost time (yellow / clearance) and then shows green.
struct PhaseSequence {
  std::vector<Phase> phases;
  std::vector<double> greens;
  double lost_time = 1.8;
  double cycle_length = 0.0;

  static PhaseSequence Make(std::vector<Phase> phases,
                            std::vector<double> greens, double lost_time);
  // Throws std::invalid_argument on a broken invariant.
  void Validate(const ConflictMatrix& conflicts) const;
  std::string Label() const;
};

// Green windows over time. A plan holds one period of windows and, when
// `period` > 0, repeats it forever.
class SignalPlan {
 public:
  struct Window {
    std::uint32_t movements = 0;
    double start = 0.0;
    double end = 0.0;
  };

  SignalPlan() = default;
  SignalPlan(std::vector<Window> windows, double period);

  // The sequence laid out from `start`, repeated cyclically.
  static SignalPlan FromSequence(const PhaseSequence& sequence, double start);

  // Prepends a window that is already running (e.g. the current green).
  SignalPlan WithLeadingWindow(Window window) const;

  bool Serves(int movement) const;
  // First window serving `movement` whose end is after `time`. Throws
  // UnschedulableError when no window ever serves it.
  Window NextGreen(int movement, double time) const;

  const std::vector<Window>& windows() const { return windows_; }
  double period() const { return period_; }

 private:
  std::vector<Window> windows_;
  std::vector<Window> lead_;
  double period_ = 0.0;
};

// A vehicle waiting for service at one junction.
struct QueuedVehicle {
  VehicleId id = 0;
  int lane = 0;
  int movement = 0;
  // Earliest possible stop-line time (free-flow arrival, not before now).
  double earliest = 0.0;
  // Control weight: declared VOT in cents/s, or 1 for delay-only control.
  double weight = 0.0;
};

// Last discharge per lane and per movement, the state the next discharges
// are constrained by.
struct ServiceState {
  std::vector<double> lane_last;
  std::vector<double> movement_last;

  ServiceState() = default;
  ServiceState(int num_lanes, int num_movements)
      : lane_last(num_lanes, kNever), movement_last(num_movements, kNever) {}
};

// Discharge times under a signal plan. `vehicles` must list each lane's
// vehicles front to back. A vehicle discharges no earlier than its earliest
// time, one saturation headway after its lane predecessor, and a startup
// offset after the onset of the green window that serves it.
DischargeSchedule PredictDischarge(std::span<const QueuedVehicle> vehicles,
                                   const SignalPlan& plan,
                                   const ServiceState& state,
                                   const ServiceParams& params,
                                   std::string strategy);

// Sum of weight * (old - new) over the vehicles of both schedules.
double WeightedGain(std::span<const QueuedVehicle> vehicles,
                    const DischargeSchedule& old_schedule,
                    const DischargeSchedule& new_schedule);

// ---------------------------------------------------------------------------
// Phase switching.

struct PhaseSwitchingConfig {
  double cycle_length = 40.0;
  double lost_time = 1.8;
  double min_green = 5.0;
};

// Greens proportional to each phase's share of the waiting vehicles, with
// a minimum green; the sequence fills the cycle exactly.
std::vector<double> AllocateGreens(std::span<const Phase> phases,
                                   std::span<const QueuedVehicle> vehicles,
                                   const PhaseSwitchingConfig& config);

struct PhaseSwitchingDecision {
  PhaseSequence sequence;
  DischargeSchedule incumbent_schedule;
  DischargeSchedule proposed_schedule;
  double gain = 0.0;
  bool adopted = false;
};

// Picks, among all orderings of `group`, the sequence maximizing the
// weighted time gained against `incumbent`. The incumbent is kept unless
// some ordering gains strictly.
PhaseSwitchingDecision PhaseSwitching(std::span<const QueuedVehicle> vehicles,
                                      std::span<const Phase> group,
                                      const SignalPlan& incumbent,
                                      const ServiceState& state, double now,
                                      const PhaseSwitchingConfig& config,
                                      const ServiceParams& params);

// ---------------------------------------------------------------------------
// Max-weight.

struct FluxParams {
  double free_flow_speed = 60.0;  // km/h
  double wave_speed = 25.0;       // km/h
  double jam_density = 133.0;     // veh/(km lane)

  void Validate() const;
};

// Newell's non-linear flow-density relation, veh/h per lane.
double NewellFlux(double density, const FluxParams& params);

struct WeightedDelta {
  double vot = 0.0;
  double gain = 0.0;  // s
};

// Sum of VOT times time gained over the vehicles of one movement queue.
double MovementWeight(std::span<const WeightedDelta> queue);

// Per-movement queue sizes and turning fractions. `turning[m]` is the share
// of vehicles on m's inbound link that take movement m.
struct QueueState {
  std::vector<double> queue;
  std::vector<double> turning;
};

struct MaxWeightTerm {
  int movement = 0;
  double weight = 0.0;      // w_{a,b}
  double queue = 0.0;       // Q_{a,b}
  double downstream = 0.0;  // sum_c w_{b,c} r_{b,c} Q_{b,c}
  double flux = 0.0;        // zero when the phase does not serve (a,b)
};

// [w Q - downstream]^+
double MovementPressure(const MaxWeightTerm& term);

struct PhaseOption {
  Phase phase;
  std::vector<MaxWeightTerm> terms;

  double Score() const;
};

// argmax of the phase scores; the current phase wins ties.
int MaxWeightSelect(std::span<const PhaseOption> options, int current);

// 1/2 sum [w]^+ Q^2, logged for diagnostics only.
double LyapunovValue(std::span<const MaxWeightTerm> terms);

}  // namespace pmarket

#endif  // PMARKET_CONTROL_H_
