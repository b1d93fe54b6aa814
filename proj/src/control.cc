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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pmarket {
namespace {

constexpr double kGainTolerance = 1e-9;
constexpr int kMaxWindowHops = 10000;

}  // namespace

ConflictMatrix::ConflictMatrix(int num_movements) : masks_(num_movements, 0u) {
  if (num_movements > 32) {
    throw std::invalid_argument("at most 32 movements per junction");
  }
}

void ConflictMatrix::Set(int a, int b) {
  masks_.at(a) |= 1u << b;
  masks_.at(b) |= 1u << a;
}

bool ConflictMatrix::IsSymmetric() const {
  for (int a = 0; a < size(); ++a) {
    for (int b = 0; b < size(); ++b) {
      if (Conflicts(a, b) != Conflicts(b, a)) return false;
    }
  }
  return true;
}

bool Phase::Serves(int movement) const {
  return std::find(movements.begin(), movements.end(), movement) !=
         movements.end();
}

std::uint32_t Phase::Mask() const {
  std::uint32_t mask = 0;
  for (int m : movements) mask |= 1u << m;
  return mask;
}

bool Phase::IsConflictFree(const ConflictMatrix& conflicts) const {
  for (int a : movements) {
    for (int b : movements) {
      if (conflicts.Conflicts(a, b)) return false;
    }
  }
  return true;
}

PhaseSequence PhaseSequence::Make(std::vector<Phase> phases,
                                  std::vector<double> greens,
                                  double lost_time) {
  PhaseSequence seq;
  seq.phases = std::move(phases);
  seq.greens = std::move(greens);
  seq.lost_time = lost_time;
  seq.cycle_length =
      std::accumulate(seq.greens.begin(), seq.greens.end(), 0.0) +
      lost_time * static_cast<double>(seq.phases.size());
  return seq;
}

void PhaseSequence::Validate(const ConflictMatrix& conflicts) const {
  if (phases.empty() || phases.size() != greens.size()) {
    throw std::invalid_argument("phase sequence needs one green per phase");
  }
  double total = lost_time * static_cast<double>(phases.size());
  for (double g : greens) {
    if (!(g > 0.0)) throw std::invalid_argument("greens must be positive");
    total += g;
  }
  if (std::abs(total - cycle_length) > 1e-9) {
    throw std::invalid_argument("phase durations do not sum to the cycle");
  }
  for (const Phase& p : phases) {
    if (!p.IsConflictFree(conflicts)) {
      throw std::invalid_argument("phase " + p.id +
                                  " contains conflicting movements");
    }
  }
}

std::string PhaseSequence::Label() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    if (i > 0) os << '-';
    os << phases[i].id;
  }
  return os.str();
}

SignalPlan::SignalPlan(std::vector<Window> windows, double period)
    : windows_(std::move(windows)), period_(period) {
  std::sort(windows_.begin(), windows_.end(),
            [](const Window& a, const Window& b) { return a.start < b.start; });
}

SignalPlan SignalPlan::FromSequence(const PhaseSequence& sequence,
                                    double start) {
  std::vector<Window> windows;
  double t = start;
  for (std::size_t i = 0; i < sequence.phases.size(); ++i) {
    t += sequence.lost_time;
    windows.push_back({sequence.phases[i].Mask(), t, t + sequence.greens[i]});
    t += sequence.greens[i];
  }
  return SignalPlan(std::move(windows), t - start);
}

SignalPlan SignalPlan::WithLeadingWindow(Window window) const {
  SignalPlan plan = *this;
  plan.lead_.push_back(window);
  return plan;
}

bool SignalPlan::Serves(int movement) const {
  const std::uint32_t bit = 1u << movement;
  for (const Window& w : lead_) {
    if (w.movements & bit) return true;
  }
  for (const Window& w : windows_) {
    if (w.movements & bit) return true;
  }
  return false;
}

SignalPlan::Window SignalPlan::NextGreen(int movement, double time) const {
  const std::uint32_t bit = 1u << movement;
  for (const Window& w : lead_) {
    if ((w.movements & bit) && w.end > time) return w;
  }
  bool served = false;
  for (const Window& w : windows_) served = served || (w.movements & bit);
  if (!served) {
    throw UnschedulableError("movement " + std::to_string(movement) +
                             " is never served by the signal plan");
  }
  if (period_ <= 0.0) {
    for (const Window& w : windows_) {
      if ((w.movements & bit) && w.end > time) return w;
    }
    throw UnschedulableError("movement " + std::to_string(movement) +
                             " has no green after t=" + std::to_string(time));
  }
  const double origin = windows_.front().start;
  double k = std::max(0.0, std::floor((time - origin) / period_) - 1.0);
  for (int hop = 0; hop < 4; ++hop, k += 1.0) {
    for (const Window& w : windows_) {
      if (!(w.movements & bit)) continue;
      const Window shifted{w.movements, w.start + k * period_,
                           w.end + k * period_};
      if (shifted.end > time) return shifted;
    }
  }
  throw UnschedulableError("signal plan search failed");
}

DischargeSchedule PredictDischarge(std::span<const QueuedVehicle> vehicles,
                                   const SignalPlan& plan,
                                   const ServiceState& state,
                                   const ServiceParams& params,
                                   std::string strategy) {
  DischargeSchedule schedule;
  schedule.strategy = std::move(strategy);
  std::vector<double> lane_last = state.lane_last;
  for (const QueuedVehicle& v : vehicles) {
    if (v.lane >= static_cast<int>(lane_last.size())) {
      lane_last.resize(v.lane + 1, kNever);
    }
    double tau = std::max(v.earliest,
                          lane_last[v.lane] + params.saturation_headway);
    int hops = 0;
    while (true) {
      const SignalPlan::Window w = plan.NextGreen(v.movement, tau);
      tau = std::max(tau, w.start + params.startup);
      if (tau < w.end) break;
      tau = w.end;
      if (++hops > kMaxWindowHops) {
        throw UnschedulableError("no green window long enough for vehicle " +
                                 std::to_string(v.id));
      }
    }
    lane_last[v.lane] = tau;
    schedule.times[v.id] = tau;
  }
  return schedule;
}

double WeightedGain(std::span<const QueuedVehicle> vehicles,
                    const DischargeSchedule& old_schedule,
                    const DischargeSchedule& new_schedule) {
  double gain = 0.0;
  for (const QueuedVehicle& v : vehicles) {
    gain += v.weight * (old_schedule.at(v.id) - new_schedule.at(v.id));
  }
  return gain;
}

std::vector<double> AllocateGreens(std::span<const Phase> phases,
                                   std::span<const QueuedVehicle> vehicles,
                                   const PhaseSwitchingConfig& config) {
  const double n = static_cast<double>(phases.size());
  const double available = config.cycle_length - n * config.lost_time;
  const double spare = available - n * config.min_green;
  if (spare < 0.0) {
    throw std::invalid_argument("cycle too short for the minimum greens");
  }
  std::vector<double> counts(phases.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    for (const QueuedVehicle& v : vehicles) {
      if (phases[i].Serves(v.movement)) counts[i] += 1.0;
    }
    total += counts[i];
  }
  std::vector<double> greens(phases.size());
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double share = total > 0.0 ? counts[i] / total : 1.0 / n;
    greens[i] = config.min_green + spare * share;
  }
  return greens;
}

PhaseSwitchingDecision PhaseSwitching(std::span<const QueuedVehicle> vehicles,
                                      std::span<const Phase> group,
                                      const SignalPlan& incumbent,
                                      const ServiceState& state, double now,
                                      const PhaseSwitchingConfig& config,
                                      const ServiceParams& params) {
  (void)now;
  PhaseSwitchingDecision decision;
  decision.incumbent_schedule =
      PredictDischarge(vehicles, incumbent, state, params, "incumbent");
  const std::vector<double> greens = AllocateGreens(group, vehicles, config);

  std::vector<int> perm(group.size());
  std::iota(perm.begin(), perm.end(), 0);
  bool have_best = false;
  do {
    std::vector<Phase> phases;
    std::vector<double> g;
    for (int i : perm) {
      phases.push_back(group[i]);
      g.push_back(greens[i]);
    }
    PhaseSequence seq =
        PhaseSequence::Make(std::move(phases), std::move(g), config.lost_time);
    DischargeSchedule proposed =
        PredictDischarge(vehicles, SignalPlan::FromSequence(seq, now), state,
                         params, seq.Label());
    const double gain =
        WeightedGain(vehicles, decision.incumbent_schedule, proposed);
    if (!have_best || gain > decision.gain) {
      have_best = true;
      decision.gain = gain;
      decision.sequence = std::move(seq);
      decision.proposed_schedule = std::move(proposed);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  decision.adopted = decision.gain > kGainTolerance;
  return decision;
}

void FluxParams::Validate() const {
  if (!(free_flow_speed > 0.0) || !(wave_speed > 0.0) ||
      !(jam_density > 0.0)) {
    throw std::invalid_argument("flux parameters must be positive");
  }
  if (!(free_flow_speed > wave_speed)) {
    throw std::invalid_argument("free-flow speed must exceed the wave speed");
  }
}

double NewellFlux(double density, const FluxParams& params) {
  if (!(density >= 0.0) || density > params.jam_density) {
    throw std::domain_error("density outside [0, jam density]");
  }
  if (density == 0.0) return 0.0;
  const double v = params.free_flow_speed;
  const double exponent =
      (params.wave_speed / v) * (1.0 - params.jam_density / density);
  return v * density - v * density * std::exp(exponent);
}

double MovementWeight(std::span<const WeightedDelta> queue) {
  double w = 0.0;
  for (const WeightedDelta& d : queue) w += d.vot * d.gain;
  return w;
}

double MovementPressure(const MaxWeightTerm& term) {
  return std::max(0.0, term.weight * term.queue - term.downstream);
}

double PhaseOption::Score() const {
  double score = 0.0;
  for (const MaxWeightTerm& t : terms) score += MovementPressure(t) * t.flux;
  return score;
}

int MaxWeightSelect(std::span<const PhaseOption> options, int current) {
  if (options.empty()) throw std::invalid_argument("no phases to select");
  int best = (current >= 0 && current < static_cast<int>(options.size()))
                 ? current
                 : 0;
  double best_score = options[best].Score();
  for (int i = 0; i < static_cast<int>(options.size()); ++i) {
    const double s = options[i].Score();
    if (s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

double LyapunovValue(std::span<const MaxWeightTerm> terms) {
  double value = 0.0;
  for (const MaxWeightTerm& t : terms) {
    value += std::max(0.0, t.weight) * t.queue * t.queue;
  }
  return 0.5 * value;
}

}  // namespace pmarket
