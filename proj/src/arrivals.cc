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

#include "pmarket/arrivals.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>

namespace pmarket {
namespace {

// Picks approach, movement and lane for one vehicle.
void AssignRoute(const Topology& topology, double left_share, Rng& rng,
                 Vehicle& v) {
  std::uniform_int_distribution<int> approach(0, topology.num_approaches - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  v.approach = approach(rng);
  const bool left = unit(rng) < left_share;
  int movement = -1;
  for (int m = 0; m < topology.num_movements(); ++m) {
    const MovementInfo& info = topology.movements[m];
    if (info.approach != v.approach) continue;
    const bool is_left = info.turn == Turn::kLeft;
    if (is_left == left || movement < 0) movement = m;
  }
  v.movement = movement;
  const auto& lanes = topology.movements[movement].lanes;
  std::uniform_int_distribution<int> pick(0, static_cast<int>(lanes.size()) - 1);
  v.lane = lanes[pick(rng)];
}

}  // namespace

VotSampler::VotSampler(double mean, double sd) : mean_(mean), sd_(sd) {
  if (!(mean > 0.0) || !(sd >= 0.0)) {
    throw std::invalid_argument("VOT mean must be positive, sd nonnegative");
  }
  const double m2 = mean * mean;
  mu_ = std::log(m2 / std::sqrt(sd * sd + m2));
  sigma_ = std::sqrt(std::log(1.0 + sd * sd / m2));
}

double VotSampler::Sample(Rng& rng) const {
  if (sigma_ == 0.0) return mean_;
  std::lognormal_distribution<double> dist(mu_, sigma_);
  return dist(rng);
}

std::vector<double> SpawnArrivals(const ArrivalProcess& process,
                                  double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (process.rate < 0.0) throw std::invalid_argument("rate must be >= 0");
  std::vector<double> times;
  if (process.rate == 0.0) return times;
  Rng rng(process.seed);
  std::exponential_distribution<double> gap(process.rate / 3600.0);
  for (double t = gap(rng); t < horizon; t += gap(rng)) times.push_back(t);
  return times;
}

std::vector<Vehicle> GenerateStream(const Topology& topology,
                                    const StreamConfig& config) {
  if (config.volume < 0.0) throw std::invalid_argument("volume must be >= 0");
  if (config.penetration < 0.0 || config.penetration > 1.0) {
    throw std::invalid_argument("penetration must lie in [0, 1]");
  }
  std::vector<Vehicle> stream;
  if (config.volume == 0.0) return stream;
  Rng rng(config.seed);
  std::exponential_distribution<double> gap(config.volume / 3600.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double t = 0.0;
  int measured = 0;
  while (measured < config.measured_arrivals) {
    t += gap(rng);
    Vehicle v;
    v.id = static_cast<VehicleId>(stream.size());
    v.arrival_time = t;
    AssignRoute(topology, config.left_share, rng, v);
    v.vot_true = VotToCentsPerSecond(config.vot.Sample(rng));
    v.vot_declared = v.vot_true;
    v.connected = unit(rng) < config.penetration;
    stream.push_back(v);
    if (t >= config.warmup) ++measured;
  }
  return stream;
}

std::vector<Vehicle> InjectProbes(const Topology& topology,
                                  std::vector<Vehicle> stream,
                                  const ProbeConfig& probes, double warmup,
                                  std::vector<VehicleId>* probe_ids) {
  if (!(probes.interval > 0.0)) {
    throw std::invalid_argument("probe interval must be positive");
  }
  const double end = stream.empty() ? 0.0 : stream.back().arrival_time;
  Rng rng(probes.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Vehicle> added;
  for (double t = warmup + probes.interval; t < end; t += probes.interval) {
    Vehicle v;
    v.arrival_time = t;
    AssignRoute(topology, 1.0 / 3.0, rng, v);
    v.vot_true = VotToCentsPerSecond(probes.vot_true);
    v.vot_declared = VotToCentsPerSecond(probes.vot_declared);
    v.connected = true;
    v.id = -1;
    added.push_back(v);
  }
  std::vector<Vehicle> merged;
  merged.reserve(stream.size() + added.size());
  std::merge(stream.begin(), stream.end(), added.begin(), added.end(),
             std::back_inserter(merged),
             [](const Vehicle& a, const Vehicle& b) {
               return a.arrival_time < b.arrival_time;
             });
  if (probe_ids) probe_ids->clear();
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (merged[i].id == -1 && probe_ids) {
      probe_ids->push_back(static_cast<VehicleId>(i));
    }
    merged[i].id = static_cast<VehicleId>(i);
  }
  return merged;
}

}  // namespace pmarket
