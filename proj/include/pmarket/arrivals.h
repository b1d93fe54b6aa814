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

#ifndef PMARKET_ARRIVALS_H_
#define PMARKET_ARRIVALS_H_

#include <cstdint>
#include <random>
#include <vector>

#include "pmarket/topology.h"
#include "pmarket/types.h"

namespace pmarket {

using Rng = std::mt19937_64;

// Log-normal value of time, moment-matched to a mean and standard
// deviation in currency per hour.
class VotSampler {
 public:
  VotSampler(double mean = 14.1, double sd = 9.0);

  double mean() const { return mean_; }
  double sd() const { return sd_; }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }

  // Currency per hour, strictly positive.
  double Sample(Rng& rng) const;

 private:
  double mean_;
  double sd_;
  double mu_;
  double sigma_;
};

struct ArrivalProcess {
  double rate = 0.0;  // veh/h
  std::uint64_t seed = 1;
};

// Poisson arrival times in [0, horizon).
std::vector<double> SpawnArrivals(const ArrivalProcess& process,
                                  double horizon);

struct StreamConfig {
  double volume = 1200.0;  // veh/h over the whole junction
  double left_share = 1.0 / 3.0;
  double penetration = 1.0;
  VotSampler vot;
  std::uint64_t seed = 1;
  double warmup = 600.0;  // s
  // Arrivals generated after the warm-up.
  int measured_arrivals = 5000;
};

// Vehicles in arrival order with ids 0, 1, ... Demand is split evenly over
// the approaches; left turners use the left lane, through vehicles pick a
// through lane uniformly. Identical configs give identical streams.
std::vector<Vehicle> GenerateStream(const Topology& topology,
                                    const StreamConfig& config);

struct ProbeConfig {
  double interval = 120.0;      // s between probes
  double vot_true = 14.1;       // currency/h
  double vot_declared = 14.1;   // currency/h
  std::uint64_t seed = 1;
};

// Adds a probe vehicle every `interval` seconds, starting after the
// warm-up, and renumbers ids in arrival order. Returns the probe ids
// through `probe_ids`. Probe placement depends on the seed only, never on
// the declared value.
std::vector<Vehicle> InjectProbes(const Topology& topology,
                                  std::vector<Vehicle> stream,
                                  const ProbeConfig& probes, double warmup,
                                  std::vector<VehicleId>* probe_ids);

}  // namespace pmarket

#endif  // PMARKET_ARRIVALS_H_
