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

#ifndef PMARKET_CONFIG_H_
#define PMARKET_CONFIG_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pmarket/control.h"
#include "pmarket/reservation.h"

// Scenario configuration and its JSON form. Parsing is strict: unknown
// keys, wrong types and out-of-range values are rejected with the path of
// the offending entry.

namespace pmarket {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Value-of-time bins in currency/h; the last bin is open-ended.
struct VotBins {
  double width = 4.0;
  int count = 10;

  int Index(double vot_per_hour) const;
  double Lower(int index) const { return index * width; }
};

struct MisreportGrid {
  std::vector<double> true_vots = {5.0, 15.0, 25.0, 35.0};      // currency/h
  std::vector<double> declared_vots = {5.0, 15.0, 25.0, 35.0};  // currency/h
  double probe_interval = 120.0;
};

struct ObstructionParams {
  std::vector<double> actor_vots;  // currency/h
  double episode = 1800.0;
  double gap_headways = 2.0;
  std::string cadence = "end-of-cycle";  // or "end-of-phase"
  double cycle_length = 40.0;
  double min_green = 5.0;
};

struct ArterialParams {
  int junctions = 4;
  double cycle = 40.0;
  double offset_step = 20.0;
  double slot = 10.0;
  double yellow = 1.8;
  double spacing = 1000.0 / 3.0;
  // Control used for the coordination-only scenario: "fixed-time" or
  // "unit-weight".
  std::string baseline_control = "fixed-time";
};

struct ScenarioConfig {
  std::string scenario;
  // veh/h at the junction; veh/h/lane for obstruction; veh/h entering each
  // junction for the arterial.
  std::vector<double> volumes;
  std::uint64_t base_seed = 1;
  int replications = 20;
  int arrivals = 5000;  // measured arrivals per run
  double warmup = 600.0;
  double vot_mean = 14.1;  // currency/h
  double vot_sd = 9.0;
  double left_share = 1.0 / 3.0;
  std::vector<double> penetrations = {1.0};
  std::vector<double> zone_radii = {150.0};
  // "direct-transaction", "second-price" or "none".
  std::string mechanism = "direct-transaction";
  ServiceParams service;
  ReservationConfig reservation;
  double commit_horizon = 2.0;
  VotBins vot_bins;
  MisreportGrid misreport;
  ObstructionParams obstruction;
  ArterialParams arterial;
  std::string output_dir;
  bool write_records = true;

  std::vector<std::uint64_t> Seeds() const;
};

std::vector<std::string> ScenarioNames();

// The built-in configuration of a scenario. Throws ConfigError for an
// unknown name.
ScenarioConfig DefaultScenario(const std::string& name);

// Throws ConfigError describing the first violated constraint.
void Validate(const ScenarioConfig& config);

nlohmann::json ToJson(const ScenarioConfig& config);

// Missing keys keep the defaults of `base`.
ScenarioConfig FromJson(const nlohmann::json& j, const ScenarioConfig& base);
// Missing keys keep the defaults of the named scenario.
ScenarioConfig FromJson(const nlohmann::json& j);

// "a..b:step" (inclusive) or a comma-separated list.
std::vector<double> ParseVolumes(const std::string& text);

}  // namespace pmarket

#endif  // PMARKET_CONFIG_H_
