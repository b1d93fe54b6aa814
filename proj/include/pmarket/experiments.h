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

#ifndef PMARKET_EXPERIMENTS_H_
#define PMARKET_EXPERIMENTS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pmarket/config.h"
#include "pmarket/isolated_sim.h"
#include "pmarket/topology.h"
#include "pmarket/types.h"

// Scenario runners. Every scenario expands into cells, runs each cell once
// per seed, and reports per-vehicle records plus per-cell aggregates.

namespace pmarket {

// One vehicle in one run. Money is in currency, VOT in currency/h, times
// in seconds.
struct MetricsRecord {
  std::uint64_t seed = 0;
  VehicleId id = 0;
  double arrival = 0.0;
  double vot_true = 0.0;
  double vot_declared = 0.0;
  double travel_time = 0.0;
  double delay = 0.0;
  double time_saved = 0.0;
  double payment = 0.0;  // positive when paying
  double benefit = 0.0;
  double loss = 0.0;
};

// Builds a record and derives benefit and loss from it.
MetricsRecord MakeRecord(std::uint64_t seed, VehicleId id, double arrival,
                         double vot_true, double vot_declared,
                         double travel_time, double delay, double time_saved,
                         double payment);

using CellKey = std::vector<std::pair<std::string, std::string>>;

std::string FormatNumber(double x);

struct Cell {
  CellKey key;
  std::vector<MetricsRecord> records;
  // Scenario-specific per-cell results, merged into the aggregate document.
  nlohmann::json extra = nlohmann::json::object();
};

struct Summary {
  std::int64_t vehicles = 0;
  double mean_benefit = 0.0;
  double mean_loss = 0.0;
  double total_transfers = 0.0;  // sum of positive payments
};

// Settlement checks collected over every run of a scenario.
struct SettlementChecks {
  std::int64_t settlements = 0;
  double max_budget_imbalance = 0.0;  // cents
  double min_operator_revenue = 0.0;  // cents, second-price runs
};

struct ExperimentResult {
  ScenarioConfig config;
  std::vector<Cell> cells;
  SettlementChecks checks;
};

struct RunOptions {
  int parallel = 1;
};

// Runs `fn(i)` for i in [0, n) on up to `threads` threads.
void ParallelFor(int n, int threads, const std::function<void(int)>& fn);

ExperimentResult RunScenario(const ScenarioConfig& config,
                             const RunOptions& options = {});

// Per-cell aggregate document: totals, per-replication means and VOT-bin
// means.
nlohmann::json Aggregate(const Cell& cell, const VotBins& bins);

Summary Summarize(const ExperimentResult& result);

// Comma-separated per-vehicle records with a header row.
std::string RecordsCsv(const ExperimentResult& result);
nlohmann::json AggregatesJson(const ExperimentResult& result);

// Writes records.csv (unless disabled), aggregates.json and config.json
// (without the output directory) into `dir`, creating it if needed.
// Throws std::runtime_error on I/O failure.
void WriteOutputs(const ExperimentResult& result, const std::string& dir);

// Paired isolated-junction runs on one seed.
struct IsolatedSample {
  Topology topology;
  std::vector<Vehicle> stream;
  RunResult fcfs;
  std::optional<RunResult> min_delay;
  std::optional<RunResult> market;
};

IsolatedSample RunIsolatedSample(const ScenarioConfig& config, double volume,
                                 double penetration, double zone_radius,
                                 std::uint64_t seed, bool with_min_delay,
                                 bool with_market);

enum class PaymentRule { kDirect, kSecondPrice, kNone };

// Records of the measured vehicles of `run`, with time saved against the
// FCFS run of the same sample.
std::vector<MetricsRecord> IsolatedRecords(const IsolatedSample& sample,
                                           const RunResult& run,
                                           PaymentRule payments,
                                           std::uint64_t seed,
                                           double warmup);

}  // namespace pmarket

#endif  // PMARKET_EXPERIMENTS_H_
