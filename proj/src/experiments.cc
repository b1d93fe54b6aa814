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

#include "pmarket/experiments.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "pmarket/arrivals.h"
#include "pmarket/arterial.h"
#include "pmarket/obstruction.h"

namespace pmarket {
namespace {

using nlohmann::json;

constexpr double kCentsPerCurrency = 100.0;

// Part of one cell produced by one job.
struct Part {
  int cell = 0;
  std::vector<MetricsRecord> records;
  json seed_extra;  // null when the scenario has none
};

struct JobOutput {
  std::vector<Part> parts;
  SettlementChecks checks;
};

using Job = std::function<JobOutput()>;

void Absorb(SettlementChecks& into, const SettlementChecks& from) {
  into.settlements += from.settlements;
  into.max_budget_imbalance =
      std::max(into.max_budget_imbalance, from.max_budget_imbalance);
  into.min_operator_revenue =
      std::min(into.min_operator_revenue, from.min_operator_revenue);
}

SettlementChecks ChecksOf(const RunStats& s) {
  SettlementChecks c;
  c.settlements = s.adoptions;
  c.max_budget_imbalance = s.max_budget_imbalance;
  c.min_operator_revenue = s.min_operator_revenue;
  return c;
}

json Nullable(double sum, std::int64_t n) {
  return n > 0 ? json(sum / n) : json(nullptr);
}

std::vector<Vehicle> MakeStream(const ScenarioConfig& config,
                                const Topology& topology, double volume,
                                double penetration, std::uint64_t seed) {
  StreamConfig sc;
  sc.volume = volume;
  sc.left_share = config.left_share;
  sc.penetration = penetration;
  sc.vot = VotSampler(config.vot_mean, config.vot_sd);
  sc.seed = seed;
  sc.warmup = config.warmup;
  sc.measured_arrivals = config.arrivals;
  return GenerateStream(topology, sc);
}

IsolatedConfig MakeIsolatedConfig(const ScenarioConfig& config,
                                  Discipline discipline) {
  IsolatedConfig ic;
  ic.discipline = discipline;
  ic.service = config.service;
  ic.reservation = config.reservation;
  ic.commit_horizon = config.commit_horizon;
  return ic;
}

// Isolated-junction cells: volume x penetration x zone, optionally split
// further by `variants`.
struct IsolatedAxes {
  double volume;
  double penetration;
  double zone;
};

std::vector<IsolatedAxes> IsolatedGrid(const ScenarioConfig& c) {
  std::vector<IsolatedAxes> grid;
  for (double v : c.volumes) {
    for (double p : c.penetrations) {
      for (double z : c.zone_radii) grid.push_back({v, p, z});
    }
  }
  return grid;
}

CellKey IsolatedKey(const IsolatedAxes& a) {
  return {{"volume", FormatNumber(a.volume)},
          {"penetration", FormatNumber(a.penetration)},
          {"zone_radius", FormatNumber(a.zone)}};
}

struct Variant {
  std::string name;
  Discipline discipline;
  PaymentRule payments;
};

Variant MechanismVariant(const std::string& mechanism) {
  if (mechanism == "second-price") {
    return {mechanism, Discipline::kMarket, PaymentRule::kSecondPrice};
  }
  if (mechanism == "none") {
    return {mechanism, Discipline::kMinDelay, PaymentRule::kNone};
  }
  return {mechanism, Discipline::kMarket, PaymentRule::kDirect};
}

// Cells for every grid point and variant, jobs for every grid point and
// seed; one sample feeds all variants of its grid point.
void PlanIsolated(const ScenarioConfig& c, const std::string& axis,
                  const std::vector<Variant>& variants,
                  std::vector<Cell>& cells, std::vector<Job>& jobs) {
  const std::vector<IsolatedAxes> grid = IsolatedGrid(c);
  for (const IsolatedAxes& a : grid) {
    for (const Variant& v : variants) {
      Cell cell;
      cell.key = IsolatedKey(a);
      if (!axis.empty()) cell.key.emplace_back(axis, v.name);
      cells.push_back(std::move(cell));
    }
  }
  const int nv = static_cast<int>(variants.size());
  for (int g = 0; g < static_cast<int>(grid.size()); ++g) {
    for (std::uint64_t seed : c.Seeds()) {
      jobs.push_back([&c, a = grid[g], g, nv, seed, variants]() {
        bool min_delay = false;
        bool market = false;
        for (const Variant& v : variants) {
          min_delay |= v.discipline == Discipline::kMinDelay;
          market |= v.discipline == Discipline::kMarket;
        }
        const IsolatedSample s = RunIsolatedSample(
            c, a.volume, a.penetration, a.zone, seed, min_delay, market);
        JobOutput out;
        for (int k = 0; k < nv; ++k) {
          const Variant& v = variants[k];
          const RunResult& run = v.discipline == Discipline::kFcfs ? s.fcfs
                                 : v.discipline == Discipline::kMinDelay
                                     ? *s.min_delay
                                     : *s.market;
          Part part;
          part.cell = g * nv + k;
          part.records = IsolatedRecords(s, run, v.payments, seed, c.warmup);
          out.parts.push_back(std::move(part));
        }
        if (s.market) Absorb(out.checks, ChecksOf(s.market->stats));
        return out;
      });
    }
  }
}

void PlanMisreport(const ScenarioConfig& c, std::vector<Cell>& cells,
                   std::vector<Job>& jobs) {
  const MisreportGrid& m = c.misreport;
  const int nt = static_cast<int>(m.true_vots.size());
  const int nd = static_cast<int>(m.declared_vots.size());
  const std::vector<IsolatedAxes> grid = IsolatedGrid(c);
  for (const IsolatedAxes& a : grid) {
    for (double t : m.true_vots) {
      for (double d : m.declared_vots) {
        Cell cell;
        cell.key = IsolatedKey(a);
        cell.key.emplace_back("vot_true", FormatNumber(t));
        cell.key.emplace_back("vot_declared", FormatNumber(d));
        cells.push_back(std::move(cell));
      }
    }
  }
  for (int g = 0; g < static_cast<int>(grid.size()); ++g) {
    for (std::uint64_t seed : c.Seeds()) {
      for (int ti = 0; ti < nt; ++ti) {
        jobs.push_back([&c, a = grid[g], g, ti, nt, nd, seed]() {
          const MisreportGrid& m = c.misreport;
          const Topology topology = FourLegIntersection(a.zone);
          const std::vector<Vehicle> stream =
              MakeStream(c, topology, a.volume, a.penetration, seed);
          auto with_probes = [&](double declared,
                                 std::vector<VehicleId>* ids) {
            ProbeConfig probes;
            probes.interval = m.probe_interval;
            probes.vot_true = m.true_vots[ti];
            probes.vot_declared = declared;
            probes.seed = seed;
            return InjectProbes(topology, stream, probes, c.warmup, ids);
          };
          IsolatedConfig ic = MakeIsolatedConfig(c, Discipline::kFcfs);

          std::vector<VehicleId> probe_ids;
          IsolatedSample s;
          s.topology = topology;
          s.stream = with_probes(m.true_vots[ti], &probe_ids);
          s.fcfs = RunIsolated(s.topology, s.stream, ic);
          ic.discipline = Discipline::kMarket;
          const RunResult honest = RunIsolated(s.topology, s.stream, ic);
          const std::vector<MetricsRecord> honest_records = IsolatedRecords(
              s, honest, PaymentRule::kDirect, seed, c.warmup);

          JobOutput out;
          Absorb(out.checks, ChecksOf(honest.stats));
          for (int di = 0; di < nd; ++di) {
            const double declared = m.declared_vots[di];
            IsolatedSample f;
            f.topology = s.topology;
            f.stream = with_probes(declared, nullptr);
            f.fcfs = s.fcfs;
            const RunResult run =
                declared == m.true_vots[ti]
                    ? honest
                    : RunIsolated(f.topology, f.stream, ic);
            if (declared != m.true_vots[ti]) Absorb(out.checks, ChecksOf(run.stats));
            const std::vector<MetricsRecord> all = IsolatedRecords(
                f, run, PaymentRule::kDirect, seed, c.warmup);
            Part part;
            part.cell = (g * nt + ti) * nd + di;
            double delta = 0.0;
            double delta_no_payments = 0.0;
            for (VehicleId id : probe_ids) {
              auto find = [id](const std::vector<MetricsRecord>& rs) {
                auto it = std::lower_bound(
                    rs.begin(), rs.end(), id,
                    [](const MetricsRecord& r, VehicleId v) { return r.id < v; });
                if (it == rs.end() || it->id != id) {
                  throw std::logic_error("probe missing from records");
                }
                return *it;
              };
              const MetricsRecord fr = find(all);
              const MetricsRecord hr = find(honest_records);
              delta += fr.benefit - hr.benefit;
              delta_no_payments +=
                  (fr.time_saved - hr.time_saved) * (fr.vot_true / 3600.0);
              part.records.push_back(fr);
            }
            const double n = static_cast<double>(probe_ids.size());
            part.seed_extra = {{"seed", seed},
                               {"probes", probe_ids.size()},
                               {"delta_benefit", n > 0 ? delta / n : 0.0},
                               {"delta_benefit_no_payments",
                                n > 0 ? delta_no_payments / n : 0.0}};
            out.parts.push_back(std::move(part));
          }
          return out;
        });
      }
    }
  }
}

ObstructionConfig MakeObstructionConfig(const ScenarioConfig& c, double volume,
                                        double actor_vot, std::uint64_t seed) {
  ObstructionConfig o;
  o.volume_per_lane = volume;
  o.actor_vot = actor_vot;
  o.vot = VotSampler(c.vot_mean, c.vot_sd);
  o.seed = seed;
  o.warmup = c.warmup;
  o.episode = c.obstruction.episode;
  o.control_zone_radius = c.zone_radii.front();
  o.gap_headways = c.obstruction.gap_headways;
  o.cadence = c.obstruction.cadence == "end-of-phase" ? Cadence::kEndOfPhase
                                                      : Cadence::kEndOfCycle;
  o.signal.cycle_length = c.obstruction.cycle_length;
  o.signal.min_green = c.obstruction.min_green;
  o.signal.lost_time = c.service.clearance;
  o.service = c.service;
  return o;
}

void PlanObstruction(const ScenarioConfig& c, std::vector<Cell>& cells,
                     std::vector<Job>& jobs) {
  const std::vector<double>& vots = c.obstruction.actor_vots;
  for (double v : c.volumes) {
    for (double a : vots) {
      Cell cell;
      cell.key = {{"volume", FormatNumber(v)}, {"actor_vot", FormatNumber(a)}};
      cells.push_back(std::move(cell));
    }
  }
  const int na = static_cast<int>(vots.size());
  for (int vi = 0; vi < static_cast<int>(c.volumes.size()); ++vi) {
    for (int ai = 0; ai < na; ++ai) {
      for (std::uint64_t seed : c.Seeds()) {
        jobs.push_back([&c, vi, ai, na, seed]() {
          const double actor_vot = c.obstruction.actor_vots[ai];
          const ObstructionResult r = RunObstruction(
              MakeObstructionConfig(c, c.volumes[vi], actor_vot, seed));
          const double episode = c.obstruction.episode;
          JobOutput out;
          out.checks.settlements = r.games;
          out.checks.max_budget_imbalance = r.max_budget_imbalance;
          Part part;
          part.cell = vi * na + ai;
          part.records.push_back(MakeRecord(
              seed, 0, c.warmup, actor_vot, actor_vot, episode, episode,
              -episode, -r.income / kCentsPerCurrency));
          part.seed_extra = {
              {"seed", seed},
              {"benefit_per_minute", r.benefit_per_minute / kCentsPerCurrency},
              {"games", r.games},
              {"actor_paid", r.actor_paid},
              {"actor_received", r.actor_received},
              {"blocked_lane_throughput", r.blocked_lane_throughput},
              {"neighbor_lane_throughput", r.neighbor_lane_throughput}};
          out.parts.push_back(std::move(part));
          return out;
        });
      }
    }
  }
}

struct ArterialVariant {
  std::string name;
  bool coordinated;
  ArterialControl control;
};

std::vector<ArterialVariant> ArterialVariants(const ScenarioConfig& c) {
  const ArterialControl baseline = c.arterial.baseline_control == "unit-weight"
                                       ? ArterialControl::kUnitWeight
                                       : ArterialControl::kFixedTime;
  return {{"coor-pay", true, ArterialControl::kMarket},
          {"iso-pay", false, ArterialControl::kMarket},
          {"coor-tv", true, baseline}};
}

void PlanArterial(const ScenarioConfig& c, std::vector<Cell>& cells,
                  std::vector<Job>& jobs) {
  const std::vector<ArterialVariant> variants = ArterialVariants(c);
  const int nv = static_cast<int>(variants.size());
  for (double v : c.volumes) {
    for (const ArterialVariant& a : variants) {
      Cell cell;
      cell.key = {{"volume", FormatNumber(v)}, {"control", a.name}};
      cells.push_back(std::move(cell));
    }
  }
  for (int vi = 0; vi < static_cast<int>(c.volumes.size()); ++vi) {
    for (std::uint64_t seed : c.Seeds()) {
      jobs.push_back([&c, vi, nv, seed, variants]() {
        std::vector<ArterialResult> runs;
        for (const ArterialVariant& a : variants) {
          ArterialConfig ac;
          ac.volume = c.volumes[vi];
          ac.left_share = c.left_share;
          ac.penetration = c.penetrations.front();
          ac.vot = VotSampler(c.vot_mean, c.vot_sd);
          ac.seed = seed;
          ac.warmup = c.warmup;
          ac.measured_arrivals = c.arrivals;
          ac.coordinated = a.coordinated;
          ac.control = a.control;
          ac.num_junctions = c.arterial.junctions;
          ac.cycle = c.arterial.cycle;
          ac.offset_step = c.arterial.offset_step;
          ac.slot = c.arterial.slot;
          ac.yellow = c.arterial.yellow;
          ac.spacing = c.arterial.spacing;
          ac.service = c.service;
          runs.push_back(RunArterial(ac));
        }
        const ArterialResult& base = runs.back();
        JobOutput out;
        for (int k = 0; k < nv; ++k) {
          const ArterialResult& r = runs[k];
          out.checks.settlements += r.stats.games;
          out.checks.max_budget_imbalance = std::max(
              out.checks.max_budget_imbalance, r.stats.max_budget_imbalance);
          Part part;
          part.cell = vi * nv + k;
          for (const ArterialVehicle& v : r.vehicles) {
            if (!v.measured) continue;
            const ArterialVehicle& b = base.vehicles.at(v.id);
            const double travel = v.exit_time - v.arrival_time;
            part.records.push_back(MakeRecord(
                seed, v.id, v.arrival_time, VotToCurrencyPerHour(v.vot_true),
                VotToCurrencyPerHour(v.vot_declared), travel, v.Delay(),
                b.exit_time - v.exit_time, v.payment / kCentsPerCurrency));
          }
          part.seed_extra = {{"seed", seed},
                             {"decisions", r.stats.decisions},
                             {"adoptions", r.stats.adoptions},
                             {"games", r.stats.games}};
          out.parts.push_back(std::move(part));
        }
        return out;
      });
    }
  }
}

// Scenario-level fields of each cell computed from the per-seed extras.
void FinishExtras(const std::string& scenario, Cell& cell,
                  const std::vector<json>& per_seed) {
  if (per_seed.empty()) return;
  cell.extra["per_seed"] = per_seed;
  auto mean_of = [&](const char* field) {
    double sum = 0.0;
    for (const json& j : per_seed) sum += j.at(field).get<double>();
    return sum / per_seed.size();
  };
  if (scenario == "misreport") {
    double sum = 0.0;
    double sum_np = 0.0;
    double n = 0.0;
    for (const json& j : per_seed) {
      const double k = j.at("probes").get<double>();
      sum += j.at("delta_benefit").get<double>() * k;
      sum_np += j.at("delta_benefit_no_payments").get<double>() * k;
      n += k;
    }
    cell.extra["delta_benefit"] = n > 0 ? json(sum / n) : json(nullptr);
    cell.extra["delta_benefit_no_payments"] =
        n > 0 ? json(sum_np / n) : json(nullptr);
  } else if (scenario == "obstruction") {
    cell.extra["mean_benefit_per_minute"] = mean_of("benefit_per_minute");
  }
}

template <typename T>
void AppendNumber(std::string& out, T x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), x);
  out.append(buf, r.ptr);
}

}  // namespace

MetricsRecord MakeRecord(std::uint64_t seed, VehicleId id, double arrival,
                         double vot_true, double vot_declared,
                         double travel_time, double delay, double time_saved,
                         double payment) {
  MetricsRecord r;
  r.seed = seed;
  r.id = id;
  r.arrival = arrival;
  r.vot_true = vot_true;
  r.vot_declared = vot_declared;
  r.travel_time = travel_time;
  r.delay = delay;
  r.time_saved = time_saved;
  r.payment = payment;
  const double vot_per_second = vot_true / 3600.0;
  r.benefit = time_saved * vot_per_second - payment;
  r.loss = delay * vot_per_second + payment;
  return r;
}

std::string FormatNumber(double x) {
  std::string s;
  AppendNumber(s, x);
  return s;
}

void ParallelFor(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::clamp(threads, 1, std::max(1, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

IsolatedSample RunIsolatedSample(const ScenarioConfig& config, double volume,
                                 double penetration, double zone_radius,
                                 std::uint64_t seed, bool with_min_delay,
                                 bool with_market) {
  IsolatedSample s;
  s.topology = FourLegIntersection(zone_radius);
  s.stream = MakeStream(config, s.topology, volume, penetration, seed);
  IsolatedConfig ic = MakeIsolatedConfig(config, Discipline::kFcfs);
  s.fcfs = RunIsolated(s.topology, s.stream, ic);
  if (with_min_delay) {
    ic.discipline = Discipline::kMinDelay;
    s.min_delay = RunIsolated(s.topology, s.stream, ic);
  }
  if (with_market) {
    ic.discipline = Discipline::kMarket;
    s.market = RunIsolated(s.topology, s.stream, ic);
  }
  return s;
}

std::vector<MetricsRecord> IsolatedRecords(const IsolatedSample& sample,
                                           const RunResult& run,
                                           PaymentRule payments,
                                           std::uint64_t seed,
                                           double warmup) {
  const double traversal = sample.topology.FreeFlowTraversal();
  std::vector<MetricsRecord> records;
  for (const Vehicle& v : sample.stream) {
    if (v.arrival_time < warmup) continue;
    const VehicleOutcome& o = run.outcomes.at(v.id);
    const double base = sample.fcfs.outcomes.at(v.id).discharge_time;
    const double travel = o.discharge_time - v.arrival_time;
    const double payment = payments == PaymentRule::kDirect ? o.payment
                           : payments == PaymentRule::kSecondPrice
                               ? o.auction_payment
                               : 0.0;
    records.push_back(MakeRecord(
        seed, v.id, v.arrival_time, VotToCurrencyPerHour(v.vot_true),
        VotToCurrencyPerHour(v.vot_declared), travel, travel - traversal,
        base - o.discharge_time, payment / kCentsPerCurrency));
  }
  return records;
}

ExperimentResult RunScenario(const ScenarioConfig& config,
                             const RunOptions& options) {
  Validate(config);
  ExperimentResult result;
  result.config = config;
  const ScenarioConfig& c = result.config;
  std::vector<Job> jobs;
  const std::string& s = c.scenario;
  if (s == "benefit-surface" || s == "sensitivity") {
    PlanIsolated(c, "", {MechanismVariant(c.mechanism)}, result.cells, jobs);
  } else if (s == "auction-compare") {
    PlanIsolated(c, "mechanism",
                 {MechanismVariant("direct-transaction"),
                  MechanismVariant("second-price")},
                 result.cells, jobs);
  } else if (s == "discipline-compare") {
    PlanIsolated(c, "discipline",
                 {{"fcfs", Discipline::kFcfs, PaymentRule::kNone},
                  {"min-delay", Discipline::kMinDelay, PaymentRule::kNone},
                  {"direct-transaction", Discipline::kMarket,
                   PaymentRule::kDirect}},
                 result.cells, jobs);
  } else if (s == "misreport") {
    PlanMisreport(c, result.cells, jobs);
  } else if (s == "obstruction") {
    PlanObstruction(c, result.cells, jobs);
  } else if (s == "arterial") {
    PlanArterial(c, result.cells, jobs);
  } else {
    throw ConfigError("unknown scenario '" + s + "'");
  }

  std::vector<JobOutput> outputs(jobs.size());
  ParallelFor(static_cast<int>(jobs.size()), options.parallel,
              [&](int i) { outputs[i] = jobs[i](); });

  std::vector<std::vector<json>> extras(result.cells.size());
  for (JobOutput& o : outputs) {
    Absorb(result.checks, o.checks);
    for (Part& p : o.parts) {
      std::vector<MetricsRecord>& dst = result.cells[p.cell].records;
      dst.insert(dst.end(), p.records.begin(), p.records.end());
      if (!p.seed_extra.is_null()) extras[p.cell].push_back(p.seed_extra);
    }
  }
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    FinishExtras(s, result.cells[i], extras[i]);
  }
  return result;
}

json Aggregate(const Cell& cell, const VotBins& bins) {
  json j = json::object();
  json key = json::object();
  for (const auto& [k, v] : cell.key) key[k] = v;
  j["key"] = key;

  double benefit = 0.0, loss = 0.0, delay = 0.0, saved = 0.0, paid = 0.0;
  double transfers = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> seed_benefit, seed_loss;
  std::vector<std::int64_t> seed_n;
  std::vector<double> bin_benefit(bins.count), bin_loss(bins.count);
  std::vector<std::int64_t> bin_n(bins.count);
  for (const MetricsRecord& r : cell.records) {
    benefit += r.benefit;
    loss += r.loss;
    delay += r.delay;
    saved += r.time_saved;
    paid += r.payment;
    if (r.payment > 0.0) transfers += r.payment;
    if (seeds.empty() || seeds.back() != r.seed) {
      seeds.push_back(r.seed);
      seed_benefit.push_back(0.0);
      seed_loss.push_back(0.0);
      seed_n.push_back(0);
    }
    seed_benefit.back() += r.benefit;
    seed_loss.back() += r.loss;
    ++seed_n.back();
    const int b = bins.Index(r.vot_true);
    bin_benefit[b] += r.benefit;
    bin_loss[b] += r.loss;
    ++bin_n[b];
  }
  const std::int64_t n = static_cast<std::int64_t>(cell.records.size());
  j["vehicles"] = n;
  j["mean_benefit"] = Nullable(benefit, n);
  j["mean_loss"] = Nullable(loss, n);
  j["mean_delay"] = Nullable(delay, n);
  j["mean_time_saved"] = Nullable(saved, n);
  j["mean_payment"] = Nullable(paid, n);
  j["total_transfers"] = transfers;
  json reps = json::array();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    reps.push_back({{"seed", seeds[i]},
                    {"vehicles", seed_n[i]},
                    {"mean_benefit", seed_benefit[i] / seed_n[i]},
                    {"mean_loss", seed_loss[i] / seed_n[i]}});
  }
  j["replications"] = reps;
  json vb = json::array();
  for (int b = 0; b < bins.count; ++b) {
    vb.push_back({{"lower", bins.Lower(b)},
                  {"upper", b + 1 < bins.count ? json(bins.Lower(b + 1))
                                               : json(nullptr)},
                  {"vehicles", bin_n[b]},
                  {"mean_benefit", Nullable(bin_benefit[b], bin_n[b])},
                  {"mean_loss", Nullable(bin_loss[b], bin_n[b])}});
  }
  j["vot_bins"] = vb;
  for (auto it = cell.extra.begin(); it != cell.extra.end(); ++it) {
    j[it.key()] = it.value();
  }
  return j;
}

Summary Summarize(const ExperimentResult& result) {
  Summary s;
  double benefit = 0.0;
  double loss = 0.0;
  for (const Cell& c : result.cells) {
    for (const MetricsRecord& r : c.records) {
      ++s.vehicles;
      benefit += r.benefit;
      loss += r.loss;
      if (r.payment > 0.0) s.total_transfers += r.payment;
    }
  }
  if (s.vehicles > 0) {
    s.mean_benefit = benefit / s.vehicles;
    s.mean_loss = loss / s.vehicles;
  }
  return s;
}

std::string RecordsCsv(const ExperimentResult& result) {
  std::string out = "scenario";
  if (!result.cells.empty()) {
    for (const auto& kv : result.cells.front().key) out += "," + kv.first;
  }
  out +=
      ",seed,vehicle_id,arrival,vot_true,vot_declared,travel_time,delay,"
      "time_saved,payment,benefit,loss\n";
  for (const Cell& c : result.cells) {
    std::string prefix = result.config.scenario;
    for (const auto& kv : c.key) prefix += "," + kv.second;
    for (const MetricsRecord& r : c.records) {
      out += prefix;
      for (auto x : {r.seed, static_cast<std::uint64_t>(r.id)}) {
        out += ',';
        AppendNumber(out, x);
      }
      for (double x : {r.arrival, r.vot_true, r.vot_declared, r.travel_time,
                       r.delay, r.time_saved, r.payment, r.benefit, r.loss}) {
        out += ',';
        AppendNumber(out, x);
      }
      out += '\n';
    }
  }
  return out;
}

json AggregatesJson(const ExperimentResult& result) {
  json cells = json::array();
  for (const Cell& c : result.cells) {
    cells.push_back(Aggregate(c, result.config.vot_bins));
  }
  const Summary s = Summarize(result);
  return {{"scenario", result.config.scenario},
          {"schema_version", 1},
          {"summary",
           {{"vehicles", s.vehicles},
            {"mean_benefit", s.mean_benefit},
            {"mean_loss", s.mean_loss},
            {"total_transfers", s.total_transfers}}},
          {"settlements",
           {{"count", result.checks.settlements},
            {"max_budget_imbalance", result.checks.max_budget_imbalance /
                                         kCentsPerCurrency},
            {"min_operator_revenue", result.checks.min_operator_revenue /
                                         kCentsPerCurrency}}},
          {"cells", cells}};
}

void WriteOutputs(const ExperimentResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create " + dir + ": " + ec.message());
  }
  auto write = [&](const std::string& name, const std::string& body) {
    const fs::path path = fs::path(dir) / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << body;
    f.close();
    if (!f) throw std::runtime_error("cannot write " + path.string());
  };
  if (result.config.write_records) write("records.csv", RecordsCsv(result));
  write("aggregates.json", AggregatesJson(result).dump(2) + "\n");
  // The copy omits the output directory so that reruns elsewhere match.
  ScenarioConfig written = result.config;
  written.output_dir.clear();
  write("config.json", ToJson(written).dump(2) + "\n");
}

}  // namespace pmarket
