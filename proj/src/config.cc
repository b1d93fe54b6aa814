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

#include "pmarket/config.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace pmarket {
namespace {

using nlohmann::json;

const std::vector<std::string> kScenarios = {
    "benefit-surface", "auction-compare", "sensitivity", "discipline-compare",
    "misreport",       "obstruction",     "arterial"};

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void Get(const std::string& key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      Check<T>(*it);
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(Path(key) + ": " + e.what());
    }
  }

  const json* Child(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string Path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void Finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError(Path(it.key()) + ": unknown key");
      }
    }
  }

 private:
  template <typename T>
  void Check(const json& v) const {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw json::type_error::create(302, "expected a boolean", &v);
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw json::type_error::create(302, "expected a string", &v);
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw json::type_error::create(302, "expected an integer", &v);
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw json::type_error::create(302, "expected a number", &v);
    } else {
      if (!v.is_array()) throw json::type_error::create(302, "expected an array", &v);
      for (const json& e : v) {
        if (!e.is_number()) throw json::type_error::create(302, "expected numbers", &v);
      }
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void Require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void RequirePositive(const std::vector<double>& v, const std::string& name) {
  Require(!v.empty(), name + " must not be empty");
  for (double x : v) Require(x > 0.0 && std::isfinite(x), name + " must be positive");
}

std::vector<double> Range(double lo, double hi, double step) {
  std::vector<double> out;
  for (int k = 0; lo + k * step <= hi + 1e-9 * std::max(1.0, std::abs(hi)); ++k) {
    out.push_back(lo + k * step);
  }
  return out;
}

}  // namespace

int VotBins::Index(double vot_per_hour) const {
  const int i = static_cast<int>(std::floor(vot_per_hour / width));
  return std::clamp(i, 0, count - 1);
}

std::vector<std::uint64_t> ScenarioConfig::Seeds() const {
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < replications; ++k) seeds.push_back(base_seed + k);
  return seeds;
}

std::vector<std::string> ScenarioNames() { return kScenarios; }

ScenarioConfig DefaultScenario(const std::string& name) {
  ScenarioConfig c;
  c.scenario = name;
  if (name == "benefit-surface" || name == "auction-compare") {
    c.volumes = Range(400.0, 2400.0, 400.0);
  } else if (name == "sensitivity") {
    c.volumes = {1200.0};
    c.penetrations = {0.0, 0.25, 0.5, 0.75, 1.0};
    c.zone_radii = {75.0, 150.0};
  } else if (name == "discipline-compare") {
    c.volumes = Range(400.0, 2000.0, 400.0);
  } else if (name == "misreport") {
    c.volumes = {1200.0};
  } else if (name == "obstruction") {
    c.volumes = Range(100.0, 900.0, 200.0);
    c.replications = 10;
    c.obstruction.actor_vots = Range(1.0, 40.0, 1.0);
  } else if (name == "arterial") {
    c.volumes = Range(400.0, 2400.0, 400.0);
    c.replications = 10;
  } else {
    throw ConfigError("unknown scenario '" + name + "'");
  }
  return c;
}

void Validate(const ScenarioConfig& c) {
  Require(std::find(kScenarios.begin(), kScenarios.end(), c.scenario) !=
              kScenarios.end(),
          "scenario: unknown scenario '" + c.scenario + "'");
  Require(!c.volumes.empty(), "volumes must not be empty");
  for (double v : c.volumes) {
    Require(v >= 0.0 && std::isfinite(v), "volumes must be nonnegative");
  }
  Require(c.replications >= 1, "replications must be >= 1");
  Require(c.arrivals >= 1, "arrivals must be >= 1");
  Require(c.warmup >= 0.0, "warmup must be >= 0");
  Require(c.vot_mean > 0.0 && c.vot_sd >= 0.0,
          "vot.mean must be positive and vot.sd nonnegative");
  Require(c.left_share >= 0.0 && c.left_share <= 1.0,
          "left_share must lie in [0, 1]");
  Require(!c.penetrations.empty(), "penetrations must not be empty");
  for (double p : c.penetrations) {
    Require(p >= 0.0 && p <= 1.0, "penetrations must lie in [0, 1]");
  }
  RequirePositive(c.zone_radii, "zone_radii");
  for (double r : c.zone_radii) {
    Require(r <= 150.0, "zone_radii must not exceed the 150 m approach");
  }
  Require(c.mechanism == "direct-transaction" || c.mechanism == "second-price" ||
              c.mechanism == "none",
          "mechanism must be direct-transaction, second-price or none");
  Require(c.service.saturation_headway > 0.0 && c.service.startup >= 0.0 &&
              c.service.clearance >= 0.0,
          "service times must be nonnegative with a positive headway");
  Require(c.reservation.exact_limit >= 0 && c.reservation.node_limit >= 1 &&
              c.reservation.relocation_window >= 1 &&
              c.reservation.max_passes >= 0,
          "reservation limits out of range");
  Require(c.commit_horizon >= 0.0, "reservation.commit_horizon must be >= 0");
  Require(c.vot_bins.width > 0.0 && c.vot_bins.count >= 1,
          "vot_bins needs a positive width and count");
  RequirePositive(c.misreport.true_vots, "misreport.true_vots");
  RequirePositive(c.misreport.declared_vots, "misreport.declared_vots");
  Require(c.misreport.probe_interval > 0.0,
          "misreport.probe_interval must be positive");
  if (c.scenario == "obstruction") {
    RequirePositive(c.obstruction.actor_vots, "obstruction.actor_vots");
  }
  Require(c.obstruction.episode > 0.0 && c.obstruction.gap_headways >= 0.0,
          "obstruction episode and gap out of range");
  Require(c.obstruction.cadence == "end-of-cycle" ||
              c.obstruction.cadence == "end-of-phase",
          "obstruction.cadence must be end-of-cycle or end-of-phase");
  Require(c.obstruction.cycle_length >
              2.0 * (c.obstruction.min_green + c.service.clearance),
          "obstruction.cycle_length too short for two phases");
  const ArterialParams& a = c.arterial;
  Require(a.junctions >= 1, "arterial.junctions must be >= 1");
  Require(a.slot > a.yellow && a.yellow >= 0.0 && a.spacing > 0.0 &&
              a.offset_step >= 0.0,
          "arterial timing out of range");
  Require(std::abs(std::round(a.cycle / a.slot) * a.slot - a.cycle) < 1e-9 &&
              std::round(a.cycle / a.slot) == 4.0,
          "arterial.cycle must be four slots");
  Require(a.baseline_control == "fixed-time" ||
              a.baseline_control == "unit-weight",
          "arterial.baseline_control must be fixed-time or unit-weight");
}

nlohmann::json ToJson(const ScenarioConfig& c) {
  json j;
  j["scenario"] = c.scenario;
  j["volumes"] = c.volumes;
  j["seed"] = c.base_seed;
  j["replications"] = c.replications;
  j["arrivals"] = c.arrivals;
  j["warmup"] = c.warmup;
  j["vot"] = {{"mean", c.vot_mean}, {"sd", c.vot_sd}};
  j["left_share"] = c.left_share;
  j["penetrations"] = c.penetrations;
  j["zone_radii"] = c.zone_radii;
  j["mechanism"] = c.mechanism;
  j["service"] = {{"saturation_headway", c.service.saturation_headway},
                  {"startup", c.service.startup},
                  {"clearance", c.service.clearance}};
  j["reservation"] = {{"commit_horizon", c.commit_horizon},
                      {"exact_limit", c.reservation.exact_limit},
                      {"node_limit", c.reservation.node_limit},
                      {"relocation_window", c.reservation.relocation_window},
                      {"max_passes", c.reservation.max_passes}};
  j["vot_bins"] = {{"width", c.vot_bins.width}, {"count", c.vot_bins.count}};
  j["misreport"] = {{"true_vots", c.misreport.true_vots},
                    {"declared_vots", c.misreport.declared_vots},
                    {"probe_interval", c.misreport.probe_interval}};
  j["obstruction"] = {{"actor_vots", c.obstruction.actor_vots},
                      {"episode", c.obstruction.episode},
                      {"gap_headways", c.obstruction.gap_headways},
                      {"cadence", c.obstruction.cadence},
                      {"cycle_length", c.obstruction.cycle_length},
                      {"min_green", c.obstruction.min_green}};
  j["arterial"] = {{"junctions", c.arterial.junctions},
                   {"cycle", c.arterial.cycle},
                   {"offset_step", c.arterial.offset_step},
                   {"slot", c.arterial.slot},
                   {"yellow", c.arterial.yellow},
                   {"spacing", c.arterial.spacing},
                   {"baseline_control", c.arterial.baseline_control}};
  j["output"] = {{"dir", c.output_dir}, {"records", c.write_records}};
  return j;
}

ScenarioConfig FromJson(const nlohmann::json& j, const ScenarioConfig& base) {
  ScenarioConfig c = base;
  Reader r(j, "");
  r.Get("scenario", c.scenario);
  r.Get("volumes", c.volumes);
  r.Get("seed", c.base_seed);
  r.Get("replications", c.replications);
  r.Get("arrivals", c.arrivals);
  r.Get("warmup", c.warmup);
  if (const json* v = r.Child("vot")) {
    Reader s(*v, "vot");
    s.Get("mean", c.vot_mean);
    s.Get("sd", c.vot_sd);
    s.Finish();
  }
  r.Get("left_share", c.left_share);
  r.Get("penetrations", c.penetrations);
  r.Get("zone_radii", c.zone_radii);
  r.Get("mechanism", c.mechanism);
  if (const json* v = r.Child("service")) {
    Reader s(*v, "service");
    s.Get("saturation_headway", c.service.saturation_headway);
    s.Get("startup", c.service.startup);
    s.Get("clearance", c.service.clearance);
    s.Finish();
  }
  if (const json* v = r.Child("reservation")) {
    Reader s(*v, "reservation");
    s.Get("commit_horizon", c.commit_horizon);
    s.Get("exact_limit", c.reservation.exact_limit);
    s.Get("node_limit", c.reservation.node_limit);
    s.Get("relocation_window", c.reservation.relocation_window);
    s.Get("max_passes", c.reservation.max_passes);
    s.Finish();
  }
  if (const json* v = r.Child("vot_bins")) {
    Reader s(*v, "vot_bins");
    s.Get("width", c.vot_bins.width);
    s.Get("count", c.vot_bins.count);
    s.Finish();
  }
  if (const json* v = r.Child("misreport")) {
    Reader s(*v, "misreport");
    s.Get("true_vots", c.misreport.true_vots);
    s.Get("declared_vots", c.misreport.declared_vots);
    s.Get("probe_interval", c.misreport.probe_interval);
    s.Finish();
  }
  if (const json* v = r.Child("obstruction")) {
    Reader s(*v, "obstruction");
    s.Get("actor_vots", c.obstruction.actor_vots);
    s.Get("episode", c.obstruction.episode);
    s.Get("gap_headways", c.obstruction.gap_headways);
    s.Get("cadence", c.obstruction.cadence);
    s.Get("cycle_length", c.obstruction.cycle_length);
    s.Get("min_green", c.obstruction.min_green);
    s.Finish();
  }
  if (const json* v = r.Child("arterial")) {
    Reader s(*v, "arterial");
    s.Get("junctions", c.arterial.junctions);
    s.Get("cycle", c.arterial.cycle);
    s.Get("offset_step", c.arterial.offset_step);
    s.Get("slot", c.arterial.slot);
    s.Get("yellow", c.arterial.yellow);
    s.Get("spacing", c.arterial.spacing);
    s.Get("baseline_control", c.arterial.baseline_control);
    s.Finish();
  }
  if (const json* v = r.Child("output")) {
    Reader s(*v, "output");
    s.Get("dir", c.output_dir);
    s.Get("records", c.write_records);
    s.Finish();
  }
  r.Finish();
  Validate(c);
  return c;
}

ScenarioConfig FromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("expected an object");
  auto it = j.find("scenario");
  if (it == j.end() || !it->is_string()) {
    throw ConfigError("scenario: required string");
  }
  return FromJson(j, DefaultScenario(it->get<std::string>()));
}

std::vector<double> ParseVolumes(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
      throw ConfigError("volumes: cannot parse '" + s + "'");
    }
    return v;
  };
  const std::size_t dots = text.find("..");
  if (dots != std::string::npos) {
    const std::size_t colon = text.find(':', dots);
    if (colon == std::string::npos) {
      throw ConfigError("volumes: expected a..b:step");
    }
    const double lo = number(text.substr(0, dots));
    const double hi = number(text.substr(dots + 2, colon - dots - 2));
    const double step = number(text.substr(colon + 1));
    if (!(step > 0.0) || hi < lo) {
      throw ConfigError("volumes: need a positive step and a <= b");
    }
    return Range(lo, hi, step);
  }
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number(item));
  if (out.empty()) throw ConfigError("volumes: empty list");
  return out;
}

}  // namespace pmarket
