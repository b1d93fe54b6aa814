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

// Command-line runner for the built-in scenarios.
//
//   pmarket [run] --scenario arterial --volumes 200..1800:200 --out out/
//   pmarket --list
//
// Exit codes: 0 ok, 1 configuration error, 2 runtime error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pmarket/config.h"
#include "pmarket/experiments.h"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;
constexpr int kFullScaleArrivals = 54000;

std::string Canonical(const std::string& name) {
  if (name == "isolated-benefit") return "benefit-surface";
  return name;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Priority-market traffic experiments"};
  std::string command;
  std::string scenario;
  std::string config_path;
  std::string volumes;
  std::string out_dir;
  std::uint64_t seed = 0;
  int replications = 0;
  int parallel = 1;
  bool full_scale = false;
  bool list = false;
  bool quiet = false;
  app.add_option("command", command, "optional 'run'")
      ->check(CLI::IsMember({"run"}));
  app.add_option("--scenario", scenario, "built-in scenario name");
  app.add_option("--config", config_path, "JSON scenario configuration");
  app.add_option("--seed", seed, "base seed");
  app.add_option("--replications", replications, "seeds per cell");
  app.add_option("--volumes", volumes, "a..b:step or a comma list");
  app.add_option("--out", out_dir,
                 "output directory (default $PMARKET_OUT_DIR or ./out)");
  app.add_option("--parallel", parallel, "worker threads")
      ->check(CLI::PositiveNumber);
  app.add_flag("--full-scale", full_scale, "54000 measured arrivals per run");
  app.add_flag("--list", list, "list the built-in scenarios");
  app.add_flag("--quiet", quiet, "suppress the summary line");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (list) {
    for (const std::string& name : pmarket::ScenarioNames()) {
      std::cout << name << "\n";
    }
    return kOk;
  }

  pmarket::ScenarioConfig config;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw pmarket::ConfigError("cannot read " + config_path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw pmarket::ConfigError(config_path + ": " + e.what());
      }
      if (!scenario.empty() && !j.contains("scenario")) {
        j["scenario"] = Canonical(scenario);
      }
      config = pmarket::FromJson(j);
      if (!scenario.empty() && config.scenario != Canonical(scenario)) {
        throw pmarket::ConfigError("--scenario disagrees with " + config_path);
      }
    } else if (!scenario.empty()) {
      config = pmarket::DefaultScenario(Canonical(scenario));
    } else {
      throw pmarket::ConfigError("--scenario or --config is required");
    }
    if (app.count("--seed")) config.base_seed = seed;
    if (app.count("--replications")) config.replications = replications;
    if (!volumes.empty()) config.volumes = pmarket::ParseVolumes(volumes);
    if (full_scale) config.arrivals = kFullScaleArrivals;
    if (!out_dir.empty()) {
      config.output_dir = out_dir;
    } else if (config.output_dir.empty()) {
      const char* env = std::getenv("PMARKET_OUT_DIR");
      config.output_dir = env && *env ? env : "out";
    }
    pmarket::Validate(config);
  } catch (const pmarket::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    pmarket::RunOptions options;
    options.parallel = parallel;
    const pmarket::ExperimentResult result =
        pmarket::RunScenario(config, options);
    pmarket::WriteOutputs(result, config.output_dir);
    const pmarket::Summary s = pmarket::Summarize(result);
    if (!quiet) {
      std::printf(
          "%s: %zu cells, %lld vehicles, mean benefit %.4f, mean loss %.4f, "
          "total transfers %.2f -> %s\n",
          config.scenario.c_str(), result.cells.size(),
          static_cast<long long>(s.vehicles), s.mean_benefit, s.mean_loss,
          s.total_transfers, config.output_dir.c_str());
    }
  } catch (const pmarket::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}
