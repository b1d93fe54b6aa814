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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

int Run(const std::string& args) {
  const std::string cmd =
      std::string(PMARKET_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pmarket_cli_" + name);
  fs::remove_all(p);
  return p;
}

TEST_CASE("list and help") {
  CHECK(Run("--list") == 0);
  CHECK(Run("run --list") == 0);
  CHECK(Run("--help") == 0);
}

TEST_CASE("configuration errors exit with 1") {
  CHECK(Run("") == 1);
  CHECK(Run("--scenario nowhere") == 1);
  CHECK(Run("--scenario arterial --volumes 5..1:1") == 1);
  CHECK(Run("--config /nonexistent.json") == 1);
  const fs::path bad = Scratch("bad.json");
  std::ofstream(bad) << R"({"scenario": "arterial", "typo": true})";
  CHECK(Run("--config " + bad.string()) == 1);
  CHECK(Run("--unknown-flag") == 1);
}

TEST_CASE("runtime errors exit with 2") {
  CHECK(Run("--scenario obstruction --replications 1 --volumes 100 "
            "--out /proc/pmarket/x") == 2);
}

TEST_CASE("same seed gives byte-identical files") {
  const fs::path a = Scratch("a");
  const fs::path b = Scratch("b");
  const fs::path cfg = Scratch("small.json");
  std::ofstream(cfg) << R"({"scenario": "benefit-surface", "arrivals": 120,
                            "replications": 2, "volumes": [900]})";
  CHECK(Run("run --config " + cfg.string() + " --seed 7 --out " + a.string()) == 0);
  CHECK(Run("run --config " + cfg.string() + " --seed 7 --out " + b.string()) == 0);
  for (const char* f : {"records.csv", "aggregates.json", "config.json"}) {
    CHECK(!Slurp(a / f).empty());
    CHECK(Slurp(a / f) == Slurp(b / f));
  }
  const auto j = nlohmann::json::parse(Slurp(a / "config.json"));
  CHECK(j.at("seed") == 7);
}

TEST_CASE("volume ranges expand into cells") {
  const fs::path out = Scratch("range");
  CHECK(Run("run --scenario arterial --volumes 200..1800:200 --replications 1 "
            "--out " + out.string()) == 0);
  const auto j = nlohmann::json::parse(Slurp(out / "aggregates.json"));
  CHECK(j.at("cells").size() == 9 * 3);
}

TEST_CASE("environment supplies the default output directory") {
  const fs::path out = Scratch("env");
  const std::string cmd = "PMARKET_OUT_DIR=" + out.string() + " " +
                          PMARKET_CLI +
                          " --scenario obstruction --replications 1 "
                          "--volumes 100 > /dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(out / "aggregates.json"));
}

}  // namespace
