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

#include <string>

#include "doctest.h"

namespace pmarket {
namespace {

using nlohmann::json;

std::string ErrorOf(const json& j) {
  try {
    FromJson(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST_CASE("every built-in scenario is valid and round-trips") {
  CHECK(ScenarioNames().size() == 7);
  for (const std::string& name : ScenarioNames()) {
    const ScenarioConfig c = DefaultScenario(name);
    CHECK_NOTHROW(Validate(c));
    const json once = ToJson(c);
    const json twice = ToJson(FromJson(once));
    CHECK(once == twice);
    CHECK(json::parse(once.dump()) == once);
  }
}

TEST_CASE("round trip of edited values") {
  ScenarioConfig c = DefaultScenario("sensitivity");
  c.vot_mean = 17.3;
  c.reservation.node_limit = 12345;
  c.obstruction.cadence = "end-of-phase";
  c.output_dir = "x/y";
  c.write_records = false;
  const ScenarioConfig back = FromJson(ToJson(c));
  CHECK(back.vot_mean == 17.3);
  CHECK(back.reservation.node_limit == 12345);
  CHECK(back.obstruction.cadence == "end-of-phase");
  CHECK(back.output_dir == "x/y");
  CHECK_FALSE(back.write_records);
  CHECK(ToJson(back) == ToJson(c));
}

TEST_CASE("missing keys keep scenario defaults") {
  const ScenarioConfig c = FromJson(json{{"scenario", "obstruction"}});
  CHECK(c.obstruction.actor_vots.size() == 40);
  CHECK(c.replications == 10);
  CHECK(c.volumes == std::vector<double>{100, 300, 500, 700, 900});
}

TEST_CASE("unknown keys are rejected with their path") {
  CHECK(ErrorOf({{"scenario", "arterial"}, {"colour", 1}}).find("colour") !=
        std::string::npos);
  const std::string e =
      ErrorOf({{"scenario", "arterial"}, {"service", {{"headway", 2.0}}}});
  CHECK(e.find("service.headway") != std::string::npos);
}

TEST_CASE("type and range errors") {
  CHECK(!ErrorOf({{"scenario", "misreport"}, {"replications", "many"}}).empty());
  CHECK(!ErrorOf({{"scenario", "misreport"}, {"replications", 2.5}}).empty());
  CHECK(!ErrorOf({{"scenario", "misreport"}, {"penetrations", {1.5}}}).empty());
  CHECK(!ErrorOf({{"scenario", "misreport"}, {"mechanism", "barter"}}).empty());
  CHECK(!ErrorOf({{"scenario", "misreport"}, {"volumes", json::array()}}).empty());
  CHECK(!ErrorOf({{"scenario", "nowhere"}}).empty());
  CHECK(!ErrorOf(json{{"volumes", {1}}}).empty());
  CHECK(!ErrorOf(json::array()).empty());
}

TEST_CASE("volume ranges") {
  CHECK(ParseVolumes("200..1800:200").size() == 9);
  CHECK(ParseVolumes("200..1800:200").back() == 1800.0);
  CHECK(ParseVolumes("100,300") == std::vector<double>{100, 300});
  CHECK(ParseVolumes("400") == std::vector<double>{400});
  CHECK_THROWS_AS(ParseVolumes("a..b:c"), ConfigError);
  CHECK_THROWS_AS(ParseVolumes("200..100:50"), ConfigError);
  CHECK_THROWS_AS(ParseVolumes("200..400"), ConfigError);
  CHECK_THROWS_AS(ParseVolumes("1,,2"), ConfigError);
}

TEST_CASE("vot bins") {
  const VotBins b;
  CHECK(b.Index(0.0) == 0);
  CHECK(b.Index(3.99) == 0);
  CHECK(b.Index(4.0) == 1);
  CHECK(b.Index(39.9) == 9);
  CHECK(b.Index(250.0) == 9);
  CHECK(b.Lower(3) == 12.0);
}

TEST_CASE("seeds count up from the base") {
  ScenarioConfig c = DefaultScenario("arterial");
  c.base_seed = 7;
  c.replications = 3;
  CHECK(c.Seeds() == std::vector<std::uint64_t>{7, 8, 9});
}

}  // namespace
}  // namespace pmarket
