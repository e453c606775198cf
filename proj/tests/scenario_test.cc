// Copyright 2026 The DisAgg Authors
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
#include "disagg/scenario.h"

#include <gtest/gtest.h>

#include "disagg/errors.h"

namespace disagg {
namespace {

using nlohmann::json;

json Minimal() {
  return {{"N", 40}, {"M", 12}, {"gamma", 0.1}, {"delta", 0.1}, {"rho", 2}, {"seed", 3}};
}

TEST(ScenarioTest, ParsesDefaults) {
  const Scenario s = ParseScenario(Minimal());
  EXPECT_EQ(s.config.n, 40u);
  EXPECT_EQ(s.config.m, 12u);
  EXPECT_EQ(s.config.kappa_c, 40.0);
  EXPECT_EQ(s.config.channel, "test");
  EXPECT_FALSE(s.config.committee.has_value());
  EXPECT_EQ(s.updates(1, 12).size(), 12u);
}

TEST(ScenarioTest, SeedIsMandatory) {
  json j = Minimal();
  j.erase("seed");
  EXPECT_THROW(ParseScenario(j), FormatError);
}

TEST(ScenarioTest, UnknownKeysRejected) {
  json j = Minimal();
  j["gama"] = 0.1;
  EXPECT_THROW(ParseScenario(j), FormatError);
  j = Minimal();
  j["faultplan"] = {{"dropout", json::array()}};
  EXPECT_THROW(ParseScenario(j), FormatError);
}

TEST(ScenarioTest, WrongTypesAndValues) {
  json j = Minimal();
  j["N"] = "forty";
  EXPECT_THROW(ParseScenario(j), FormatError);
  j = Minimal();
  j["M"] = 0;
  EXPECT_THROW(ParseScenario(j), FormatError);
  j = Minimal();
  j["schema_version"] = 2;
  EXPECT_THROW(ParseScenario(j), FormatError);
  j = Minimal();
  j["update_source"] = {{"kind", "prg"}, {"lo", 1.0}, {"hi", 0.0}};
  EXPECT_THROW(ParseScenario(j), FormatError);
  j["update_source"] = {{"kind", "gradient"}};
  EXPECT_THROW(ParseScenario(j), FormatError);
}

TEST(ScenarioTest, FaultPlanFields) {
  json j = Minimal();
  j["population"] = 45;
  j["faultplan"] = {{"dropouts", {{{"party", 3}, {"phase", "upload"}},
                                  {{"party", 7}, {"phase", "round0"}}}},
                    {"random_dropouts", {{"clients", 1}, {"aggregators", 2}}},
                    {"corrupted", {4, 9}},
                    {"random_corruptions", {{"aggregators", 1}}},
                    {"link_classes", {{"5", "3g"}, {"6", "4g"}}},
                    {"allow_excess", true}};
  const Scenario s = ParseScenario(j);
  ASSERT_EQ(s.faults.dropouts.size(), 2u);
  EXPECT_EQ(s.faults.dropouts[1].phase, Phase::kRound0);
  EXPECT_EQ(s.faults.random_client_dropouts, 1u);
  EXPECT_EQ(s.faults.random_aggregator_dropouts, 2u);
  EXPECT_EQ(s.faults.corrupted, (std::set<std::uint64_t>{4, 9}));
  EXPECT_EQ(s.faults.random_corrupt_aggregators, 1u);
  EXPECT_EQ(s.faults.link_classes.at(5), LinkClass::k3g);
  EXPECT_TRUE(s.faults.allow_excess);
  j["faultplan"] = {{"link_classes", {{"x", "3g"}}}};
  EXPECT_THROW(ParseScenario(j), FormatError);
  j["faultplan"] = {{"dropouts", {{{"party", 3}, {"phase", "never"}}}}};
  EXPECT_THROW(ParseScenario(j), ParameterError);
}

TEST(ScenarioTest, UpdateSources) {
  json j = Minimal();
  j["update_source"] = {{"kind", "constant"}, {"value", 0.25}};
  EXPECT_EQ(ParseScenario(j).updates(2, 3), std::vector<double>(3, 0.25));
  j["update_source"] = {{"kind", "vectors"},
                        {"values", {{"1", std::vector<double>(12, 1.0)}}},
                        {"default", -0.5}};
  const Scenario s = ParseScenario(j);
  EXPECT_EQ(s.updates(1, 12), std::vector<double>(12, 1.0));
  EXPECT_EQ(s.updates(2, 12), std::vector<double>(12, -0.5));
  j["update_source"]["values"] = {{"1", {1.0, 2.0}}};
  EXPECT_THROW(ParseScenario(j), FormatError);
}

TEST(ScenarioTest, CommitteeAndTimeouts) {
  json j = Minimal();
  j["committee"] = {{"A", 12}, {"t_c", 5}, {"t_r", 8}};
  j["timeouts"] = {{"round1", 5.0}};
  const Scenario s = ParseScenario(j);
  ASSERT_TRUE(s.config.committee.has_value());
  EXPECT_EQ(s.config.committee->rho, 3u);
  EXPECT_EQ(s.config.round1_timeout, 5.0);
  EXPECT_EQ(s.config.round0_timeout, 30.0);
}

TEST(ScenarioTest, JsonRoundTrip) {
  json j = Minimal();
  j["beacon_seed"] = 77;
  j["channel"] = "sodium";
  j["faultplan"] = {{"random_dropouts", {{"clients", 2}}}, {"corrupted", {5}}};
  const Scenario s = ParseScenario(j);
  const json once = ScenarioToJson(s);
  const json twice = ScenarioToJson(ParseScenario(once));
  EXPECT_EQ(once, twice);
  EXPECT_EQ(once.at("schema_version"), kScenarioSchemaVersion);
}

TEST(ScenarioTest, ResultAndAuditJson) {
  Scenario s = ParseScenario(Minimal());
  Simulation sim(s.config, s.faults, s.updates);
  const RunResult& r = sim.run();
  const json rj = RunResultToJson(r);
  EXPECT_EQ(rj.at("sum").size(), 12u);
  EXPECT_TRUE(rj.at("matches_oracle").get<bool>());
  const json aj = AuditToJson(transcript_audit(sim));
  EXPECT_TRUE(aj.at("clean").get<bool>());
  EXPECT_EQ(aj.at("schema_version"), kScenarioSchemaVersion);
}

}  // namespace
}  // namespace disagg
