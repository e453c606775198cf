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

#ifndef DISAGG_SCENARIO_H_
#define DISAGG_SCENARIO_H_

#include <string>

#include "disagg/protocol.h"
#include "json.hpp"

namespace disagg {

inline constexpr int kScenarioSchemaVersion = 1;

struct Scenario {
  ProtocolConfig config;
  FaultPlan faults;
  UpdateSource updates;
  nlohmann::json update_spec;  // as given, for manifests
};

// Field names follow the scenario file: N, M, gamma, delta, kappa_c,
// kappa_s, rho, seed (required), faultplan, update_source and a few
// optional knobs. Unknown keys are rejected. Throws FormatError.
Scenario ParseScenario(const nlohmann::json& j);
Scenario LoadScenario(const std::string& path);

nlohmann::json ScenarioToJson(const Scenario& s);
nlohmann::json FaultPlanToJson(const FaultPlan& f);
nlohmann::json RunResultToJson(const RunResult& r);
nlohmann::json AuditToJson(const AuditReport& a);

// Read a JSON file; FormatError on I/O or parse failure.
nlohmann::json ReadJsonFile(const std::string& path);

}  // namespace disagg

#endif  // DISAGG_SCENARIO_H_
