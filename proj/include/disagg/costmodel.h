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

#ifndef DISAGG_COSTMODEL_H_
#define DISAGG_COSTMODEL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "disagg/committee.h"
#include "json.hpp"

namespace disagg {

enum class Protocol { kDisAgg, kOpa };
std::string_view ProtocolName(Protocol p);

// Bandwidths in bytes/s, op_rate in field operations/s.
struct CostProfile {
  std::string name = "5g";
  double server_egress = 25e9;
  double client_up = 2e6;
  double client_down = 20e6;
  double k_comp = 0.66;
  double lambda = 2048.0;
  double field_bytes = 16.0;
  double op_rate = kDefaultOpRate;

  static constexpr double kDefaultOpRate = 1.6e7;

  // "5g", "4g" or "3g". Throws InvalidValueError for anything else.
  static CostProfile Preset(std::string_view name);
  // Starts from the preset named by "name" (default 5g) and overrides any
  // field present.
  static CostProfile FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;

  void validate() const;
};

// gamma = k/3, delta = 2k/3.
ThreatConfig ThreatForK(std::uint64_t n, double k, double kappa = 40.0);

struct RoleCost {
  double comp = 0.0;
  double comm = 0.0;
  double total() const { return comp + comm; }
};

struct CostBreakdown {
  RoleCost client;
  RoleCost committee;
  RoleCost server;
  double setup = 0.0;

  double total_without_setup() const {
    return client.total() + committee.total() + server.total();
  }
  double total() const { return setup + total_without_setup(); }
};

CostBreakdown disagg_cost(std::uint64_t n, std::uint64_t m, std::uint64_t a,
                          std::uint64_t rho, const CostProfile& profile);
CostBreakdown opa_cost(std::uint64_t n, std::uint64_t m, std::uint64_t a,
                       std::uint64_t rho, const CostProfile& profile);
CostBreakdown protocol_cost(Protocol p, std::uint64_t n, std::uint64_t m,
                            std::uint64_t a, std::uint64_t rho,
                            const CostProfile& profile);

// Bytes each Aggregator downloads per iteration: (N/rho) M field elements.
double disagg_download_bytes(std::uint64_t n, std::uint64_t m, std::uint64_t rho,
                             const CostProfile& profile);
// OPA committee member download: (N/rho) lambda field elements.
double opa_committee_download_bytes(std::uint64_t n, std::uint64_t rho,
                                    const CostProfile& profile);

// 25, 50, 100, 250, 500, 1000, then 1-2.5-5 steps, capped at N - 2.
std::vector<std::uint64_t> DefaultRhoGrid(std::uint64_t n);
// The six-point sweep used for the 100k comparison.
std::vector<std::uint64_t> CoarseRhoGrid();

struct Choice {
  Protocol protocol = Protocol::kDisAgg;
  CommitteeParams committee;
  CostBreakdown cost;
};

// Evaluates every grid rho with a feasible committee and returns the
// cheapest (total incl. setup); ties go to the smaller A. Throws
// NoSolutionError when no grid point is feasible.
Choice optimal_A(std::uint64_t m, CommitteeSolver& solver, const CostProfile& profile,
                 Protocol protocol, const std::vector<std::uint64_t>& grid);
Choice optimal_A(std::uint64_t n, std::uint64_t m, const ThreatConfig& cfg,
                 const CostProfile& profile, Protocol protocol,
                 const std::vector<std::uint64_t>& grid = {});
// Every feasible grid point in grid order.
std::vector<Choice> evaluate_grid(std::uint64_t m, CommitteeSolver& solver,
                                  const CostProfile& profile, Protocol protocol,
                                  const std::vector<std::uint64_t>& grid);

struct SpeedupCell {
  std::uint64_t m = 0;
  std::uint64_t n = 0;
  Choice disagg;
  Choice opa;
  double speedup = 0.0;  // OPA total / DisAgg total
};

// cfg supplies gamma, delta and the kappas; its N is replaced per cell.
std::vector<SpeedupCell> speedup_grid(const std::vector<std::uint64_t>& m_values,
                                      const std::vector<std::uint64_t>& n_values,
                                      const ThreatConfig& cfg,
                                      const CostProfile& profile);

struct TradeoffResult {
  std::uint64_t rho = 0;
  CommitteeParams committee;
  double download_bytes = 0.0;
  double speedup = 0.0;
  double objective = 0.0;
  bool target_met = false;
  Choice opa_baseline;
  CostBreakdown disagg;
};

// 10 max(0, (S_target - S) / S_target) + 1/rho
double tradeoff_objective(double s_target, double speedup, std::uint64_t rho);

// Minimizes the objective over rho. With no candidates every integer rho in
// [1, N - 2] is tried; otherwise only the listed values. The OPA baseline
// is OPA's optimum over the default grid.
TradeoffResult tradeoff_optimize(std::uint64_t m, std::uint64_t n, const ThreatConfig& cfg,
                                 const CostProfile& profile, double s_target,
                                 const std::vector<std::uint64_t>& candidates = {});

struct ClassMix {
  double frac_5g = 1.0;
  double frac_4g = 0.0;
  double frac_3g = 0.0;
  void validate() const;
};

struct StragglerResult {
  ThreatConfig threat;
  CostProfile profile;
  Choice disagg;
  Choice opa;
  double speedup = 0.0;
};

// Option 'a' waits for the slowest class present; option 'b' counts the 3G
// share as extra dropouts and keys link speeds to the slowest remaining
// class. Throws NoSolutionError if the raised delta is infeasible.
StragglerResult straggler_scenario(std::uint64_t m, const ClassMix& mix, char option,
                                   const ThreatConfig& cfg, const CostProfile& base);

}  // namespace disagg

#endif  // DISAGG_COSTMODEL_H_
