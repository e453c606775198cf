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

#include "disagg/costmodel.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "disagg/errors.h"

namespace disagg {
namespace {

// Time for the server to hand `elems` elements to each of `recipients`
// parties: the shared egress or one recipient's downlink, whichever binds.
double Broadcast(double elems, double recipients, const CostProfile& p) {
  const double bytes = elems * p.field_bytes;
  return std::max(recipients * bytes / p.server_egress, bytes / p.client_down);
}

double Upload(double elems, const CostProfile& p) {
  return elems * p.field_bytes / p.client_up;
}

void CheckShape(std::uint64_t n, std::uint64_t m, std::uint64_t a, std::uint64_t rho) {
  if (n == 0 || m == 0 || a == 0 || rho == 0) {
    throw ParameterError("cost: N, M, A and rho must be positive");
  }
}

// Public keys go both ways between the N clients and the A Aggregators.
double KeySetup(double n, double a, const CostProfile& p) {
  return std::max(2.0 * n * a * p.field_bytes / p.server_egress,
                  n * p.field_bytes / p.client_down);
}

bool Cheaper(const Choice& x, const Choice& best) {
  const double tx = x.cost.total();
  const double tb = best.cost.total();
  if (tx != tb) return tx < tb;
  return x.committee.a < best.committee.a;
}

CostProfile WithLinks(CostProfile p, const CostProfile& links) {
  p.client_up = links.client_up;
  p.client_down = links.client_down;
  return p;
}

}  // namespace

std::string_view ProtocolName(Protocol p) {
  return p == Protocol::kDisAgg ? "disagg" : "opa";
}

CostProfile CostProfile::Preset(std::string_view name) {
  CostProfile p;
  if (name == "5g") {
    p.name = "5g";
  } else if (name == "4g") {
    p.name = "4g";
    p.client_up = 200e3;
    p.client_down = 2e6;
  } else if (name == "3g") {
    p.name = "3g";
    p.client_up = 50e3;
    p.client_down = 500e3;
  } else {
    throw InvalidValueError("cost: unknown profile preset '" + std::string(name) + "'");
  }
  return p;
}

CostProfile CostProfile::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("cost profile must be a JSON object");
  try {
    CostProfile p = Preset(j.value("name", std::string("5g")));
    p.server_egress = j.value("server_egress", p.server_egress);
    p.client_up = j.value("client_up", p.client_up);
    p.client_down = j.value("client_down", p.client_down);
    p.k_comp = j.value("k_comp", p.k_comp);
    p.lambda = j.value("lambda", p.lambda);
    p.field_bytes = j.value("field_bytes", p.field_bytes);
    p.op_rate = j.value("op_rate", p.op_rate);
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("cost profile: ") + e.what());
  }
}

nlohmann::json CostProfile::ToJson() const {
  return {{"name", name},          {"server_egress", server_egress},
          {"client_up", client_up}, {"client_down", client_down},
          {"k_comp", k_comp},      {"lambda", lambda},
          {"field_bytes", field_bytes}, {"op_rate", op_rate}};
}

void CostProfile::validate() const {
  for (double v : {server_egress, client_up, client_down, field_bytes, op_rate}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidValueError("cost profile: rates and field_bytes must be positive");
    }
  }
  if (!(k_comp >= 0.0) || !std::isfinite(k_comp)) {
    throw InvalidValueError("cost profile: k_comp must be non-negative");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidValueError("cost profile: lambda must be non-negative");
  }
}

ThreatConfig ThreatForK(std::uint64_t n, double k, double kappa) {
  ThreatConfig c;
  c.n = n;
  c.gamma = k / 3.0;
  c.delta = 2.0 * k / 3.0;
  c.kappa_c = kappa;
  c.kappa_s = kappa;
  return c;
}

CostBreakdown disagg_cost(std::uint64_t n, std::uint64_t m, std::uint64_t a,
                          std::uint64_t rho, const CostProfile& profile) {
  CheckShape(n, m, a, rho);
  profile.validate();
  const double N = static_cast<double>(n);
  const double A = static_cast<double>(a);
  const double L = static_cast<double>(m) / static_cast<double>(rho);
  const double op = profile.op_rate;
  const double share_work = L * A * A + A * A;

  CostBreakdown c;
  c.client.comp = share_work / op;
  c.client.comm = Upload(L * A, profile) + Broadcast(A, N, profile);
  c.committee.comp = N * L / op;
  c.committee.comm = Broadcast(N * L + N, A, profile) + Upload(L, profile);
  c.server.comp = profile.k_comp * share_work / op;
  c.setup = KeySetup(N, A, profile);
  return c;
}

CostBreakdown opa_cost(std::uint64_t n, std::uint64_t m, std::uint64_t a,
                       std::uint64_t rho, const CostProfile& profile) {
  CheckShape(n, m, a, rho);
  profile.validate();
  const double N = static_cast<double>(n);
  const double M = static_cast<double>(m);
  const double A = static_cast<double>(a);
  const double lam = profile.lambda;
  const double ls = lam / static_cast<double>(rho);
  const double op = profile.op_rate;

  CostBreakdown c;
  c.client.comp = (lam * M + ls * A * A + A + A * A) / op;
  c.client.comm = Upload(M + ls * A, profile) + Broadcast(A, N, profile);
  c.committee.comp = lam * N / op;
  c.committee.comm = Broadcast(N + N * ls, A, profile) + Upload(ls, profile);
  c.server.comp = profile.k_comp * (lam * M + N * M + ls * A * A + A * A) / op;
  c.setup = KeySetup(N, A, profile) + lam * M / op;
  return c;
}

CostBreakdown protocol_cost(Protocol p, std::uint64_t n, std::uint64_t m,
                            std::uint64_t a, std::uint64_t rho,
                            const CostProfile& profile) {
  return p == Protocol::kDisAgg ? disagg_cost(n, m, a, rho, profile)
                                : opa_cost(n, m, a, rho, profile);
}

double disagg_download_bytes(std::uint64_t n, std::uint64_t m, std::uint64_t rho,
                             const CostProfile& profile) {
  if (rho == 0) throw ParameterError("cost: rho must be positive");
  return static_cast<double>(n) / static_cast<double>(rho) * static_cast<double>(m) *
         profile.field_bytes;
}

double opa_committee_download_bytes(std::uint64_t n, std::uint64_t rho,
                                    const CostProfile& profile) {
  if (rho == 0) throw ParameterError("cost: rho must be positive");
  return static_cast<double>(n) / static_cast<double>(rho) * profile.lambda *
         profile.field_bytes;
}

std::vector<std::uint64_t> DefaultRhoGrid(std::uint64_t n) {
  std::vector<std::uint64_t> grid;
  const std::uint64_t cap = n > 2 ? n - 2 : 0;
  for (std::uint64_t decade = 10; grid.empty() || grid.back() < cap; decade *= 10) {
    const std::uint64_t steps[] = {decade * 5 / 2, decade * 5, decade * 10};
    bool stop = false;
    for (std::uint64_t r : steps) {
      if (r > cap) {
        stop = true;
        break;
      }
      grid.push_back(r);
    }
    if (stop || decade > (std::numeric_limits<std::uint64_t>::max() / 100)) break;
  }
  return grid;
}

std::vector<std::uint64_t> CoarseRhoGrid() { return {25, 50, 100, 250, 500, 1000}; }

std::vector<Choice> evaluate_grid(std::uint64_t m, CommitteeSolver& solver,
                                  const CostProfile& profile, Protocol protocol,
                                  const std::vector<std::uint64_t>& grid) {
  const std::uint64_t n = solver.config().n;
  std::vector<Choice> out;
  for (std::uint64_t rho : grid) {
    if (rho == 0 || rho + 2 > n) continue;
    CommitteeSolution sol;
    try {
      sol = solver.solve(rho);
    } catch (const NoSolutionError&) {
      continue;
    }
    Choice c;
    c.protocol = protocol;
    c.committee = sol.params;
    c.cost = protocol_cost(protocol, n, m, sol.params.a, rho, profile);
    out.push_back(c);
  }
  return out;
}

Choice optimal_A(std::uint64_t m, CommitteeSolver& solver, const CostProfile& profile,
                 Protocol protocol, const std::vector<std::uint64_t>& grid) {
  const std::vector<Choice> all = evaluate_grid(m, solver, profile, protocol, grid);
  if (all.empty()) {
    throw NoSolutionError("cost: no feasible committee on the rho grid", "rho grid");
  }
  Choice best = all.front();
  for (const Choice& c : all) {
    if (Cheaper(c, best)) best = c;
  }
  return best;
}

Choice optimal_A(std::uint64_t n, std::uint64_t m, const ThreatConfig& cfg,
                 const CostProfile& profile, Protocol protocol,
                 const std::vector<std::uint64_t>& grid) {
  ThreatConfig c = cfg;
  c.n = n;
  CommitteeSolver solver(c);
  return optimal_A(m, solver, profile, protocol, grid.empty() ? DefaultRhoGrid(n) : grid);
}

std::vector<SpeedupCell> speedup_grid(const std::vector<std::uint64_t>& m_values,
                                      const std::vector<std::uint64_t>& n_values,
                                      const ThreatConfig& cfg,
                                      const CostProfile& profile) {
  if (m_values.empty() || n_values.empty()) {
    throw ParameterError("cost: speedup grid needs at least one M and one N");
  }
  std::vector<SpeedupCell> cells;
  for (std::uint64_t n : n_values) {
    ThreatConfig c = cfg;
    c.n = n;
    CommitteeSolver solver(c);
    const std::vector<std::uint64_t> grid = DefaultRhoGrid(n);
    for (std::uint64_t m : m_values) {
      SpeedupCell cell;
      cell.m = m;
      cell.n = n;
      cell.disagg = optimal_A(m, solver, profile, Protocol::kDisAgg, grid);
      cell.opa = optimal_A(m, solver, profile, Protocol::kOpa, grid);
      cell.speedup = cell.opa.cost.total() / cell.disagg.cost.total();
      cells.push_back(cell);
    }
  }
  return cells;
}

double tradeoff_objective(double s_target, double speedup, std::uint64_t rho) {
  const double penalty =
      s_target > 0.0 ? std::max(0.0, (s_target - speedup) / s_target) : 0.0;
  return 10.0 * penalty + 1.0 / static_cast<double>(rho);
}

TradeoffResult tradeoff_optimize(std::uint64_t m, std::uint64_t n, const ThreatConfig& cfg,
                                 const CostProfile& profile, double s_target,
                                 const std::vector<std::uint64_t>& candidates) {
  if (!(s_target >= 0.0) || !std::isfinite(s_target)) {
    throw InvalidValueError("tradeoff: target speedup must be non-negative");
  }
  ThreatConfig c = cfg;
  c.n = n;
  CommitteeSolver solver(c);
  const Choice opa = optimal_A(m, solver, profile, Protocol::kOpa, DefaultRhoGrid(n));
  const double t_opa = opa.cost.total();

  TradeoffResult best;
  best.objective = std::numeric_limits<double>::infinity();
  auto consider = [&](std::uint64_t rho, const CommitteeParams& params) {
    const CostBreakdown d = disagg_cost(n, m, params.a, rho, profile);
    const double s = t_opa / d.total();
    const double obj = tradeoff_objective(s_target, s, rho);
    if (obj < best.objective) {
      best.rho = rho;
      best.committee = params;
      best.speedup = s;
      best.objective = obj;
      best.disagg = d;
    }
  };

  if (candidates.empty()) {
    const std::uint64_t limit = n > 2 ? n - 2 : 0;
    const std::vector<std::uint64_t> table = solver.min_committee_table(limit);
    for (std::uint64_t rho = 1; rho <= limit; ++rho) {
      const std::uint64_t a = table[rho];
      if (a == 0) break;  // infeasible from here on
      CommitteeParams p;
      p.a = a;
      p.t_c = solver.corruption_threshold(a);
      p.t_r = p.t_c + rho;
      p.rho = rho;
      consider(rho, p);
    }
  } else {
    for (std::uint64_t rho : candidates) {
      if (rho == 0 || rho + 2 > n) continue;
      try {
        consider(rho, solver.solve(rho).params);
      } catch (const NoSolutionError&) {
      }
    }
  }
  if (best.rho == 0) {
    throw NoSolutionError("tradeoff: no feasible packing factor", "rho range");
  }
  best.download_bytes = disagg_download_bytes(n, m, best.rho, profile);
  best.target_met = best.speedup >= s_target;
  best.opa_baseline = opa;
  return best;
}

void ClassMix::validate() const {
  for (double f : {frac_5g, frac_4g, frac_3g}) {
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidValueError("mix: fractions must lie in [0, 1]");
  }
  if (std::fabs(frac_5g + frac_4g + frac_3g - 1.0) > 1e-9) {
    throw InvalidValueError("mix: fractions must sum to 1");
  }
}

StragglerResult straggler_scenario(std::uint64_t m, const ClassMix& mix, char option,
                                   const ThreatConfig& cfg, const CostProfile& base) {
  mix.validate();
  if (option != 'a' && option != 'b') {
    throw InvalidValueError("straggler: option must be 'a' or 'b'");
  }
  StragglerResult r;
  r.threat = cfg;
  bool has3 = mix.frac_3g > 0.0;
  if (option == 'b' && has3) {
    r.threat.delta = cfg.delta + mix.frac_3g;
    has3 = false;
    try {
      r.threat.validate();
    } catch (const ParameterError& e) {
      throw NoSolutionError(std::string("straggler: raised delta infeasible: ") + e.what(),
                            "dropout fraction");
    }
  }
  if (has3) {
    r.profile = WithLinks(base, CostProfile::Preset("3g"));
  } else if (mix.frac_4g > 0.0) {
    r.profile = WithLinks(base, CostProfile::Preset("4g"));
  } else {
    r.profile = base;
  }
  CommitteeSolver solver(r.threat);
  const std::vector<std::uint64_t> grid = DefaultRhoGrid(r.threat.n);
  r.disagg = optimal_A(m, solver, r.profile, Protocol::kDisAgg, grid);
  r.opa = optimal_A(m, solver, r.profile, Protocol::kOpa, grid);
  r.speedup = r.opa.cost.total() / r.disagg.cost.total();
  return r;
}

}  // namespace disagg
