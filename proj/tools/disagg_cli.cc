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

// Command-line front end: committee solving, one-iteration simulation,
// cost sweeps, the download/speedup trade-off and share file tools.

#include <sodium.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "disagg/committee.h"
#include "disagg/costmodel.h"
#include "disagg/errors.h"
#include "disagg/field.h"
#include "disagg/lcc.h"
#include "disagg/protocol.h"
#include "disagg/scenario.h"
#include "disagg/wire.h"
#include "json.hpp"

#ifndef DISAGG_VERSION
#define DISAGG_VERSION "dev"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace disagg {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitFailure = 3;
constexpr int kOutputSchemaVersion = 1;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string format = "json";
};

// One per invocation, written to <out-dir>/manifest.json even on failure.
class RunManifest {
 public:
  explicit RunManifest(std::string command)
      : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

  void set_config(const json& effective) {
    const std::string text = effective.dump();
    unsigned char hash[crypto_hash_sha256_BYTES];
    crypto_hash_sha256(hash, reinterpret_cast<const unsigned char*>(text.data()), text.size());
    static const char* kHex = "0123456789abcdef";
    digest_.clear();
    for (unsigned char b : hash) {
      digest_ += kHex[b >> 4];
      digest_ += kHex[b & 15];
    }
  }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_output(const fs::path& p) { outputs_.push_back(p.string()); }
  void set_exit(int code) { exit_code_ = code; }

  void write(const fs::path& dir) const {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json j = {{"schema_version", kOutputSchemaVersion},
              {"command", command_},
              {"config_digest", digest_},
              {"seed", seed_ ? json(*seed_) : json(nullptr)},
              {"tool_version", DISAGG_VERSION},
              {"outputs", outputs_},
              {"exit_code", exit_code_},
              {"wall_clock_seconds", secs}};
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(dir / "manifest.json");
    out << j.dump(2) << "\n";
  }

 private:
  std::string command_;
  std::string digest_;
  std::optional<std::uint64_t> seed_;
  std::vector<std::string> outputs_;
  int exit_code_ = 0;
  std::chrono::steady_clock::time_point start_;
};

fs::path OutPath(const Globals& g, const std::string& name) {
  fs::path dir(g.out_dir);
  fs::create_directories(dir);
  return dir / name;
}

void WriteText(RunManifest& m, const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << text;
  m.add_output(path);
}

json RequireConfig(const Globals& g) {
  if (g.config.empty()) throw FormatError("--config is required");
  return ReadJsonFile(g.config);
}

// Shortest round-trip form; never locale dependent.
std::string Num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
T Field(const json& j, const char* key, std::optional<T> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw FormatError(std::string("missing '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad '") + key + "': " + e.what());
  }
}

CostProfile ProfileFrom(const json& j) {
  if (!j.contains("profile")) return CostProfile{};
  const json& p = j.at("profile");
  CostProfile prof = p.is_string() ? CostProfile::Preset(p.get<std::string>())
                                   : CostProfile::FromJson(p);
  prof.validate();
  return prof;
}

ThreatConfig ThreatFrom(const json& j, std::uint64_t n) {
  ThreatConfig t;
  if (j.contains("k")) {
    t = ThreatForK(n, Field<double>(j, "k"), Field<double>(j, "kappa", 40.0));
  } else {
    t.n = n;
    t.gamma = Field<double>(j, "gamma", 0.1);
    t.delta = Field<double>(j, "delta", 0.2);
    t.kappa_c = Field<double>(j, "kappa_c", 40.0);
    t.kappa_s = Field<double>(j, "kappa_s", t.kappa_c);
  }
  t.bft = Field<bool>(j, "bft", false);
  return t;
}

json SolutionJson(const CommitteeSolution& s, const ThreatConfig& t) {
  return {{"schema_version", kOutputSchemaVersion},
          {"A", s.params.a},
          {"t_c", s.params.t_c},
          {"t_r", s.params.t_r},
          {"rho", s.params.rho},
          {"tail_corrupt", s.tail_corrupt},
          {"tail_survive", s.tail_survive},
          {"bft_tail", s.bft_tail},
          {"bound_corrupt", t.p_corrupt()},
          {"bound_survive", t.p_survive()},
          {"corrupt_count", t.corrupt_count()},
          {"dropout_count", t.dropout_count()}};
}

// ---- solve ----

int CmdSolve(const Globals& g, RunManifest& man) {
  json cfg = RequireConfig(g);
  man.set_config(cfg);
  const std::uint64_t n = Field<std::uint64_t>(cfg, "N");
  ThreatConfig t = ThreatFrom(cfg, n);
  t.validate();
  const std::uint64_t rho = Field<std::uint64_t>(cfg, "rho", 1);
  try {
    const CommitteeSolution s = solve_committee(t, rho);
    const std::string text = SolutionJson(s, t).dump(2) + "\n";
    std::cout << text;
    WriteText(man, OutPath(g, "solve.json"), text);
    return kExitOk;
  } catch (const NoSolutionError& e) {
    std::cerr << "no committee: " << e.what() << " (binding constraint: " << e.binding()
              << ")\n";
    return kExitFailure;
  }
}

// ---- simulate ----

int CmdSimulate(const Globals& g, RunManifest& man) {
  json raw = RequireConfig(g);
  if (g.seed) raw["seed"] = *g.seed;
  Scenario sc = ParseScenario(raw);
  man.set_config(ScenarioToJson(sc));
  man.set_seed(sc.config.seed);

  Simulation sim(sc.config, sc.faults, sc.updates);
  int code = kExitOk;
  std::string failure;
  try {
    sim.run();
  } catch (const RoundFailureError& e) {
    failure = std::string("round failure: ") + e.what();
  } catch (const ReconstructionFailureError& e) {
    failure = std::string("reconstruction failure: ") + e.what();
  } catch (const ProtocolViolationError& e) {
    failure = std::string("protocol violation: ") + e.what();
  } catch (const NoSolutionError& e) {
    failure = std::string("no committee: ") + e.what() + " (binding constraint: " +
              e.binding() + ")";
  }
  WriteText(man, OutPath(g, "transcript.jsonl"), TranscriptToJsonl(sim.transcript()));
  if (!failure.empty()) {
    std::cerr << failure << "\n";
    json r = {{"schema_version", kOutputSchemaVersion}, {"ok", false}, {"error", failure}};
    WriteText(man, OutPath(g, "result.json"), r.dump(2) + "\n");
    return kExitFailure;
  }
  const RunResult& res = sim.result();
  const AuditReport audit = transcript_audit(sim);
  json r = RunResultToJson(res);
  r["ok"] = true;
  WriteText(man, OutPath(g, "result.json"), r.dump(2) + "\n");
  WriteText(man, OutPath(g, "audit.json"), AuditToJson(audit).dump(2) + "\n");
  if (!(res.sum == res.oracle_sum)) {
    std::cerr << "reconstructed sum differs from the plaintext oracle\n";
    code = kExitFailure;
  }
  if (!audit.clean) {
    std::cerr << "privacy audit not clean\n";
    code = kExitFailure;
  }
  std::cout << json({{"ok", code == kExitOk},
                     {"A", res.committee.a},
                     {"t_c", res.committee.t_c},
                     {"t_r", res.committee.t_r},
                     {"survivors", res.survivors.size()},
                     {"surviving_aggregators", res.surviving_aggregators.size()},
                     {"matches_oracle", res.sum == res.oracle_sum},
                     {"audit_clean", audit.clean},
                     {"messages", sim.transcript().size()}})
                   .dump()
            << "\n";
  return code;
}

// ---- cost-sweep ----

struct SweepRow {
  std::uint64_t m = 0;
  std::uint64_t n = 0;
  Choice choice;
  double speedup = 0.0;
  double k = 0.0;
  double download = 0.0;
};

const char* kCsvHeader =
    "M,N,protocol,A,rho,t_setup,t_client_comm,t_committee_comm,t_client_comp,"
    "t_committee_comp,t_server_comp,total,speedup,k,download_bytes";

std::string RowsToCsv(const std::vector<SweepRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const SweepRow& r : rows) {
    const CostBreakdown& c = r.choice.cost;
    out += std::to_string(r.m) + "," + std::to_string(r.n) + "," +
           std::string(ProtocolName(r.choice.protocol)) + "," +
           std::to_string(r.choice.committee.a) + "," + std::to_string(r.choice.committee.rho) +
           "," + Num(c.setup) + "," + Num(c.client.comm) + "," + Num(c.committee.comm) + "," +
           Num(c.client.comp) + "," + Num(c.committee.comp) + "," + Num(c.server.comp) + "," +
           Num(c.total()) + "," + Num(r.speedup) + "," + Num(r.k) + "," + Num(r.download) +
           "\n";
  }
  return out;
}

json RowsToJson(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const SweepRow& r : rows) {
    const CostBreakdown& c = r.choice.cost;
    arr.push_back({{"M", r.m},
                   {"N", r.n},
                   {"protocol", std::string(ProtocolName(r.choice.protocol))},
                   {"A", r.choice.committee.a},
                   {"rho", r.choice.committee.rho},
                   {"t_setup", c.setup},
                   {"t_client_comm", c.client.comm},
                   {"t_committee_comm", c.committee.comm},
                   {"t_client_comp", c.client.comp},
                   {"t_committee_comp", c.committee.comp},
                   {"t_server_comp", c.server.comp},
                   {"total", c.total()},
                   {"speedup", r.speedup},
                   {"k", r.k},
                   {"download_bytes", r.download}});
  }
  return {{"schema_version", kOutputSchemaVersion}, {"rows", arr}};
}

double DownloadFor(const SweepRow& r, const CostProfile& p) {
  return r.choice.protocol == Protocol::kDisAgg
             ? disagg_download_bytes(r.n, r.m, r.choice.committee.rho, p)
             : opa_committee_download_bytes(r.n, r.choice.committee.rho, p);
}

void AppendGrid(std::vector<SweepRow>& rows, const std::vector<std::uint64_t>& ms,
                const std::vector<std::uint64_t>& ns, const ThreatConfig& t, double k,
                const CostProfile& prof) {
  for (const SpeedupCell& cell : speedup_grid(ms, ns, t, prof)) {
    for (const Choice* c : {&cell.disagg, &cell.opa}) {
      SweepRow r{cell.m, cell.n, *c, cell.speedup, k, 0.0};
      r.download = DownloadFor(r, prof);
      rows.push_back(r);
    }
  }
}

std::vector<SweepRow> Figure(const std::string& name, json& effective) {
  const CostProfile prof;
  std::vector<SweepRow> rows;
  effective = {{"figure", name}, {"profile", prof.ToJson()}};
  if (name == "fig2") {
    const std::vector<std::uint64_t> axis = {1000, 10000, 100000, 1000000};
    AppendGrid(rows, axis, axis, ThreatForK(axis.front(), 0.3), 0.3, prof);
  } else if (name == "fig3") {
    const std::vector<std::uint64_t> points = {10000, 100000, 1000000};
    for (double k : {0.05, 0.1, 0.15, 0.2, 0.25, 0.3}) {
      for (std::uint64_t v : points) AppendGrid(rows, {v}, {v}, ThreatForK(v, k), k, prof);
    }
  } else if (name == "table3") {
    const std::uint64_t v = 10000;
    const std::vector<std::uint64_t> candidates = {25, 50, 100, 250, 305, 500, 1000};
    for (double target : {3.0, 1.54, 1.18}) {
      TradeoffResult tr = tradeoff_optimize(v, v, ThreatForK(v, 0.3), prof, target, candidates);
      SweepRow r{v, v, Choice{Protocol::kDisAgg, tr.committee, tr.disagg}, tr.speedup, 0.3,
                 tr.download_bytes};
      rows.push_back(r);
    }
  } else {
    throw InvalidValueError("unknown figure '" + name + "' (fig2, fig3, table3)");
  }
  return rows;
}

int CmdCostSweep(const Globals& g, RunManifest& man, const std::string& figure) {
  std::vector<SweepRow> rows;
  json effective;
  if (!figure.empty()) {
    rows = Figure(figure, effective);
  } else {
    effective = RequireConfig(g);
    const auto ms = Field<std::vector<std::uint64_t>>(effective, "M");
    const auto ns = Field<std::vector<std::uint64_t>>(effective, "N");
    if (ms.empty() || ns.empty()) throw ParameterError("empty M or N grid");
    const CostProfile prof = ProfileFrom(effective);
    const ThreatConfig t = ThreatFrom(effective, ns.front());
    const double k = effective.contains("k") ? effective.at("k").get<double>() : 1.5 * t.delta;
    AppendGrid(rows, ms, ns, t, k, prof);
  }
  man.set_config(effective);
  std::string text;
  std::string name;
  if (g.format == "csv") {
    text = RowsToCsv(rows);
    name = "cost_sweep.csv";
  } else {
    text = RowsToJson(rows).dump(2) + "\n";
    name = "cost_sweep.json";
  }
  std::cout << text;
  WriteText(man, OutPath(g, name), text);
  return kExitOk;
}

// ---- tradeoff ----

int CmdTradeoff(const Globals& g, RunManifest& man, std::optional<std::uint64_t> m_flag,
                std::optional<std::uint64_t> n_flag, std::optional<double> target_flag) {
  json cfg = g.config.empty() ? json::object() : ReadJsonFile(g.config);
  if (m_flag) cfg["M"] = *m_flag;
  if (n_flag) cfg["N"] = *n_flag;
  if (target_flag) cfg["s_target"] = *target_flag;
  if (!cfg.contains("k") && !cfg.contains("gamma")) cfg["k"] = 0.3;
  man.set_config(cfg);
  const auto m = Field<std::uint64_t>(cfg, "M");
  const auto n = Field<std::uint64_t>(cfg, "N");
  const double target = Field<double>(cfg, "s_target");
  const CostProfile prof = ProfileFrom(cfg);
  ThreatConfig t = ThreatFrom(cfg, n);
  t.validate();
  const auto candidates =
      Field<std::vector<std::uint64_t>>(cfg, "candidates", std::vector<std::uint64_t>{});
  const TradeoffResult tr = tradeoff_optimize(m, n, t, prof, target, candidates);
  json out = {{"schema_version", kOutputSchemaVersion},
              {"M", m},
              {"N", n},
              {"s_target", target},
              {"rho", tr.rho},
              {"A", tr.committee.a},
              {"t_c", tr.committee.t_c},
              {"t_r", tr.committee.t_r},
              {"download_bytes", tr.download_bytes},
              {"speedup", tr.speedup},
              {"objective", tr.objective},
              {"target_met", tr.target_met},
              {"disagg_total", tr.disagg.total()},
              {"opa", {{"A", tr.opa_baseline.committee.a},
                       {"rho", tr.opa_baseline.committee.rho},
                       {"total", tr.opa_baseline.cost.total()}}}};
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  WriteText(man, OutPath(g, "tradeoff.json"), text);
  return tr.target_met ? kExitOk : kExitFailure;
}

// ---- share / reconstruct ----

FieldPrime PrimeFrom(const json& cfg) {
  if (!cfg.contains("prime")) return FieldPrime::Default();
  const json& p = cfg.at("prime");
  return FieldPrime(p.is_string() ? ParseUint128(p.get<std::string>())
                                  : static_cast<uint128>(p.get<std::uint64_t>()));
}

SharingParams ParamsFrom(const json& cfg) {
  return SharingParams::Make(PrimeFrom(cfg), Field<std::uint64_t>(cfg, "A"),
                             Field<std::uint64_t>(cfg, "t_c"),
                             Field<std::uint64_t>(cfg, "t_r"));
}

FieldElement ElementFrom(const json& v, const FieldPrime& prime) {
  uint128 raw = v.is_string() ? ParseUint128(v.get<std::string>())
                              : static_cast<uint128>(v.get<std::uint64_t>());
  if (raw >= prime.modulus()) throw InvalidValueError("secret element not below the prime");
  return FieldElement(raw);
}

int CmdShare(const Globals& g, RunManifest& man) {
  json cfg = RequireConfig(g);
  if (g.seed) cfg["seed"] = *g.seed;
  man.set_config(cfg);
  const std::uint64_t seed = Field<std::uint64_t>(cfg, "seed");
  man.set_seed(seed);
  const SharingParams params = ParamsFrom(cfg);
  std::vector<FieldElement> elems;
  for (const json& v : Field<json>(cfg, "secret")) elems.push_back(ElementFrom(v, params.prime()));
  FieldVector secret(params.prime(), std::move(elems));
  Prg rng = Prg::Derive(seed, "cli.share");
  const std::vector<ShareBundle> bundles = secret_share(secret, params, rng);
  json files = json::array();
  for (std::size_t j = 0; j < bundles.size(); ++j) {
    const auto frame = EncodeShareBundle(bundles[j]);
    const fs::path p = OutPath(g, "share_" + std::to_string(j) + ".bin");
    WriteText(man, p, std::string(frame.begin(), frame.end()));
    files.push_back(p.string());
  }
  std::cout << json({{"schema_version", kOutputSchemaVersion},
                     {"shares", files},
                     {"share_length", params.share_length(secret.size())}})
                   .dump(2)
            << "\n";
  return kExitOk;
}

std::vector<std::uint8_t> ReadBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

int CmdReconstruct(const Globals& g, RunManifest& man, const std::vector<std::string>& files) {
  json cfg = RequireConfig(g);
  std::vector<std::string> paths = files;
  if (paths.empty()) paths = Field<std::vector<std::string>>(cfg, "shares", std::vector<std::string>{});
  cfg["shares"] = paths;
  man.set_config(cfg);
  const SharingParams params = ParamsFrom(cfg);
  // Bundles at the same beta are summed first, so sharings of several
  // secrets reconstruct their sum.
  std::map<uint128, AggregatedShare> by_beta;
  for (const std::string& p : paths) {
    const ShareBundle b = DecodeShareBundle(ReadBytes(p), params.prime());
    auto it = by_beta.find(b.beta.value());
    if (it == by_beta.end()) {
      by_beta.emplace(b.beta.value(), to_aggregate(b));
    } else {
      accumulate(it->second, b);
    }
  }
  if (by_beta.empty()) throw ParameterError("no share files given");
  std::vector<AggregatedShare> shares;
  for (auto& [beta, s] : by_beta) shares.push_back(std::move(s));
  try {
    const FieldVector sum = secret_reconstruct(shares, params, shares.front().original_len);
    json vals = json::array();
    for (const FieldElement& e : sum) vals.push_back(Uint128ToString(e.value()));
    json out = {{"schema_version", kOutputSchemaVersion},
                {"sum", vals},
                {"contributors", shares.front().contributor_count},
                {"distinct_shares", shares.size()}};
    const std::string text = out.dump(2) + "\n";
    std::cout << text;
    WriteText(man, OutPath(g, "reconstruct.json"), text);
    return kExitOk;
  } catch (const InsufficientSharesError& e) {
    std::cerr << "reconstruction failure: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace
}  // namespace disagg

int main(int argc, char** argv) {
  using namespace disagg;
  if (sodium_init() < 0) {
    std::cerr << "libsodium failed to initialise\n";
    return kExitFailure;
  }
  CLI::App app{"Secure aggregation with a sampled Aggregator committee"};
  app.set_version_flag("--version", DISAGG_VERSION);
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--seed", g.seed, "Override the configured seed");
  app.add_option("--out-dir", g.out_dir, "Directory for outputs and the run manifest");
  app.add_option("--format", g.format, "Tabular output format")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* solve = app.add_subcommand("solve", "Minimal committee for a threat model");
  auto* simulate = app.add_subcommand("simulate", "Run one aggregation iteration");
  auto* sweep = app.add_subcommand("cost-sweep", "Analytic cost grid, CSV or JSON");
  std::string figure;
  sweep->add_option("--figure", figure, "Preset grid")
      ->check(CLI::IsMember({"fig2", "fig3", "table3"}));
  auto* tradeoff = app.add_subcommand("tradeoff", "Download/speedup trade-off");
  std::optional<std::uint64_t> m_flag, n_flag;
  std::optional<double> target_flag;
  tradeoff->add_option("--m", m_flag, "Model size");
  tradeoff->add_option("--n", n_flag, "Number of clients");
  tradeoff->add_option("--s-target", target_flag, "Speedup target");
  auto* share = app.add_subcommand("share", "Write ShareBundle files for a secret");
  auto* reconstruct = app.add_subcommand("reconstruct", "Reconstruct from ShareBundle files");
  std::vector<std::string> share_files;
  reconstruct->add_option("files", share_files, "ShareBundle files");
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  RunManifest man(command);
  if (g.seed) man.set_seed(*g.seed);
  int rc = kExitFailure;
  try {
    if (*solve) rc = CmdSolve(g, man);
    if (*simulate) rc = CmdSimulate(g, man);
    if (*sweep) rc = CmdCostSweep(g, man, figure);
    if (*tradeoff) rc = CmdTradeoff(g, man, m_flag, n_flag, target_flag);
    if (*share) rc = CmdShare(g, man);
    if (*reconstruct) rc = CmdReconstruct(g, man, share_files);
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    rc = kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    rc = kExitConfig;
  } catch (const NoSolutionError& e) {
    std::cerr << "no committee: " << e.what() << " (binding constraint: " << e.binding()
              << ")\n";
    rc = kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    rc = kExitFailure;
  }
  man.set_exit(rc);
  try {
    man.write(g.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "cannot write manifest: " << e.what() << "\n";
  }
  return rc;
}
