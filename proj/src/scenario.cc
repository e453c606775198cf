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

#include <fstream>
#include <set>
#include <sstream>

#include "disagg/errors.h"

namespace disagg {
namespace {

using nlohmann::json;

void OnlyKeys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw FormatError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

template <typename T>
T Get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw FormatError(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(where + ": bad '" + key + "': " + e.what());
  }
}

template <typename T>
T Opt(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? Get<T>(j, key, where) : fallback;
}

FaultPlan ParseFaults(const json& j) {
  const std::string w = "faultplan";
  OnlyKeys(j, {"dropouts", "random_dropouts", "corrupted", "random_corruptions",
               "divergent_aggregators", "link_classes", "allow_excess"},
           w);
  FaultPlan f;
  if (j.contains("dropouts")) {
    for (const json& d : j.at("dropouts")) {
      OnlyKeys(d, {"party", "phase"}, w + ".dropouts[]");
      f.dropouts.push_back({Get<std::uint64_t>(d, "party", w),
                            ParsePhase(Get<std::string>(d, "phase", w))});
    }
  }
  if (j.contains("random_dropouts")) {
    const json& r = j.at("random_dropouts");
    OnlyKeys(r, {"round0", "clients", "aggregators"}, w + ".random_dropouts");
    f.random_round0_dropouts = Opt<std::uint64_t>(r, "round0", 0, w);
    f.random_client_dropouts = Opt<std::uint64_t>(r, "clients", 0, w);
    f.random_aggregator_dropouts = Opt<std::uint64_t>(r, "aggregators", 0, w);
  }
  if (j.contains("corrupted")) {
    for (std::uint64_t id : Get<std::vector<std::uint64_t>>(j, "corrupted", w)) {
      f.corrupted.insert(id);
    }
  }
  if (j.contains("random_corruptions")) {
    const json& r = j.at("random_corruptions");
    OnlyKeys(r, {"clients", "aggregators"}, w + ".random_corruptions");
    f.random_corrupt_clients = Opt<std::uint64_t>(r, "clients", 0, w);
    f.random_corrupt_aggregators = Opt<std::uint64_t>(r, "aggregators", 0, w);
  }
  if (j.contains("divergent_aggregators")) {
    for (std::uint64_t id : Get<std::vector<std::uint64_t>>(j, "divergent_aggregators", w)) {
      f.divergent_aggregators.insert(id);
    }
  }
  if (j.contains("link_classes")) {
    const json& lc = j.at("link_classes");
    if (!lc.is_object()) throw FormatError(w + ".link_classes must be an object");
    for (auto it = lc.begin(); it != lc.end(); ++it) {
      std::uint64_t id = 0;
      try {
        std::size_t pos = 0;
        id = std::stoull(it.key(), &pos);
        if (pos != it.key().size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw FormatError(w + ".link_classes: key '" + it.key() + "' is not a party id");
      }
      if (!it.value().is_string()) throw FormatError(w + ".link_classes values must be strings");
      f.link_classes[id] = ParseLinkClass(it.value().get<std::string>());
    }
  }
  f.allow_excess = Opt<bool>(j, "allow_excess", false, w);
  return f;
}

UpdateSource ParseUpdates(const json& j, std::uint64_t seed, std::uint64_t m) {
  const std::string w = "update_source";
  if (!j.is_object()) throw FormatError(w + " must be a JSON object");
  const std::string kind = Get<std::string>(j, "kind", w);
  if (kind == "prg") {
    OnlyKeys(j, {"kind", "lo", "hi", "seed"}, w);
    const double lo = Opt<double>(j, "lo", -1.0, w);
    const double hi = Opt<double>(j, "hi", 1.0, w);
    if (!(lo < hi)) throw FormatError(w + ": need lo < hi");
    return PrgUpdates(Opt<std::uint64_t>(j, "seed", seed, w), lo, hi);
  }
  if (kind == "constant") {
    OnlyKeys(j, {"kind", "value"}, w);
    return ConstantUpdates(Get<double>(j, "value", w));
  }
  if (kind == "vectors") {
    OnlyKeys(j, {"kind", "values", "default"}, w);
    std::map<std::uint64_t, std::vector<double>> table;
    const json& vals = j.at("values");
    if (!vals.is_object()) throw FormatError(w + ".values must map party ids to vectors");
    for (auto it = vals.begin(); it != vals.end(); ++it) {
      std::vector<double> v;
      try {
        v = it.value().get<std::vector<double>>();
      } catch (const json::exception& e) {
        throw FormatError(w + ".values: " + e.what());
      }
      if (v.size() != m) throw FormatError(w + ".values: vector length differs from M");
      table[std::stoull(it.key())] = std::move(v);
    }
    const double fallback = Opt<double>(j, "default", 0.0, w);
    return [table, fallback](std::uint64_t client, std::size_t len) {
      auto it = table.find(client);
      return it == table.end() ? std::vector<double>(len, fallback) : it->second;
    };
  }
  throw FormatError(w + ": unknown kind '" + kind + "'");
}

}  // namespace

Scenario ParseScenario(const json& j) {
  const std::string w = "scenario";
  OnlyKeys(j, {"schema_version", "N", "M", "gamma", "delta", "kappa_c", "kappa_s", "rho",
               "seed", "faultplan", "update_source", "population", "beacon_seed", "clip",
               "plaintext_bits", "channel", "committee", "timeouts"},
           w);
  const int version = Opt<int>(j, "schema_version", kScenarioSchemaVersion, w);
  if (version != kScenarioSchemaVersion) {
    throw FormatError(w + ": unsupported schema_version " + std::to_string(version));
  }
  Scenario s;
  ProtocolConfig& c = s.config;
  c.n = Get<std::uint64_t>(j, "N", w);
  c.m = Get<std::uint64_t>(j, "M", w);
  c.gamma = Get<double>(j, "gamma", w);
  c.delta = Get<double>(j, "delta", w);
  c.kappa_c = Opt<double>(j, "kappa_c", 40.0, w);
  c.kappa_s = Opt<double>(j, "kappa_s", 40.0, w);
  c.rho = Opt<std::uint64_t>(j, "rho", 1, w);
  c.seed = Get<std::uint64_t>(j, "seed", w);
  c.population = Opt<std::uint64_t>(j, "population", 0, w);
  if (j.contains("beacon_seed")) c.beacon_seed = Get<std::uint64_t>(j, "beacon_seed", w);
  c.clip = Opt<double>(j, "clip", 2.0, w);
  c.plaintext_bits = Opt<unsigned>(j, "plaintext_bits", 0, w);
  c.channel = Opt<std::string>(j, "channel", "test", w);
  if (j.contains("committee")) {
    const json& cj = j.at("committee");
    OnlyKeys(cj, {"A", "t_c", "t_r"}, w + ".committee");
    CommitteeParams p;
    p.a = Get<std::uint64_t>(cj, "A", w);
    p.t_c = Get<std::uint64_t>(cj, "t_c", w);
    p.t_r = Get<std::uint64_t>(cj, "t_r", w);
    p.rho = p.t_r > p.t_c ? p.t_r - p.t_c : 0;
    c.committee = p;
  }
  if (j.contains("timeouts")) {
    const json& tj = j.at("timeouts");
    OnlyKeys(tj, {"round0", "round1", "round2"}, w + ".timeouts");
    c.round0_timeout = Opt<double>(tj, "round0", c.round0_timeout, w);
    c.round1_timeout = Opt<double>(tj, "round1", c.round1_timeout, w);
    c.round2_timeout = Opt<double>(tj, "round2", c.round2_timeout, w);
  }
  if (j.contains("faultplan")) s.faults = ParseFaults(j.at("faultplan"));
  s.update_spec = j.contains("update_source") ? j.at("update_source") : json{{"kind", "prg"}};
  s.updates = ParseUpdates(s.update_spec, c.seed, c.m);
  try {
    c.validate();
  } catch (const ParameterError& e) {
    throw FormatError(std::string("scenario: ") + e.what());
  }
  return s;
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path + "': " + e.what());
  }
}

Scenario LoadScenario(const std::string& path) { return ParseScenario(ReadJsonFile(path)); }

json FaultPlanToJson(const FaultPlan& f) {
  json j;
  json drops = json::array();
  for (const Dropout& d : f.dropouts) {
    drops.push_back({{"party", d.party}, {"phase", std::string(PhaseName(d.phase))}});
  }
  j["dropouts"] = drops;
  j["random_dropouts"] = {{"round0", f.random_round0_dropouts},
                          {"clients", f.random_client_dropouts},
                          {"aggregators", f.random_aggregator_dropouts}};
  j["corrupted"] = std::vector<std::uint64_t>(f.corrupted.begin(), f.corrupted.end());
  j["random_corruptions"] = {{"clients", f.random_corrupt_clients},
                             {"aggregators", f.random_corrupt_aggregators}};
  j["divergent_aggregators"] =
      std::vector<std::uint64_t>(f.divergent_aggregators.begin(), f.divergent_aggregators.end());
  json lc = json::object();
  for (const auto& [id, cls] : f.link_classes) {
    lc[std::to_string(id)] = cls == LinkClass::k3g ? "3g" : cls == LinkClass::k4g ? "4g" : "5g";
  }
  j["link_classes"] = lc;
  j["allow_excess"] = f.allow_excess;
  return j;
}

json ScenarioToJson(const Scenario& s) {
  const ProtocolConfig& c = s.config;
  json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["N"] = c.n;
  j["M"] = c.m;
  j["gamma"] = c.gamma;
  j["delta"] = c.delta;
  j["kappa_c"] = c.kappa_c;
  j["kappa_s"] = c.kappa_s;
  j["rho"] = c.rho;
  j["seed"] = c.seed;
  if (c.population != 0) j["population"] = c.population;
  if (c.beacon_seed) j["beacon_seed"] = *c.beacon_seed;
  j["clip"] = c.clip;
  if (c.plaintext_bits != 0) j["plaintext_bits"] = c.plaintext_bits;
  j["channel"] = c.channel;
  if (c.committee) {
    j["committee"] = {{"A", c.committee->a}, {"t_c", c.committee->t_c}, {"t_r", c.committee->t_r}};
  }
  j["timeouts"] = {{"round0", c.round0_timeout},
                   {"round1", c.round1_timeout},
                   {"round2", c.round2_timeout}};
  j["faultplan"] = FaultPlanToJson(s.faults);
  j["update_source"] = s.update_spec;
  return j;
}

json RunResultToJson(const RunResult& r) {
  json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["committee"] = {{"A", r.committee.a}, {"t_c", r.committee.t_c},
                    {"t_r", r.committee.t_r}, {"rho", r.committee.rho}};
  j["registered"] = r.registered.size();
  j["aggregators"] = r.aggregators;
  j["survivors"] = r.survivors;
  j["surviving_aggregators"] = r.surviving_aggregators;
  json sum = json::array();
  for (const FieldElement& e : r.sum.elems()) sum.push_back(Uint128ToString(e.value()));
  j["sum"] = sum;
  j["sum_real"] = r.sum_real;
  j["matches_oracle"] = r.sum == r.oracle_sum;
  j["plaintext_bits"] = r.quantizer.plaintext_bits;
  j["clip"] = r.quantizer.clip;
  j["finish_time"] = r.finish_time;
  return j;
}

json AuditToJson(const AuditReport& a) {
  return {{"schema_version", kScenarioSchemaVersion},
          {"clean", a.clean},
          {"threshold_exceeded", a.threshold_exceeded},
          {"corruption_threshold", a.corruption_threshold},
          {"coalition_size", a.coalition_size},
          {"corrupted_aggregators", a.corrupted_aggregators},
          {"max_shares_per_client", a.max_shares_per_client},
          {"ciphertexts_checked", a.ciphertexts_checked},
          {"server_decryptions", a.server_decryptions},
          {"final_sum_only", a.final_sum_only},
          {"findings", a.findings}};
}

}  // namespace disagg
