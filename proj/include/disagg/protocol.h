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

#ifndef DISAGG_PROTOCOL_H_
#define DISAGG_PROTOCOL_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "disagg/channel.h"
#include "disagg/committee.h"
#include "disagg/field.h"
#include "disagg/lcc.h"
#include "disagg/quantize.h"

namespace disagg {

// Party 0 is the server; population clients are numbered from 1.
inline constexpr std::uint64_t kServerId = 0;

enum class Role { kServer, kClient, kAggregator };
std::string_view RoleName(Role r);

struct PartyId {
  std::uint64_t id = 0;
  Role role = Role::kClient;
};

// kRound0: never answers registration. kUpload: offline from Round 1 on
// (an Aggregator dropped here never sees the forwarded shares).
// kAggregate: Aggregator that receives its shares but never replies.
enum class Phase { kRound0, kUpload, kAggregate };
std::string_view PhaseName(Phase p);
Phase ParsePhase(std::string_view name);

enum class LinkClass { k5g, k4g, k3g };
LinkClass ParseLinkClass(std::string_view name);

struct Dropout {
  std::uint64_t party = 0;
  Phase phase = Phase::kUpload;
};

struct FaultPlan {
  std::vector<Dropout> dropouts;
  // Drawn from the run seed once roles are known.
  std::uint64_t random_round0_dropouts = 0;
  std::uint64_t random_client_dropouts = 0;      // regular clients, before upload
  std::uint64_t random_aggregator_dropouts = 0;  // Aggregators, before replying

  // Passive observers whose views join the server's.
  std::set<std::uint64_t> corrupted;
  std::uint64_t random_corrupt_clients = 0;
  std::uint64_t random_corrupt_aggregators = 0;

  // Test hook: these Aggregators leave one contributor out of their sum.
  std::set<std::uint64_t> divergent_aggregators;

  std::map<std::uint64_t, LinkClass> link_classes;  // default 5g

  // Skip the floor(delta N) dropout and floor(gamma N) corruption caps.
  bool allow_excess = false;
};

struct ProtocolConfig {
  std::uint64_t population = 0;  // 0 means N
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  double gamma = 0.0;
  double delta = 0.0;
  double kappa_c = 40.0;
  double kappa_s = 40.0;
  std::uint64_t rho = 1;
  std::optional<CommitteeParams> committee;  // bypasses the solver
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> beacon_seed;  // defaults to a value derived from seed
  double clip = 2.0;
  unsigned plaintext_bits = 0;  // 0: QuantizerConfig::ForCohort
  std::string channel = "test";
  double round0_timeout = 30.0;  // simulated seconds
  double round1_timeout = 30.0;
  double round2_timeout = 30.0;

  ThreatConfig threat() const;
  std::uint64_t population_size() const { return population == 0 ? n : population; }
  std::uint64_t effective_beacon() const;
  // Throws ParameterError.
  void validate() const;
};

// Real-valued update for a client; must return exactly m values.
using UpdateSource = std::function<std::vector<double>(std::uint64_t client, std::size_t m)>;
UpdateSource PrgUpdates(std::uint64_t seed, double lo = -1.0, double hi = 1.0);
UpdateSource ConstantUpdates(double value);

struct MessageRecord {
  std::uint64_t from = 0;
  std::uint64_t to = 0;
  int round = 0;
  std::uint64_t bytes = 0;          // bytes on the wire
  std::string type;
  std::uint64_t payload_bytes = 0;  // field elements or keys carried, unframed
  double time = 0.0;                // simulated send time
};
std::string TranscriptToJsonl(const std::vector<MessageRecord>& records);

struct Ciphertext {
  std::uint64_t from = 0;
  std::uint64_t to = 0;
  std::vector<std::uint8_t> bytes;
};

// Everything one coalition member holds after the run. For the server,
// `inbox` is every share ciphertext it relayed.
struct PartyView {
  PartyId party;
  std::vector<std::uint64_t> public_keys_seen;
  std::vector<Ciphertext> inbox;
  std::size_t aggregated_shares = 0;
  bool has_final_sum = false;
};

// Deterministic Aggregator selection: a seeded shuffle of the sorted
// registry keyed by the beacon, first a entries.
std::vector<std::uint64_t> SelectAggregators(std::uint64_t beacon_seed,
                                             std::vector<std::uint64_t> registry,
                                             std::size_t a);

struct RunResult {
  CommitteeParams committee;
  std::vector<std::uint64_t> registered;             // U
  std::vector<std::uint64_t> aggregators;            // A_set, share j at index j
  std::vector<std::uint64_t> survivors;              // U0
  std::vector<std::uint64_t> surviving_aggregators;  // A0
  FieldVector sum{FieldPrime::Default()};
  std::vector<double> sum_real;
  FieldVector oracle_sum{FieldPrime::Default()};  // plain field sum over U0
  std::vector<double> oracle_real;  // sum of clipped reals over U0
  QuantizerConfig quantizer;
  double finish_time = 0.0;
};

class Simulation {
 public:
  Simulation(ProtocolConfig cfg, FaultPlan plan, UpdateSource updates = {});
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Throws RoundFailureError if fewer than N clients register in time.
  const std::vector<std::uint64_t>& run_round0();
  // Selects the Aggregators and collects uploads. Returns A_set.
  const std::vector<std::uint64_t>& run_round1();
  // Throws RoundFailureError (too few survivors), ReconstructionFailureError
  // (|A0| < t_r) or ProtocolViolationError (contributor sets disagree).
  const FieldVector& run_round2();
  // All three rounds.
  const RunResult& run();

  const ProtocolConfig& config() const { return cfg_; }
  const FaultPlan& fault_plan() const { return plan_; }
  const SharingParams& sharing() const;
  const RunResult& result() const { return result_; }
  const std::vector<MessageRecord>& transcript() const { return transcript_; }
  std::uint64_t upload_messages(std::uint64_t client) const;

  // Views of the server and every corrupted party.
  std::vector<PartyView> coalition_views() const;
  const std::set<std::uint64_t>& corrupted() const { return corrupted_; }
  // Opens a ciphertext as `reader` would, with its channel to `sender`.
  std::vector<std::uint8_t> open_as(std::uint64_t reader, std::uint64_t sender,
                                    const std::vector<std::uint8_t>& ct) const;

 private:
  struct Impl;
  ProtocolConfig cfg_;
  FaultPlan plan_;
  UpdateSource updates_;
  RunResult result_;
  std::vector<MessageRecord> transcript_;
  std::set<std::uint64_t> corrupted_;
  std::unique_ptr<Impl> impl_;
};

struct AuditReport {
  bool clean = true;
  bool threshold_exceeded = false;
  std::size_t corruption_threshold = 0;
  std::size_t coalition_size = 0;          // server included
  std::size_t corrupted_aggregators = 0;
  std::size_t max_shares_per_client = 0;   // plaintext shares of one honest client
  std::size_t ciphertexts_checked = 0;
  std::size_t server_decryptions = 0;      // must stay 0
  bool final_sum_only = true;
  std::vector<std::string> findings;
};

// Replays what the coalition (server plus corrupted parties) can open.
AuditReport transcript_audit(const Simulation& sim);

}  // namespace disagg

#endif  // DISAGG_PROTOCOL_H_
