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

#include "disagg/protocol.h"

#include <sodium.h>

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <utility>

#include "disagg/errors.h"
#include "disagg/prg.h"
#include "disagg/wire.h"
#include "json.hpp"

namespace disagg {
namespace {

using Digest = std::array<std::uint8_t, 32>;

struct Link {
  double up = 2e6;
  double down = 20e6;
};

Link LinkFor(LinkClass c) {
  switch (c) {
    case LinkClass::k4g:
      return {200e3, 2e6};
    case LinkClass::k3g:
      return {50e3, 500e3};
    case LinkClass::k5g:
      break;
  }
  return {2e6, 20e6};
}

// Min-heap on (time, insertion order) so equal times replay in the order
// they were scheduled.
class EventQueue {
 public:
  void push(double t, std::function<void()> fn) {
    heap_.push(Event{t, seq_++, std::move(fn)});
  }
  void run() {
    while (!heap_.empty()) {
      Event e = heap_.top();
      heap_.pop();
      now_ = e.time;
      e.fn();
    }
  }
  double now() const { return now_; }

 private:
  struct Event {
    double time;
    std::uint64_t seq;
    std::function<void()> fn;
    bool operator>(const Event& o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, std::greater<>> heap_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
};

Digest ContributorDigest(const std::vector<std::uint64_t>& ids) {
  ByteWriter w;
  const std::string_view label = "disagg.contributors.v1";
  w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(label.data()), label.size()));
  w.u64(ids.size());
  for (std::uint64_t id : ids) w.u64(id);
  const auto& buf = w.buffer();
  Digest d{};
  crypto_hash_sha256(d.data(), buf.data(), buf.size());
  return d;
}

// Picks k members of `pool` (sorted) not already in `taken`.
std::vector<std::uint64_t> Draw(Prg& rng, std::vector<std::uint64_t> pool,
                                const std::set<std::uint64_t>& taken, std::uint64_t k) {
  std::erase_if(pool, [&](std::uint64_t id) { return taken.count(id) != 0; });
  if (k > pool.size()) {
    throw ParameterError("fault plan: asks for more parties than are eligible");
  }
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

std::string_view RoleName(Role r) {
  switch (r) {
    case Role::kServer:
      return "server";
    case Role::kAggregator:
      return "aggregator";
    case Role::kClient:
      break;
  }
  return "client";
}

std::string_view PhaseName(Phase p) {
  switch (p) {
    case Phase::kRound0:
      return "round0";
    case Phase::kAggregate:
      return "aggregate";
    case Phase::kUpload:
      break;
  }
  return "upload";
}

Phase ParsePhase(std::string_view name) {
  if (name == "round0") return Phase::kRound0;
  if (name == "upload") return Phase::kUpload;
  if (name == "aggregate") return Phase::kAggregate;
  throw InvalidValueError("unknown dropout phase '" + std::string(name) + "'");
}

LinkClass ParseLinkClass(std::string_view name) {
  if (name == "5g") return LinkClass::k5g;
  if (name == "4g") return LinkClass::k4g;
  if (name == "3g") return LinkClass::k3g;
  throw InvalidValueError("unknown link class '" + std::string(name) + "'");
}

ThreatConfig ProtocolConfig::threat() const {
  ThreatConfig t;
  t.n = n;
  t.gamma = gamma;
  t.delta = delta;
  t.kappa_c = kappa_c;
  t.kappa_s = kappa_s;
  return t;
}

std::uint64_t ProtocolConfig::effective_beacon() const {
  if (beacon_seed) return *beacon_seed;
  return Prg::Derive(seed, "beacon")();
}

void ProtocolConfig::validate() const {
  if (n < 3) throw ParameterError("protocol: N must be at least 3");
  if (m == 0) throw ParameterError("protocol: M must be positive");
  if (population_size() < n) throw ParameterError("protocol: population smaller than N");
  if (rho == 0) throw ParameterError("protocol: rho must be positive");
  if (!(clip > 0.0)) throw ParameterError("protocol: clip must be positive");
  for (double t : {round0_timeout, round1_timeout, round2_timeout}) {
    if (!(t > 0.0)) throw ParameterError("protocol: timeouts must be positive");
  }
  threat().validate();
  if (committee) {
    const CommitteeParams& c = *committee;
    if (!(c.t_c >= 1 && c.t_c < c.t_r && c.t_r < c.a) || c.a > n) {
      throw ParameterError("protocol: committee needs 0 < t_c < t_r < A <= N");
    }
  }
}

UpdateSource PrgUpdates(std::uint64_t seed, double lo, double hi) {
  return [seed, lo, hi](std::uint64_t client, std::size_t m) {
    Prg rng = Prg::Derive(seed, "update", client);
    std::vector<double> v(m);
    for (double& x : v) x = rng.uniform_real(lo, hi);
    return v;
  };
}

UpdateSource ConstantUpdates(double value) {
  return [value](std::uint64_t, std::size_t m) { return std::vector<double>(m, value); };
}

std::string TranscriptToJsonl(const std::vector<MessageRecord>& records) {
  std::string out;
  for (const MessageRecord& r : records) {
    nlohmann::ordered_json j;
    j["from"] = r.from;
    j["to"] = r.to;
    j["round"] = r.round;
    j["bytes"] = r.bytes;
    j["type"] = r.type;
    j["payload_bytes"] = r.payload_bytes;
    j["time"] = r.time;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<std::uint64_t> SelectAggregators(std::uint64_t beacon_seed,
                                             std::vector<std::uint64_t> registry,
                                             std::size_t a) {
  std::sort(registry.begin(), registry.end());
  if (a > registry.size()) throw ParameterError("selection: A exceeds the registry");
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, 32);
  ByteWriter w;
  const std::string_view label = "disagg.select.v1";
  w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(label.data()), label.size()));
  w.u64(beacon_seed);
  w.u64(registry.size());
  for (std::uint64_t id : registry) w.u64(id);
  SeedKey key{};
  crypto_generichash_update(&st, w.buffer().data(), w.buffer().size());
  crypto_generichash_final(&st, key.data(), key.size());
  Prg rng(key);
  for (std::size_t i = 0; i < a; ++i) {
    const std::size_t j = i + rng.below(registry.size() - i);
    std::swap(registry[i], registry[j]);
  }
  registry.resize(a);
  return registry;
}

struct Simulation::Impl {
  std::unique_ptr<ChannelBackend> backend;
  std::map<std::uint64_t, KeyPair> keys;
  std::map<std::uint64_t, double> base_latency;
  mutable std::map<std::pair<std::uint64_t, std::uint64_t>, std::unique_ptr<Channel>> channels;
  std::optional<SharingParams> sharing;
  int stage = 0;  // rounds completed

  std::set<std::uint64_t> drop_round0;
  std::set<std::uint64_t> drop_upload;
  std::set<std::uint64_t> drop_aggregate;
  std::vector<std::uint64_t> regular;  // U \ A_set, sorted
  double t_registered = 0.0;
  double t_pinned = 0.0;

  std::map<std::uint64_t, std::vector<Ciphertext>> uploads;  // accepted, by client
  std::map<std::uint64_t, FieldVector> quantized;
  std::map<std::uint64_t, std::vector<double>> clipped;
  std::map<std::uint64_t, PartyView> views;  // coalition members
  std::map<std::uint64_t, std::uint64_t> upload_count;

  Channel& channel(std::uint64_t self, std::uint64_t peer) const {
    auto key = std::make_pair(self, peer);
    auto it = channels.find(key);
    if (it == channels.end()) {
      it = channels.emplace(key, backend->connect(keys.at(self), keys.at(peer).pk)).first;
    }
    return *it->second;
  }
};

Simulation::Simulation(ProtocolConfig cfg, FaultPlan plan, UpdateSource updates)
    : cfg_(std::move(cfg)), plan_(std::move(plan)), updates_(std::move(updates)),
      impl_(std::make_unique<Impl>()) {
  cfg_.validate();
  if (!updates_) updates_ = PrgUpdates(cfg_.seed);
  impl_->backend = MakeChannelBackend(cfg_.channel);
  const std::uint64_t pop = cfg_.population_size();
  for (std::uint64_t id = 0; id <= pop; ++id) {
    Prg krng = Prg::Derive(cfg_.seed, "keys", id);
    impl_->keys.emplace(id, impl_->backend->keygen(krng));
    Prg lrng = Prg::Derive(cfg_.seed, "latency", id);
    impl_->base_latency[id] = lrng.uniform_real(0.005, 0.05);
  }
  for (const auto& [id, cls] : plan_.link_classes) {
    if (id == kServerId || id > pop) throw ParameterError("fault plan: link class for unknown party");
    (void)cls;
  }
  for (std::uint64_t id : plan_.corrupted) {
    if (id == kServerId || id > pop) throw ParameterError("fault plan: corrupted party out of range");
  }
  for (const Dropout& d : plan_.dropouts) {
    if (d.party == kServerId || d.party > pop) {
      throw ParameterError("fault plan: dropout party out of range");
    }
  }
}

Simulation::~Simulation() = default;

const SharingParams& Simulation::sharing() const {
  if (!impl_->sharing) throw ParameterError("simulation: Round 1 has not run");
  return *impl_->sharing;
}

std::uint64_t Simulation::upload_messages(std::uint64_t client) const {
  auto it = impl_->upload_count.find(client);
  return it == impl_->upload_count.end() ? 0 : it->second;
}

std::vector<std::uint8_t> Simulation::open_as(std::uint64_t reader, std::uint64_t sender,
                                              const std::vector<std::uint8_t>& ct) const {
  return impl_->channel(reader, sender).open(ct);
}

std::vector<PartyView> Simulation::coalition_views() const {
  std::vector<PartyView> out;
  for (const auto& [id, v] : impl_->views) out.push_back(v);
  return out;
}

const std::vector<std::uint64_t>& Simulation::run_round0() {
  Impl& s = *impl_;
  if (s.stage != 0) throw ParameterError("simulation: Round 0 already ran");
  const std::uint64_t pop = cfg_.population_size();
  auto link = [&](std::uint64_t id) {
    auto it = plan_.link_classes.find(id);
    return LinkFor(it == plan_.link_classes.end() ? LinkClass::k5g : it->second);
  };

  std::vector<std::uint64_t> everyone(pop);
  for (std::uint64_t i = 0; i < pop; ++i) everyone[i] = i + 1;
  for (const Dropout& d : plan_.dropouts) {
    if (d.phase == Phase::kRound0) s.drop_round0.insert(d.party);
  }
  Prg frng = Prg::Derive(cfg_.seed, "faults.round0");
  for (std::uint64_t id : Draw(frng, everyone, s.drop_round0, plan_.random_round0_dropouts)) {
    s.drop_round0.insert(id);
  }

  EventQueue q;
  std::vector<std::pair<double, std::uint64_t>> arrivals;
  const double kKey = sizeof(PublicKey);
  for (std::uint64_t id : everyone) {
    const double t_query = s.base_latency[id] + kKey / link(id).down;
    transcript_.push_back({kServerId, id, 0, sizeof(PublicKey), "query", sizeof(PublicKey), 0.0});
    if (s.drop_round0.count(id)) continue;
    q.push(t_query, [&, id, t_query] {
      const double t_arrive = t_query + s.base_latency[id] + kKey / link(id).up;
      transcript_.push_back({id, kServerId, 0, sizeof(PublicKey), "register",
                             sizeof(PublicKey), t_query});
      q.push(t_arrive, [&, id, t_arrive] { arrivals.emplace_back(t_arrive, id); });
    });
  }
  q.run();

  std::vector<std::uint64_t> u;
  for (const auto& [t, id] : arrivals) {
    if (t > cfg_.round0_timeout || u.size() == cfg_.n) break;
    u.push_back(id);
    s.t_registered = t;
  }
  if (u.size() < cfg_.n) {
    throw RoundFailureError("round 0: only " + std::to_string(u.size()) + " of " +
                            std::to_string(cfg_.n) + " clients registered before the timeout");
  }
  std::sort(u.begin(), u.end());
  result_.registered = std::move(u);
  s.stage = 1;
  return result_.registered;
}

const std::vector<std::uint64_t>& Simulation::run_round1() {
  Impl& s = *impl_;
  if (s.stage == 0) run_round0();
  if (s.stage != 1) throw ParameterError("simulation: Round 1 already ran");
  auto link = [&](std::uint64_t id) {
    auto it = plan_.link_classes.find(id);
    return LinkFor(it == plan_.link_classes.end() ? LinkClass::k5g : it->second);
  };

  const CommitteeParams cp =
      cfg_.committee ? *cfg_.committee : solve_committee(cfg_.threat(), cfg_.rho).params;
  if (cp.a >= result_.registered.size()) {
    throw ParameterError("round 1: committee leaves no regular clients");
  }
  result_.committee = cp;
  result_.committee.rho = cp.t_r - cp.t_c;
  const FieldPrime prime = FieldPrime::Default();
  s.sharing = SharingParams::Make(prime, cp.a, cp.t_c, cp.t_r);
  result_.quantizer = QuantizerConfig::ForCohort(cfg_.n, prime, cfg_.clip);
  if (cfg_.plaintext_bits != 0) result_.quantizer.plaintext_bits = cfg_.plaintext_bits;
  result_.quantizer.validate();

  result_.aggregators = SelectAggregators(cfg_.effective_beacon(), result_.registered, cp.a);
  const std::set<std::uint64_t> agg_set(result_.aggregators.begin(), result_.aggregators.end());
  const std::set<std::uint64_t> registered(result_.registered.begin(), result_.registered.end());
  for (std::uint64_t id : result_.registered) {
    if (!agg_set.count(id)) s.regular.push_back(id);
  }
  std::vector<std::uint64_t> aggs_sorted(agg_set.begin(), agg_set.end());

  // Faults now that roles are known.
  for (const Dropout& d : plan_.dropouts) {
    if (!registered.count(d.party)) continue;
    if (d.phase == Phase::kUpload) s.drop_upload.insert(d.party);
    if (d.phase == Phase::kAggregate && agg_set.count(d.party)) s.drop_aggregate.insert(d.party);
  }
  Prg frng = Prg::Derive(cfg_.seed, "faults.round1");
  for (std::uint64_t id : Draw(frng, s.regular, s.drop_upload, plan_.random_client_dropouts)) {
    s.drop_upload.insert(id);
  }
  std::set<std::uint64_t> agg_taken = s.drop_upload;
  agg_taken.insert(s.drop_aggregate.begin(), s.drop_aggregate.end());
  for (std::uint64_t id : Draw(frng, aggs_sorted, agg_taken, plan_.random_aggregator_dropouts)) {
    s.drop_aggregate.insert(id);
  }
  for (std::uint64_t id : plan_.corrupted) {
    if (id <= cfg_.population_size()) corrupted_.insert(id);
  }
  for (std::uint64_t id : Draw(frng, aggs_sorted, corrupted_, plan_.random_corrupt_aggregators)) {
    corrupted_.insert(id);
  }
  for (std::uint64_t id : Draw(frng, s.regular, corrupted_, plan_.random_corrupt_clients)) {
    corrupted_.insert(id);
  }
  if (!plan_.allow_excess) {
    const ThreatConfig t = cfg_.threat();
    std::size_t dropped = s.drop_upload.size();
    for (std::uint64_t id : s.drop_aggregate) dropped += s.drop_upload.count(id) ? 0 : 1;
    if (dropped > t.dropout_count()) {
      throw ParameterError("fault plan: more dropouts than floor(delta N)");
    }
    if (corrupted_.size() > t.corrupt_count()) {
      throw ParameterError("fault plan: more corruptions than floor(gamma N)");
    }
  }

  // Coalition views.
  PartyView& sv = s.views[kServerId];
  sv.party = {kServerId, Role::kServer};
  for (std::uint64_t id : corrupted_) {
    PartyView& v = s.views[id];
    v.party = {id, agg_set.count(id) ? Role::kAggregator : Role::kClient};
  }
  auto view_of = [&](std::uint64_t id) -> PartyView* {
    auto it = s.views.find(id);
    return it == s.views.end() ? nullptr : &it->second;
  };
  for (std::uint64_t id : result_.registered) sv.public_keys_seen.push_back(id);

  EventQueue q;
  const double t0 = s.t_registered;
  const double deadline = t0 + cfg_.round1_timeout;
  const std::size_t a = cp.a;
  const std::size_t kKey = sizeof(PublicKey);
  std::vector<std::pair<double, std::uint64_t>> arrived;
  std::map<std::uint64_t, std::vector<Ciphertext>> pending;

  for (std::uint64_t agg : result_.aggregators) {
    const std::size_t bytes = s.regular.size() * kKey;
    transcript_.push_back({kServerId, agg, 1, bytes, "client_keys", bytes, t0});
    if (PartyView* v = view_of(agg)) {
      v->public_keys_seen.insert(v->public_keys_seen.end(), s.regular.begin(), s.regular.end());
    }
  }
  for (std::uint64_t id : s.regular) {
    const std::size_t bytes = a * kKey;
    transcript_.push_back({kServerId, id, 1, bytes, "aggregator_keys", bytes, t0});
    if (PartyView* v = view_of(id)) {
      v->public_keys_seen.insert(v->public_keys_seen.end(), result_.aggregators.begin(),
                                 result_.aggregators.end());
    }
    if (s.drop_upload.count(id)) continue;
    const double t_keys = t0 + s.base_latency[id] + static_cast<double>(bytes) / link(id).down;
    q.push(t_keys, [&, id, t_keys] {
      std::vector<double> x = updates_(id, cfg_.m);
      if (x.size() != cfg_.m) throw DimensionError("update source returned the wrong length");
      FieldVector qx = quantize(x, result_.quantizer);
      for (double& v : x) v = std::clamp(v, -cfg_.clip, cfg_.clip);
      Prg srng = Prg::Derive(cfg_.seed, "share", id);
      std::vector<ShareBundle> bundles = secret_share(qx, *s.sharing, srng);
      ByteWriter w;
      w.u64(a);
      std::vector<Ciphertext> cts;
      std::uint64_t payload = 0;
      for (std::size_t j = 0; j < a; ++j) {
        const std::uint64_t agg = result_.aggregators[j];
        Ciphertext ct{id, agg, s.channel(id, agg).seal(EncodeShareBundle(bundles[j]))};
        w.u64(ct.bytes.size());
        w.bytes(ct.bytes);
        payload += bundles[j].share.size() * kElementBytes;
        cts.push_back(std::move(ct));
      }
      const std::size_t bytes = w.buffer().size();
      transcript_.push_back({id, kServerId, 1, bytes, "upload", payload, t_keys});
      ++s.upload_count[id];
      s.quantized.emplace(id, std::move(qx));
      s.clipped.emplace(id, std::move(x));
      pending.emplace(id, std::move(cts));
      const double t_up = t_keys + s.base_latency[id] + static_cast<double>(bytes) / link(id).up;
      q.push(t_up, [&, id, t_up] { arrived.emplace_back(t_up, id); });
    });
  }
  q.run();

  // The server pins U0 at the deadline, or earlier once every regular
  // client has uploaded. Late uploads are discarded.
  std::vector<std::uint64_t> u0;
  double last = t0;
  for (const auto& [t, id] : arrived) {
    if (t > deadline) continue;
    u0.push_back(id);
    last = std::max(last, t);
    s.uploads[id] = std::move(pending[id]);
    for (const Ciphertext& ct : s.uploads[id]) sv.inbox.push_back(ct);
  }
  s.t_pinned = u0.size() == s.regular.size() ? last : deadline;
  std::sort(u0.begin(), u0.end());
  result_.survivors = std::move(u0);
  s.stage = 2;
  return result_.aggregators;
}

const FieldVector& Simulation::run_round2() {
  Impl& s = *impl_;
  if (s.stage < 2) run_round1();
  if (s.stage != 2) throw ParameterError("simulation: Round 2 already ran");
  s.stage = 3;
  auto link = [&](std::uint64_t id) {
    auto it = plan_.link_classes.find(id);
    return LinkFor(it == plan_.link_classes.end() ? LinkClass::k5g : it->second);
  };
  const std::vector<std::uint64_t>& u0 = result_.survivors;
  // At most floor(delta N) of the regular clients may be missing.
  const std::size_t budget = cfg_.threat().dropout_count();
  const std::size_t need = s.regular.size() > budget ? s.regular.size() - budget : 1;
  if (u0.size() < need) {
    throw RoundFailureError("round 2: " + std::to_string(u0.size()) +
                            " surviving clients, need " + std::to_string(need));
  }
  if (u0.empty()) throw RoundFailureError("round 2: no surviving clients");
  const Digest pinned = ContributorDigest(u0);
  const FieldPrime& prime = s.sharing->prime();

  EventQueue q;
  const double t0 = s.t_pinned;
  const double deadline = t0 + cfg_.round2_timeout;
  std::vector<std::pair<double, std::uint64_t>> replies;
  std::map<std::uint64_t, std::vector<std::uint8_t>> reply_ct;

  for (std::size_t j = 0; j < result_.aggregators.size(); ++j) {
    const std::uint64_t agg = result_.aggregators[j];
    ByteWriter w;
    w.u64(u0.size());
    for (std::uint64_t id : u0) w.u64(id);
    std::uint64_t payload = 0;
    std::vector<Ciphertext> mine;
    for (std::uint64_t id : u0) {
      const Ciphertext& ct = s.uploads.at(id)[j];
      w.u64(ct.bytes.size());
      w.bytes(ct.bytes);
      payload += s.sharing->share_length(cfg_.m) * kElementBytes;
      mine.push_back(ct);
    }
    const std::size_t bytes = w.buffer().size();
    transcript_.push_back({kServerId, agg, 2, bytes, "forward", payload, t0});
    if (s.drop_upload.count(agg)) continue;
    const double t_recv = t0 + s.base_latency[agg] + static_cast<double>(bytes) / link(agg).down;
    auto it = s.views.find(agg);
    if (it != s.views.end()) {
      it->second.inbox.insert(it->second.inbox.end(), mine.begin(), mine.end());
    }
    if (s.drop_aggregate.count(agg)) continue;
    q.push(t_recv, [&, agg, t_recv, mine = std::move(mine)]() mutable {
      std::vector<std::uint64_t> contributors = u0;
      if (plan_.divergent_aggregators.count(agg) && !mine.empty()) {
        mine.pop_back();
        contributors.pop_back();
      }
      std::optional<AggregatedShare> acc;
      for (const Ciphertext& ct : mine) {
        const std::vector<std::uint8_t> pt = s.channel(agg, ct.from).open(ct.bytes);
        ShareBundle b = DecodeShareBundle(pt, prime);
        if (b.params_digest != s.sharing->digest()) {
          throw ProtocolViolationError("aggregator received a share for other parameters");
        }
        if (!acc) {
          acc = to_aggregate(b);
        } else {
          accumulate(*acc, b);
        }
      }
      ByteWriter w;
      const Digest d = ContributorDigest(contributors);
      w.bytes(d);
      const std::vector<std::uint8_t> frame = EncodeAggregatedShare(*acc);
      w.bytes(frame);
      std::vector<std::uint8_t> ct = s.channel(agg, kServerId).seal(w.buffer());
      const std::size_t bytes = ct.size();
      transcript_.push_back({agg, kServerId, 2, bytes, "aggregate",
                             acc->sum_share.size() * kElementBytes, t_recv});
      const double t_up = t_recv + s.base_latency[agg] + static_cast<double>(bytes) / link(agg).up;
      reply_ct.emplace(agg, std::move(ct));
      q.push(t_up, [&, agg, t_up] { replies.emplace_back(t_up, agg); });
    });
  }
  q.run();

  std::vector<AggregatedShare> shares;
  std::vector<std::uint64_t> a0;
  double last = t0;
  for (const auto& [t, agg] : replies) {
    if (t > deadline) continue;
    const std::vector<std::uint8_t> pt = s.channel(kServerId, agg).open(reply_ct.at(agg));
    ByteReader r(pt);
    Digest d{};
    const auto db = r.bytes(d.size());
    std::copy(db.begin(), db.end(), d.begin());
    if (d != pinned) {
      throw ProtocolViolationError("aggregator " + std::to_string(agg) +
                                   " summed a different contributor set");
    }
    shares.push_back(DecodeAggregatedShare(r.bytes(r.remaining()), prime));
    a0.push_back(agg);
    last = std::max(last, t);
  }
  s.views[kServerId].aggregated_shares = shares.size();
  std::sort(a0.begin(), a0.end());
  result_.surviving_aggregators = a0;
  result_.finish_time = a0.size() == result_.aggregators.size() ? last : deadline;
  const std::size_t t_r = s.sharing->reconstruction_threshold();
  if (shares.size() < t_r) {
    throw ReconstructionFailureError("round 2: " + std::to_string(shares.size()) +
                                     " aggregated shares, need t_r = " + std::to_string(t_r));
  }
  result_.sum = secret_reconstruct(shares, *s.sharing, cfg_.m);
  for (auto& [id, v] : s.views) v.has_final_sum = true;

  result_.oracle_sum = FieldVector(prime, cfg_.m);
  result_.oracle_real.assign(cfg_.m, 0.0);
  for (std::uint64_t id : u0) {
    add_into(result_.oracle_sum, s.quantized.at(id));
    const std::vector<double>& x = s.clipped.at(id);
    for (std::size_t k = 0; k < cfg_.m; ++k) result_.oracle_real[k] += x[k];
  }
  result_.sum_real = dequantize_sum(result_.sum, u0.size(), result_.quantizer);
  return result_.sum;
}

const RunResult& Simulation::run() {
  if (impl_->stage == 0) run_round0();
  if (impl_->stage == 1) run_round1();
  if (impl_->stage == 2) run_round2();
  return result_;
}

AuditReport transcript_audit(const Simulation& sim) {
  AuditReport rep;
  const RunResult& res = sim.result();
  rep.corruption_threshold = res.committee.t_c;
  const std::set<std::uint64_t>& bad = sim.corrupted();
  const std::set<std::uint64_t> aggs(res.aggregators.begin(), res.aggregators.end());
  rep.coalition_size = 1 + bad.size();
  for (std::uint64_t id : bad) rep.corrupted_aggregators += aggs.count(id);

  // Every share ciphertext passes through the server; a corrupted addressee
  // can open it, nobody else in the coalition can.
  std::map<std::uint64_t, std::size_t> opened;
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  const std::vector<PartyView> views = sim.coalition_views();
  for (const PartyView& v : views) {
    for (const Ciphertext& ct : v.inbox) {
      if (!seen.insert({ct.from, ct.to}).second) continue;
      ++rep.ciphertexts_checked;
      try {
        sim.open_as(kServerId, ct.from, ct.bytes);
        ++rep.server_decryptions;
      } catch (const AuthenticationError&) {
      }
      if (bad.count(ct.to)) {
        try {
          sim.open_as(ct.to, ct.from, ct.bytes);
          if (!bad.count(ct.from)) ++opened[ct.from];
        } catch (const AuthenticationError&) {
          rep.findings.push_back("corrupted addressee could not open its own share");
        }
      }
    }
  }
  for (const auto& [client, k] : opened) {
    rep.max_shares_per_client = std::max(rep.max_shares_per_client, k);
  }
  if (rep.server_decryptions > 0) {
    rep.findings.push_back("server opened " + std::to_string(rep.server_decryptions) +
                           " share ciphertexts");
  }
  if (rep.max_shares_per_client > rep.corruption_threshold) {
    rep.threshold_exceeded = true;
    rep.findings.push_back("coalition holds " + std::to_string(rep.max_shares_per_client) +
                           " shares of one client, above t_c = " +
                           std::to_string(rep.corruption_threshold));
  }
  if (res.survivors.size() < 2 && !res.sum.elems().empty()) {
    rep.final_sum_only = false;
    rep.findings.push_back("the sum covers a single client");
  }
  rep.clean = !rep.threshold_exceeded && rep.server_decryptions == 0 && rep.final_sum_only;
  return rep;
}

}  // namespace disagg
