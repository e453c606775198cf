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

#include "disagg/channel.h"

#include <sodium.h>

#include <algorithm>
#include <cstring>
#include <string>

#include "disagg/errors.h"
#include "disagg/field.h"

namespace disagg {
namespace {

constexpr std::size_t kNonceBytes = 24;
constexpr std::size_t kTagBytes = 16;
static_assert(crypto_box_NONCEBYTES == kNonceBytes);
static_assert(crypto_box_MACBYTES == kTagBytes);
static_assert(crypto_box_PUBLICKEYBYTES == 32 && crypto_box_SECRETKEYBYTES == 32);

void EnsureSodium() {
  if (sodium_init() < 0) throw Error("libsodium initialisation failed");
}

// Nonce: direction byte, 64-bit counter, zero fill.
struct NonceState {
  std::uint8_t direction = 0;
  std::uint64_t counter = 0;

  std::array<std::uint8_t, kNonceBytes> next() {
    std::array<std::uint8_t, kNonceBytes> n{};
    n[0] = direction;
    for (int i = 0; i < 8; ++i) n[1 + i] = static_cast<std::uint8_t>(counter >> (8 * i));
    ++counter;
    return n;
  }
};

std::uint8_t Direction(const PublicKey& self, const PublicKey& peer) {
  return std::lexicographical_compare(self.begin(), self.end(), peer.begin(), peer.end())
             ? 0
             : 1;
}

void CheckSize(std::span<const std::uint8_t> ct) {
  if (ct.size() < kNonceBytes + kTagBytes) {
    throw AuthenticationError("channel: ciphertext too short");
  }
}

class SodiumChannel : public Channel {
 public:
  SodiumChannel(const KeyPair& self, const PublicKey& peer) {
    if (crypto_box_beforenm(key_.data(), peer.data(), self.sk.data()) != 0) {
      throw AuthenticationError("channel: key agreement rejected peer key");
    }
    nonce_.direction = Direction(self.pk, peer);
  }
  ~SodiumChannel() override { sodium_memzero(key_.data(), key_.size()); }

  std::vector<std::uint8_t> seal(std::span<const std::uint8_t> pt) override {
    const auto nonce = nonce_.next();
    std::vector<std::uint8_t> out(kNonceBytes + pt.size() + kTagBytes);
    std::copy(nonce.begin(), nonce.end(), out.begin());
    crypto_box_easy_afternm(out.data() + kNonceBytes, pt.data(), pt.size(), nonce.data(),
                            key_.data());
    return out;
  }

  std::vector<std::uint8_t> open(std::span<const std::uint8_t> ct) const override {
    CheckSize(ct);
    std::vector<std::uint8_t> out(ct.size() - kNonceBytes - kTagBytes);
    if (crypto_box_open_easy_afternm(out.data(), ct.data() + kNonceBytes,
                                     ct.size() - kNonceBytes, ct.data(),
                                     key_.data()) != 0) {
      throw AuthenticationError("channel: authentication failed");
    }
    return out;
  }

 private:
  std::array<std::uint8_t, crypto_box_BEFORENMBYTES> key_{};
  NonceState nonce_;
};

class SodiumBackend : public ChannelBackend {
 public:
  SodiumBackend() { EnsureSodium(); }
  std::string_view name() const override { return "sodium"; }
  KeyPair keygen(Prg& rng) const override {
    std::array<std::uint8_t, crypto_box_SEEDBYTES> seed{};
    rng.fill(seed);
    KeyPair kp;
    crypto_box_seed_keypair(kp.pk.data(), kp.sk.data(), seed.data());
    sodium_memzero(seed.data(), seed.size());
    return kp;
  }
  std::unique_ptr<Channel> connect(const KeyPair& self, const PublicKey& peer) const override {
    return std::make_unique<SodiumChannel>(self, peer);
  }
  std::size_t overhead() const override { return kNonceBytes + kTagBytes; }
};

// Toy group: Z_p^* with p = 2^128 - 159 and generator 5.
const FieldPrime& ToyGroup() {
  static const FieldPrime p = FieldPrime::Default();
  return p;
}

uint128 Load128(const std::uint8_t* b) {
  uint128 v = 0;
  for (int i = 15; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

void Store128(uint128 v, std::uint8_t* b) {
  for (int i = 0; i < 16; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

using MacKey = std::array<std::uint8_t, 32>;

void Keyed(const MacKey& key, std::span<const std::uint8_t> a,
           std::span<const std::uint8_t> b, std::span<std::uint8_t> out) {
  crypto_generichash_state st;
  crypto_generichash_init(&st, key.data(), key.size(), out.size());
  crypto_generichash_update(&st, a.data(), a.size());
  crypto_generichash_update(&st, b.data(), b.size());
  crypto_generichash_final(&st, out.data(), out.size());
}

class TestChannel : public Channel {
 public:
  TestChannel(const KeyPair& self, const PublicKey& peer) {
    const FieldPrime& g = ToyGroup();
    const uint128 peer_pub = Load128(peer.data());
    if (peer_pub <= 1 || peer_pub >= g.modulus()) {
      throw AuthenticationError("channel: invalid peer key");
    }
    const uint128 shared = g.pow(FieldElement(peer_pub), Load128(self.sk.data())).value();
    std::array<std::uint8_t, 16> s{};
    Store128(shared, s.data());
    const std::string_view enc_label = "disagg.test.enc";
    const std::string_view mac_label = "disagg.test.mac";
    crypto_generichash(enc_key_.data(), enc_key_.size(), s.data(), s.size(),
                       reinterpret_cast<const unsigned char*>(enc_label.data()),
                       enc_label.size());
    crypto_generichash(mac_key_.data(), mac_key_.size(), s.data(), s.size(),
                       reinterpret_cast<const unsigned char*>(mac_label.data()),
                       mac_label.size());
    nonce_.direction = Direction(self.pk, peer);
  }

  std::vector<std::uint8_t> seal(std::span<const std::uint8_t> pt) override {
    const auto nonce = nonce_.next();
    std::vector<std::uint8_t> out(kNonceBytes + pt.size() + kTagBytes);
    std::copy(nonce.begin(), nonce.end(), out.begin());
    Xor(nonce, pt, std::span(out).subspan(kNonceBytes, pt.size()));
    Keyed(mac_key_, nonce, std::span(out).subspan(kNonceBytes, pt.size()),
          std::span(out).subspan(kNonceBytes + pt.size(), kTagBytes));
    return out;
  }

  std::vector<std::uint8_t> open(std::span<const std::uint8_t> ct) const override {
    CheckSize(ct);
    const std::size_t len = ct.size() - kNonceBytes - kTagBytes;
    const auto nonce = ct.subspan(0, kNonceBytes);
    const auto body = ct.subspan(kNonceBytes, len);
    std::array<std::uint8_t, kTagBytes> tag{};
    Keyed(mac_key_, nonce, body, tag);
    if (sodium_memcmp(tag.data(), ct.data() + kNonceBytes + len, kTagBytes) != 0) {
      throw AuthenticationError("channel: authentication failed");
    }
    std::vector<std::uint8_t> out(len);
    Xor(nonce, body, out);
    return out;
  }

 private:
  // BLAKE2b(enc_key, nonce || block) in 64-byte blocks.
  void Xor(std::span<const std::uint8_t> nonce, std::span<const std::uint8_t> in,
           std::span<std::uint8_t> out) const {
    std::array<std::uint8_t, 64> block{};
    std::array<std::uint8_t, kNonceBytes + 8> input{};
    std::copy(nonce.begin(), nonce.end(), input.begin());
    for (std::size_t off = 0, idx = 0; off < in.size(); off += block.size(), ++idx) {
      for (int i = 0; i < 8; ++i) {
        input[kNonceBytes + i] = static_cast<std::uint8_t>(idx >> (8 * i));
      }
      crypto_generichash(block.data(), block.size(), input.data(), input.size(),
                         enc_key_.data(), enc_key_.size());
      const std::size_t n = std::min(block.size(), in.size() - off);
      for (std::size_t i = 0; i < n; ++i) out[off + i] = in[off + i] ^ block[i];
    }
  }

  MacKey enc_key_{};
  MacKey mac_key_{};
  NonceState nonce_;
};

class TestBackend : public ChannelBackend {
 public:
  TestBackend() { EnsureSodium(); }
  std::string_view name() const override { return "test"; }
  KeyPair keygen(Prg& rng) const override {
    const FieldPrime& g = ToyGroup();
    uint128 sk = 0;
    while (sk == 0) sk = rng.uniform(g).value();
    KeyPair kp;
    Store128(sk, kp.sk.data());
    Store128(g.pow(g.element(5), sk).value(), kp.pk.data());
    return kp;
  }
  std::unique_ptr<Channel> connect(const KeyPair& self, const PublicKey& peer) const override {
    return std::make_unique<TestChannel>(self, peer);
  }
  std::size_t overhead() const override { return kNonceBytes + kTagBytes; }
};

}  // namespace

std::unique_ptr<ChannelBackend> MakeSodiumBackend() {
  return std::make_unique<SodiumBackend>();
}

std::unique_ptr<ChannelBackend> MakeTestBackend() {
  return std::make_unique<TestBackend>();
}

std::unique_ptr<ChannelBackend> MakeChannelBackend(std::string_view name) {
  if (name == "sodium") return MakeSodiumBackend();
  if (name == "test") return MakeTestBackend();
  throw InvalidValueError("unknown channel backend '" + std::string(name) + "'");
}

}  // namespace disagg
