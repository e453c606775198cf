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

#ifndef DISAGG_CHANNEL_H_
#define DISAGG_CHANNEL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "disagg/prg.h"

namespace disagg {

using PublicKey = std::array<std::uint8_t, 32>;
using SecretKey = std::array<std::uint8_t, 32>;

struct KeyPair {
  PublicKey pk{};
  SecretKey sk{};
};

// Authenticated channel between two key holders. Both ends derive the same
// key; the direction byte in each nonce keeps their streams apart.
// Ciphertext layout: nonce (24 bytes) | body | tag.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual std::vector<std::uint8_t> seal(std::span<const std::uint8_t> plaintext) = 0;
  // Throws AuthenticationError if the tag does not verify.
  virtual std::vector<std::uint8_t> open(std::span<const std::uint8_t> ciphertext) const = 0;
};

class ChannelBackend {
 public:
  virtual ~ChannelBackend() = default;
  virtual std::string_view name() const = 0;
  // Deterministic in the PRG state.
  virtual KeyPair keygen(Prg& rng) const = 0;
  virtual std::unique_ptr<Channel> connect(const KeyPair& self,
                                           const PublicKey& peer) const = 0;
  // Ciphertext bytes minus plaintext bytes.
  virtual std::size_t overhead() const = 0;
};

// X25519 + XSalsa20-Poly1305 via libsodium's crypto_box.
std::unique_ptr<ChannelBackend> MakeSodiumBackend();
// Toy Diffie-Hellman in Z_p with a BLAKE2b keystream and tag. Not secure;
// its only job is reproducible transcripts in tests.
std::unique_ptr<ChannelBackend> MakeTestBackend();
// "sodium" or "test". Throws InvalidValueError otherwise.
std::unique_ptr<ChannelBackend> MakeChannelBackend(std::string_view name);

}  // namespace disagg

#endif  // DISAGG_CHANNEL_H_
