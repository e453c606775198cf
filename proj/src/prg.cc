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

#include "disagg/prg.h"

#include <cstring>
#include <string>

#include <sodium.h>

#include "disagg/errors.h"

namespace disagg {
namespace {

void EnsureSodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw Error("libsodium initialisation failed");
}

SeedKey HashSeed(std::string_view domain, std::uint64_t seed,
                 std::uint64_t index) {
  EnsureSodium();
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, 32);
  crypto_generichash_update(&st, reinterpret_cast<const unsigned char*>(domain.data()),
                            domain.size());
  std::uint8_t le[16];
  for (int i = 0; i < 8; ++i) {
    le[i] = static_cast<std::uint8_t>(seed >> (8 * i));
    le[8 + i] = static_cast<std::uint8_t>(index >> (8 * i));
  }
  crypto_generichash_update(&st, le, sizeof(le));
  SeedKey key;
  crypto_generichash_final(&st, key.data(), key.size());
  return key;
}

}  // namespace

Prg::Prg(std::uint64_t seed) : key_(HashSeed("disagg.prg", seed, 0)) {}

Prg::Prg(const SeedKey& key) : key_(key) { EnsureSodium(); }

Prg Prg::Derive(std::uint64_t seed, std::string_view label, std::uint64_t index) {
  std::string domain = "disagg.prg/";
  domain.append(label);
  return Prg(HashSeed(domain, seed, index));
}

Prg Prg::Zero() {
  Prg prg(SeedKey{});
  prg.zero_ = true;
  return prg;
}

void Prg::refill() {
  if (zero_) {
    buf_.fill(0);
  } else {
    static constexpr std::uint8_t kNonce[crypto_stream_chacha20_NONCEBYTES] = {};
    buf_.fill(0);
    // 64-byte ChaCha blocks; block_ is the running block counter.
    crypto_stream_chacha20_xor_ic(buf_.data(), buf_.data(), buf_.size(), kNonce,
                                  block_, key_.data());
    block_ += buf_.size() / 64;
  }
  pos_ = 0;
}

void Prg::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (pos_ == buf_.size()) refill();
    const std::size_t n = std::min(out.size() - done, buf_.size() - pos_);
    std::memcpy(out.data() + done, buf_.data() + pos_, n);
    pos_ += n;
    done += n;
  }
}

Prg::result_type Prg::operator()() {
  std::uint8_t b[8];
  fill(b);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t Prg::below(std::uint64_t n) {
  if (n == 0) throw ParameterError("Prg::below needs a positive bound");
  if (zero_) return 0;
  // Lemire-style rejection to avoid modulo bias.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = (*this)();
    if (r >= threshold) return r % n;
  }
}

double Prg::uniform_real(double lo, double hi) {
  const double unit = static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

FieldElement Prg::uniform(const FieldPrime& prime) {
  const unsigned bits = prime.bit_length();
  const uint128 mask =
      bits >= 128 ? ~static_cast<uint128>(0) : (static_cast<uint128>(1) << bits) - 1;
  for (;;) {
    const uint128 hi = (*this)();
    const uint128 lo = (*this)();
    const uint128 v = ((hi << 64) | lo) & mask;
    if (v < prime.modulus()) return FieldElement(v);
  }
}

}  // namespace disagg
