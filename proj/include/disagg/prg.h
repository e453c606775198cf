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

#ifndef DISAGG_PRG_H_
#define DISAGG_PRG_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

#include "disagg/field.h"

namespace disagg {

using SeedKey = std::array<std::uint8_t, 32>;

// Seeded ChaCha20 keystream. Every random choice in the library is drawn
// from one of these so runs are reproducible from their seeds.
// Satisfies UniformRandomBitGenerator.
class Prg {
 public:
  using result_type = std::uint64_t;

  explicit Prg(std::uint64_t seed);
  explicit Prg(const SeedKey& key);

  // Independent child stream for (seed, label, index).
  static Prg Derive(std::uint64_t seed, std::string_view label,
                    std::uint64_t index = 0);

  // Test-only source that yields nothing but zero bytes.
  static Prg Zero();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

  void fill(std::span<std::uint8_t> out);

  // Uniform in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);
  // Uniform in [lo, hi).
  double uniform_real(double lo, double hi);
  FieldElement uniform(const FieldPrime& prime);

 private:
  void refill();

  SeedKey key_{};
  std::uint64_t block_ = 0;
  std::array<std::uint8_t, 1024> buf_{};
  std::size_t pos_ = sizeof(buf_);
  bool zero_ = false;
};

}  // namespace disagg

#endif  // DISAGG_PRG_H_
