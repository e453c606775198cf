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

#ifndef DISAGG_FIELD_H_
#define DISAGG_FIELD_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace disagg {

using uint128 = unsigned __int128;

// 2^128 - 159, the largest prime below 2^128.
inline constexpr uint128 kDefaultPrime = ~static_cast<uint128>(0) - 158;

std::string Uint128ToString(uint128 v);
// Accepts decimal or 0x-prefixed hex. Throws FormatError.
uint128 ParseUint128(std::string_view text);

// Canonical representative in [0, p). The type does not carry its modulus;
// arithmetic goes through FieldPrime.
class FieldElement {
 public:
  constexpr FieldElement() = default;
  constexpr explicit FieldElement(uint128 value) : value_(value) {}

  constexpr uint128 value() const { return value_; }
  constexpr bool is_zero() const { return value_ == 0; }

  friend constexpr bool operator==(FieldElement, FieldElement) = default;
  friend constexpr auto operator<=>(FieldElement a, FieldElement b) {
    return a.value_ <=> b.value_;
  }

 private:
  uint128 value_ = 0;
};

// Prime modulus together with the reduction strategy that suits it:
// native 128-bit remainder below 2^64, folding for p = 2^128 - c with small
// c, and a 256-bit fallback for everything else.
class FieldPrime {
 public:
  // Throws ParameterError if `modulus` is not prime. Below 2^64 the test is
  // deterministic Miller-Rabin; above it uses 32 fixed bases.
  explicit FieldPrime(uint128 modulus);

  static const FieldPrime& Default();

  uint128 modulus() const { return p_; }
  unsigned bit_length() const;

  // Reduces an arbitrary integer into the field.
  FieldElement element(uint128 v) const;
  FieldElement from_signed(std::int64_t v) const;

  FieldElement add(FieldElement a, FieldElement b) const {
    uint128 s = a.value() + b.value();
    if (s < a.value() || s >= p_) s -= p_;
    return FieldElement(s);
  }
  FieldElement sub(FieldElement a, FieldElement b) const {
    return FieldElement(a.value() >= b.value() ? a.value() - b.value()
                                               : a.value() + (p_ - b.value()));
  }
  FieldElement neg(FieldElement a) const {
    return FieldElement(a.is_zero() ? 0 : p_ - a.value());
  }
  FieldElement mul(FieldElement a, FieldElement b) const;
  FieldElement pow(FieldElement base, uint128 exponent) const;
  // Throws NoInverseError for zero.
  FieldElement inv(FieldElement a) const;

  friend bool operator==(const FieldPrime& a, const FieldPrime& b) {
    return a.p_ == b.p_;
  }

 private:
  enum class Reduction { kNative, kPseudoMersenne, kWide };

  uint128 p_;
  uint128 c_ = 0;  // 2^128 - p for kPseudoMersenne
  Reduction kind_;
};

class FieldVector {
 public:
  explicit FieldVector(const FieldPrime& prime, std::size_t size = 0);
  // Throws InvalidValueError if any element is not canonical.
  FieldVector(const FieldPrime& prime, std::vector<FieldElement> elems);

  const FieldPrime& prime() const { return prime_; }
  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }

  FieldElement operator[](std::size_t i) const { return elems_[i]; }
  // Writers must keep values canonical.
  FieldElement& operator[](std::size_t i) { return elems_[i]; }

  std::span<const FieldElement> elems() const { return elems_; }
  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }

  void resize(std::size_t n) { elems_.resize(n); }

  friend bool operator==(const FieldVector& a, const FieldVector& b) {
    return a.prime_ == b.prime_ && a.elems_ == b.elems_;
  }

 private:
  FieldPrime prime_;
  std::vector<FieldElement> elems_;
};

// Elementwise sum. Throws DimensionError on length or modulus mismatch.
FieldVector add_vec(const FieldVector& a, const FieldVector& b);
void add_into(FieldVector& acc, const FieldVector& b);

FieldElement mod_inverse(const FieldPrime& prime, FieldElement a);

// L_k(target) for each node, i.e. prod_{m != k} (target - x_m) / (x_k - x_m).
// Throws DegenerateBasisError if two nodes coincide.
std::vector<FieldElement> lagrange_coeffs(const FieldPrime& prime,
                                          std::span<const FieldElement> nodes,
                                          FieldElement target);

}  // namespace disagg

#endif  // DISAGG_FIELD_H_
