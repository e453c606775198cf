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

#include "disagg/field.h"

#include <algorithm>
#include <array>

#include <boost/multiprecision/cpp_int.hpp>

#include "disagg/errors.h"

namespace disagg {
namespace {

constexpr uint128 kTwo64 = static_cast<uint128>(1) << 64;

struct Wide {
  uint128 hi;
  uint128 lo;
};

Wide MulWide(uint128 a, uint128 b) {
  const std::uint64_t a0 = static_cast<std::uint64_t>(a);
  const std::uint64_t a1 = static_cast<std::uint64_t>(a >> 64);
  const std::uint64_t b0 = static_cast<std::uint64_t>(b);
  const std::uint64_t b1 = static_cast<std::uint64_t>(b >> 64);
  const uint128 p00 = static_cast<uint128>(a0) * b0;
  const uint128 p01 = static_cast<uint128>(a0) * b1;
  const uint128 p10 = static_cast<uint128>(a1) * b0;
  const uint128 p11 = static_cast<uint128>(a1) * b1;
  const uint128 mid = (p00 >> 64) + static_cast<std::uint64_t>(p01) +
                      static_cast<std::uint64_t>(p10);
  Wide w;
  w.lo = static_cast<std::uint64_t>(p00) | (mid << 64);
  w.hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
  return w;
}

using boost::multiprecision::uint256_t;

uint256_t ToBig(uint128 v) {
  uint256_t r = static_cast<std::uint64_t>(v >> 64);
  r <<= 64;
  r |= static_cast<std::uint64_t>(v);
  return r;
}

uint128 FromBig(const uint256_t& v) {
  const std::uint64_t lo = static_cast<std::uint64_t>(v & 0xFFFFFFFFFFFFFFFFull);
  const std::uint64_t hi =
      static_cast<std::uint64_t>((v >> 64) & 0xFFFFFFFFFFFFFFFFull);
  return (static_cast<uint128>(hi) << 64) | lo;
}

bool IsProbablePrime(const FieldPrime& f) {
  const uint128 n = f.modulus();
  // Deterministic for n < 2^64 (Jaeschke / Sinclair base set); above that the
  // first 32 primes give error probability far below 2^-64.
  static constexpr std::array<std::uint64_t, 7> kSmallBases = {
      2, 325, 9375, 28178, 450775, 9780504, 1795265022};
  static constexpr std::array<std::uint64_t, 32> kLargeBases = {
      2,  3,  5,  7,  11, 13, 17, 19, 23,  29,  31,  37,  41,  43,  47,  53,
      59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};
  uint128 d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  auto witness = [&](uint128 a) {
    a %= n;
    if (a == 0) return false;
    FieldElement x = f.pow(FieldElement(a), d);
    if (x.value() == 1 || x.value() == n - 1) return false;
    for (unsigned r = 1; r < s; ++r) {
      x = f.mul(x, x);
      if (x.value() == n - 1) return false;
    }
    return true;
  };
  if (n < kTwo64) {
    for (auto a : kSmallBases)
      if (witness(a)) return false;
  } else {
    for (auto a : kLargeBases)
      if (witness(a)) return false;
  }
  return true;
}

}  // namespace

std::string Uint128ToString(uint128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

uint128 ParseUint128(std::string_view text) {
  if (text.empty()) throw FormatError("empty integer literal");
  unsigned base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    base = 16;
    text.remove_prefix(2);
  }
  uint128 v = 0;
  const uint128 limit = ~static_cast<uint128>(0);
  for (char ch : text) {
    unsigned digit;
    if (ch >= '0' && ch <= '9') {
      digit = static_cast<unsigned>(ch - '0');
    } else if (base == 16 && ch >= 'a' && ch <= 'f') {
      digit = static_cast<unsigned>(ch - 'a' + 10);
    } else if (base == 16 && ch >= 'A' && ch <= 'F') {
      digit = static_cast<unsigned>(ch - 'A' + 10);
    } else {
      throw FormatError("invalid digit in integer literal: " + std::string(text));
    }
    if (digit >= base) throw FormatError("invalid digit: " + std::string(text));
    if (v > (limit - digit) / base)
      throw FormatError("integer literal exceeds 128 bits");
    v = v * base + digit;
  }
  return v;
}

FieldPrime::FieldPrime(uint128 modulus) : p_(modulus) {
  if (modulus < 2) throw ParameterError("field modulus must be at least 2");
  if (modulus < kTwo64) {
    kind_ = Reduction::kNative;
  } else if (const uint128 c = ~static_cast<uint128>(0) - modulus + 1;
             c < kTwo64) {
    kind_ = Reduction::kPseudoMersenne;
    c_ = c;
  } else {
    kind_ = Reduction::kWide;
  }
  if (modulus == kDefaultPrime) return;  // vetted constant
  if (modulus != 2 && (modulus & 1) == 0)
    throw ParameterError("field modulus is even");
  if (modulus > 3 && !IsProbablePrime(*this))
    throw ParameterError("field modulus " + Uint128ToString(modulus) +
                         " is not prime");
}

const FieldPrime& FieldPrime::Default() {
  static const FieldPrime prime(kDefaultPrime);
  return prime;
}

unsigned FieldPrime::bit_length() const {
  unsigned bits = 0;
  for (uint128 v = p_; v != 0; v >>= 1) ++bits;
  return bits;
}

FieldElement FieldPrime::element(uint128 v) const {
  return FieldElement(v % p_);
}

FieldElement FieldPrime::from_signed(std::int64_t v) const {
  if (v >= 0) return element(static_cast<uint128>(v));
  const uint128 mag = static_cast<uint128>(-(v + 1)) + 1;
  return neg(element(mag));
}

FieldElement FieldPrime::mul(FieldElement a, FieldElement b) const {
  switch (kind_) {
    case Reduction::kNative:
      return FieldElement((a.value() * b.value()) % p_);
    case Reduction::kPseudoMersenne: {
      // x = hi * 2^128 + lo == hi * c + lo (mod p), folded twice.
      const Wide x = MulWide(a.value(), b.value());
      const Wide y = MulWide(x.hi, c_);  // y.hi < 2^64
      uint128 s = y.lo + x.lo;
      uint128 top = y.hi + (s < x.lo ? 1 : 0);
      const uint128 fold = top * c_;  // top <= 2^64, c < 2^64
      const uint128 t = s + fold;
      s = t;
      if (t < fold) s += c_;  // one more 2^128 wrap; cannot overflow again
      while (s >= p_) s -= p_;
      return FieldElement(s);
    }
    case Reduction::kWide:
      return FieldElement(FromBig((ToBig(a.value()) * ToBig(b.value())) % ToBig(p_)));
  }
  return FieldElement();
}

FieldElement FieldPrime::pow(FieldElement base, uint128 exponent) const {
  FieldElement result(p_ == 1 ? 0 : 1);
  while (exponent != 0) {
    if (exponent & 1) result = mul(result, base);
    base = mul(base, base);
    exponent >>= 1;
  }
  return result;
}

FieldElement FieldPrime::inv(FieldElement a) const {
  if (a.is_zero()) throw NoInverseError("zero has no multiplicative inverse");
  return pow(a, p_ - 2);
}

FieldVector::FieldVector(const FieldPrime& prime, std::size_t size)
    : prime_(prime), elems_(size) {}

FieldVector::FieldVector(const FieldPrime& prime, std::vector<FieldElement> elems)
    : prime_(prime), elems_(std::move(elems)) {
  for (const auto& e : elems_) {
    if (e.value() >= prime_.modulus())
      throw InvalidValueError("field element " + Uint128ToString(e.value()) +
                              " is not reduced modulo " +
                              Uint128ToString(prime_.modulus()));
  }
}

void add_into(FieldVector& acc, const FieldVector& b) {
  if (!(acc.prime() == b.prime()))
    throw DimensionError("vectors belong to different fields");
  if (acc.size() != b.size())
    throw DimensionError("vector lengths differ: " + std::to_string(acc.size()) +
                         " vs " + std::to_string(b.size()));
  const FieldPrime& f = acc.prime();
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = f.add(acc[i], b[i]);
}

FieldVector add_vec(const FieldVector& a, const FieldVector& b) {
  FieldVector out = a;
  add_into(out, b);
  return out;
}

FieldElement mod_inverse(const FieldPrime& prime, FieldElement a) {
  return prime.inv(a);
}

std::vector<FieldElement> lagrange_coeffs(const FieldPrime& prime,
                                          std::span<const FieldElement> nodes,
                                          FieldElement target) {
  const std::size_t k = nodes.size();
  std::vector<FieldElement> num(k, FieldElement(1));
  std::vector<FieldElement> den(k, FieldElement(1));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t m = 0; m < k; ++m) {
      if (m == i) continue;
      const FieldElement diff = prime.sub(nodes[i], nodes[m]);
      if (diff.is_zero())
        throw DegenerateBasisError("interpolation nodes " + std::to_string(i) +
                                   " and " + std::to_string(m) + " coincide");
      num[i] = prime.mul(num[i], prime.sub(target, nodes[m]));
      den[i] = prime.mul(den[i], diff);
    }
  }
  // Batch inversion: one field inverse for all denominators.
  std::vector<FieldElement> prefix(k + 1, FieldElement(1));
  for (std::size_t i = 0; i < k; ++i) prefix[i + 1] = prime.mul(prefix[i], den[i]);
  FieldElement running = k == 0 ? FieldElement(1) : prime.inv(prefix[k]);
  std::vector<FieldElement> out(k);
  for (std::size_t i = k; i-- > 0;) {
    const FieldElement inv_i = prime.mul(running, prefix[i]);
    running = prime.mul(running, den[i]);
    out[i] = prime.mul(num[i], inv_i);
  }
  return out;
}

}  // namespace disagg
