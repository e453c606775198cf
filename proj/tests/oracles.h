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
// Exact reference computations shared by the unit tests and the acceptance
// runner. Nothing here calls into the library's probability code.

#ifndef DISAGG_TESTS_ORACLES_H_
#define DISAGG_TESTS_ORACLES_H_

#include <cstdint>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace disagg::oracle {

using boost::multiprecision::cpp_int;
using BigFloat = boost::multiprecision::cpp_bin_float_50;

// weights[k] = C(K, k) C(N - K, A - k); total = C(N, A).
struct Hypergeom {
  std::vector<cpp_int> weights;
  cpp_int total;

  Hypergeom(std::uint64_t n, std::uint64_t k_succ, std::uint64_t a) : weights(a + 1) {
    // C(K, k) and C(N - K, A - k) by exact multiplicative recurrences.
    std::vector<cpp_int> ck(a + 1, 0), cr(a + 1, 0);
    cpp_int c = 1;
    for (std::uint64_t k = 0; k <= a; ++k) {
      if (k > k_succ) break;
      ck[k] = c;
      c = c * (k_succ - k) / (k + 1);
    }
    const std::uint64_t rest = n - k_succ;
    c = 1;
    for (std::uint64_t j = 0; j <= a; ++j) {
      if (j > rest) break;
      cr[j] = c;
      c = c * (rest - j) / (j + 1);
    }
    for (std::uint64_t k = 0; k <= a; ++k) weights[k] = ck[k] * cr[a - k];
    total = 0;
    for (const cpp_int& w : weights) total += w;
  }

  cpp_int upper_weight(std::uint64_t t) const {
    cpp_int s = 0;
    for (std::uint64_t k = t; k < weights.size(); ++k) s += weights[k];
    return s;
  }
  cpp_int lower_weight(std::int64_t t) const {
    cpp_int s = 0;
    for (std::int64_t k = 0; k <= t && k < static_cast<std::int64_t>(weights.size()); ++k) {
      s += weights[k];
    }
    return s;
  }
  double pmf(std::uint64_t k) const {
    return k < weights.size() ? Ratio(weights[k], total) : 0.0;
  }
  double upper(std::uint64_t t) const { return Ratio(upper_weight(t), total); }
  double lower(std::int64_t t) const { return Ratio(lower_weight(t), total); }

  static double Ratio(const cpp_int& num, const cpp_int& den) {
    return static_cast<double>(BigFloat(num) / BigFloat(den));
  }
};

// num / den < 2^-kappa, decided exactly.
inline bool BelowPow2(const cpp_int& num, const cpp_int& den, unsigned kappa) {
  return (num << kappa) < den;
}

// Pr(X_c + X_d >= ceil(A/3)) for independent X_c, X_d: exact numerator
// and denominator.
struct BftTail {
  cpp_int num;
  cpp_int den;
  double value() const { return Hypergeom::Ratio(num, den); }
};

inline BftTail ConvolvedBft(std::uint64_t n, std::uint64_t kc, std::uint64_t kd,
                            std::uint64_t a) {
  const Hypergeom c(n, kc, a), d(n, kd, a);
  const std::uint64_t need = (a + 2) / 3;
  BftTail out{0, c.total * d.total};
  for (std::uint64_t i = 0; i <= a; ++i) {
    if (c.weights[i] == 0) continue;
    const std::uint64_t j0 = need > i ? need - i : 0;
    out.num += c.weights[i] * d.upper_weight(j0);
  }
  return out;
}

struct Committee {
  std::uint64_t a = 0;
  std::uint64_t t_c = 0;
  std::uint64_t t_r = 0;
};

// Smallest t_c in [1, A) whose upper tail is below 2^-kappa_c, or A. The
// tail grows as t falls, so the scan runs downward from A - 1.
inline std::uint64_t ExactCorruptionThreshold(const Hypergeom& hc, std::uint64_t a,
                                              unsigned kappa_c) {
  cpp_int suffix = hc.weights[a];
  std::uint64_t best = a;
  for (std::uint64_t t = a - 1; t >= 1; --t) {
    suffix += hc.weights[t];
    if (!BelowPow2(suffix, hc.total, kappa_c)) break;
    best = t;
  }
  return best;
}

// Plain scan over A = rho + 2 .. N with exact integer tail comparisons.
// kc, ks: corrupt and surviving client counts.
inline std::optional<Committee> BruteForceSolve(std::uint64_t n, std::uint64_t kc,
                                                std::uint64_t ks, std::uint64_t kd,
                                                unsigned kappa_c, unsigned kappa_s,
                                                std::uint64_t rho, bool bft) {
  for (std::uint64_t a = rho + 2; a <= n; ++a) {
    const Hypergeom hc(n, kc, a);
    const std::uint64_t t_c = ExactCorruptionThreshold(hc, a, kappa_c);
    const std::uint64_t t_r = t_c + rho;
    if (t_r >= a) continue;
    const Hypergeom hs(n, ks, a);
    if (!BelowPow2(hs.lower_weight(static_cast<std::int64_t>(t_r) - 1), hs.total, kappa_s)) {
      continue;
    }
    if (bft) {
      const BftTail b = ConvolvedBft(n, kc, kd, a);
      if (!BelowPow2(b.num, b.den, kappa_c)) continue;
    }
    return Committee{a, t_c, t_r};
  }
  return std::nullopt;
}

// Whether A is feasible for rho, with exact arithmetic; used to confirm
// frozen values at large N without a full scan.
inline bool ExactFeasible(std::uint64_t n, std::uint64_t kc, std::uint64_t ks,
                          unsigned kappa_c, unsigned kappa_s, std::uint64_t rho,
                          std::uint64_t a, Committee* out = nullptr) {
  const Hypergeom hc(n, kc, a);
  const std::uint64_t t_c = ExactCorruptionThreshold(hc, a, kappa_c);
  const std::uint64_t t_r = t_c + rho;
  if (t_r >= a) return false;
  const Hypergeom hs(n, ks, a);
  if (!BelowPow2(hs.lower_weight(static_cast<std::int64_t>(t_r) - 1), hs.total, kappa_s)) {
    return false;
  }
  if (out) *out = Committee{a, t_c, t_r};
  return true;
}

}  // namespace disagg::oracle

#endif  // DISAGG_TESTS_ORACLES_H_
