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

#ifndef DISAGG_QUANTIZE_H_
#define DISAGG_QUANTIZE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "disagg/field.h"

namespace disagg {

unsigned CeilLog2(std::uint64_t n);

// Fixed-point encoding of clipped reals into [0, 2^b - 1], embedded in a
// field large enough that a sum of 2^headroom_bits encodings never wraps.
struct QuantizerConfig {
  double clip = 2.0;
  unsigned plaintext_bits = 0;
  unsigned headroom_bits = 0;
  FieldPrime prime = FieldPrime::Default();

  // b defaults to 53 - ceil(log2 n_clients), the precision that survives
  // LWR rounding in OPA, so both protocols see identical inputs.
  static QuantizerConfig ForCohort(std::size_t n_clients,
                                   const FieldPrime& prime = FieldPrime::Default(),
                                   double clip = 2.0);

  // Throws ParameterError when clip <= 0, b is outside [1, 63], or
  // p < 2^(b + headroom).
  void validate() const;

  std::uint64_t max_level() const {
    return (plaintext_bits >= 64 ? ~0ull : (1ull << plaintext_bits)) - 1;
  }
  // Real-valued width of one quantization level.
  double step() const { return 2.0 * clip / static_cast<double>(max_level()); }
};

// Clip to [-clip, clip], map affinely onto [0, 2^b - 1], round half to
// even. Throws InvalidValueError on NaN.
FieldVector quantize(std::span<const double> x, const QuantizerConfig& cfg);

// Inverse map for a field sum of `n_contributors` encodings: removes the
// n * clip offset. Throws EmptyAggregateError for n = 0.
std::vector<double> dequantize_sum(const FieldVector& sum,
                                   std::size_t n_contributors,
                                   const QuantizerConfig& cfg);

}  // namespace disagg

#endif  // DISAGG_QUANTIZE_H_
