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

#include "disagg/quantize.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "disagg/errors.h"

namespace disagg {

unsigned CeilLog2(std::uint64_t n) {
  unsigned bits = 0;
  while (bits < 64 && (1ull << bits) < n) ++bits;
  return bits;
}

QuantizerConfig QuantizerConfig::ForCohort(std::size_t n_clients,
                                           const FieldPrime& prime, double clip) {
  QuantizerConfig cfg;
  cfg.clip = clip;
  cfg.prime = prime;
  cfg.headroom_bits = CeilLog2(n_clients);
  const unsigned field_bits = prime.bit_length() - 1;
  const unsigned want = 53 > cfg.headroom_bits ? 53 - cfg.headroom_bits : 1;
  const unsigned room =
      field_bits > cfg.headroom_bits ? field_bits - cfg.headroom_bits : 0;
  cfg.plaintext_bits = std::min(want, room);
  cfg.validate();
  return cfg;
}

void QuantizerConfig::validate() const {
  if (!(clip > 0.0) || !std::isfinite(clip))
    throw ParameterError("clip bound must be positive and finite");
  if (plaintext_bits < 1 || plaintext_bits > 63)
    throw ParameterError("plaintext bits must lie in [1, 63]");
  // p >= 2^(b+h) holds iff bit_length(p) > b + h.
  if (plaintext_bits + headroom_bits >= prime.bit_length())
    throw ParameterError("field of " + std::to_string(prime.bit_length()) +
                         " bits cannot hold " + std::to_string(plaintext_bits) +
                         " plaintext bits plus " + std::to_string(headroom_bits) +
                         " headroom bits");
}

FieldVector quantize(std::span<const double> x, const QuantizerConfig& cfg) {
  cfg.validate();
  FieldVector out(cfg.prime, x.size());
  const long double levels = static_cast<long double>(cfg.max_level());
  const long double width = 2.0L * cfg.clip;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    if (std::isnan(v))
      throw InvalidValueError("NaN at coordinate " + std::to_string(i));
    const long double c = std::clamp<long double>(v, -cfg.clip, cfg.clip);
    // nearbyint honours the default round-to-nearest-even mode.
    const long double level = std::nearbyint((c + cfg.clip) / width * levels);
    out[i] = FieldElement(static_cast<std::uint64_t>(level));
  }
  return out;
}

std::vector<double> dequantize_sum(const FieldVector& sum,
                                   std::size_t n_contributors,
                                   const QuantizerConfig& cfg) {
  if (n_contributors == 0)
    throw EmptyAggregateError("cannot de-quantize an aggregate of zero inputs");
  cfg.validate();
  if (!(sum.prime() == cfg.prime))
    throw DimensionError("aggregate lives in a different field");
  const long double step =
      2.0L * cfg.clip / static_cast<long double>(cfg.max_level());
  const long double offset = static_cast<long double>(n_contributors) * cfg.clip;
  std::vector<double> out(sum.size());
  for (std::size_t i = 0; i < sum.size(); ++i) {
    const long double s = static_cast<long double>(sum[i].value());
    out[i] = static_cast<double>(s * step - offset);
  }
  return out;
}

}  // namespace disagg
