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

#ifndef DISAGG_LCC_H_
#define DISAGG_LCC_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "disagg/field.h"
#include "disagg/prg.h"

namespace disagg {

using ParamsDigest = std::array<std::uint8_t, 32>;

// Parameters of the packed Lagrange sharing: rho = t_r - t_c secret columns
// and t_c noise columns are interpolated at secret_points and evaluated at
// the A share_points.
class SharingParams {
 public:
  // Nodes a_k = k for k < t_r and beta_j = t_r + j for j < A.
  static SharingParams Make(const FieldPrime& prime, std::size_t num_shares,
                            std::size_t corruption_threshold,
                            std::size_t reconstruction_threshold);

  // Caller-chosen nodes; t_r = secret_points.size(), A = share_points.size().
  static SharingParams WithPoints(const FieldPrime& prime,
                                  std::size_t corruption_threshold,
                                  std::vector<FieldElement> secret_points,
                                  std::vector<FieldElement> share_points);

  const FieldPrime& prime() const { return prime_; }
  std::size_t num_shares() const { return share_points_.size(); }
  std::size_t corruption_threshold() const { return t_c_; }
  std::size_t reconstruction_threshold() const { return secret_points_.size(); }
  std::size_t packing() const { return reconstruction_threshold() - t_c_; }

  std::span<const FieldElement> secret_points() const { return secret_points_; }
  std::span<const FieldElement> share_points() const { return share_points_; }
  const ParamsDigest& digest() const { return digest_; }

  // Row j holds L_k(beta_j) for k < t_r; row-major, A x t_r.
  std::span<const FieldElement> encoding_matrix() const { return encoding_; }
  FieldElement encoding(std::size_t share, std::size_t column) const {
    return encoding_[share * reconstruction_threshold() + column];
  }

  bool has_share_point(FieldElement beta) const;

  // ceil(m / rho)
  std::size_t share_length(std::size_t original_len) const;

 private:
  SharingParams(const FieldPrime& prime, std::size_t t_c,
                std::vector<FieldElement> secret_points,
                std::vector<FieldElement> share_points);

  FieldPrime prime_;
  std::size_t t_c_;
  std::vector<FieldElement> secret_points_;
  std::vector<FieldElement> share_points_;
  std::vector<FieldElement> encoding_;
  ParamsDigest digest_{};
};

// One client's share for one Aggregator.
struct ShareBundle {
  FieldElement beta;
  FieldVector share;
  std::uint64_t original_len = 0;
  ParamsDigest params_digest{};
};

// Field sum of `contributor_count` bundles taken at the same beta.
struct AggregatedShare {
  FieldElement beta;
  FieldVector sum_share;
  std::uint64_t contributor_count = 0;
  std::uint64_t original_len = 0;
  ParamsDigest params_digest{};
};

// Splits `secret` into A shares. The last row is padded with draws from
// `rng`, which also supplies the t_c noise columns.
std::vector<ShareBundle> secret_share(const FieldVector& secret,
                                      const SharingParams& params, Prg& rng);

// Evaluates the interpolant through (a_k, columns[k]) at every beta_j.
// Exposed so tests can fix the noise columns explicitly.
std::vector<FieldVector> lcc_encode(std::span<const FieldVector> columns,
                                    const SharingParams& params);

// Throws AggregationError on mismatched beta, digest, or length.
AggregatedShare add_shares(std::span<const ShareBundle> shares);
AggregatedShare to_aggregate(const ShareBundle& share);
// Folds one more bundle into `acc`, same checks as add_shares.
void accumulate(AggregatedShare& acc, const ShareBundle& share);

// Uses the t_r shares with the smallest betas. Throws
// InsufficientSharesError, DegenerateBasisError or AggregationError.
FieldVector secret_reconstruct(std::span<const AggregatedShare> shares,
                               const SharingParams& params,
                               std::size_t original_len);

// Plain (t_c, t_r, A) Shamir sharing of one element over indices 1..A.
struct ShamirShare {
  std::uint64_t index = 0;
  FieldElement value;
};

std::vector<ShamirShare> shamir_share(FieldElement secret, std::size_t t_c,
                                      std::size_t t_r, std::size_t num_shares,
                                      const FieldPrime& prime, Prg& rng);

// Reconstructs f(0) from the first t_r shares.
FieldElement shamir_reconstruct(std::span<const ShamirShare> shares,
                                std::size_t t_r, const FieldPrime& prime);

}  // namespace disagg

#endif  // DISAGG_LCC_H_
