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

#include "disagg/lcc.h"

#include <algorithm>
#include <string>

#include <sodium.h>

#include "disagg/errors.h"

namespace disagg {
namespace {

void AppendLe(std::vector<std::uint8_t>& out, uint128 v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

ParamsDigest DigestOf(const FieldPrime& prime, std::size_t t_c,
                      std::span<const FieldElement> secret_points,
                      std::span<const FieldElement> share_points) {
  static constexpr char kDomain[] = "disagg.lcc.params.v1";
  std::vector<std::uint8_t> buf(kDomain, kDomain + sizeof(kDomain) - 1);
  AppendLe(buf, prime.modulus(), 16);
  AppendLe(buf, share_points.size(), 8);
  AppendLe(buf, t_c, 8);
  AppendLe(buf, secret_points.size(), 8);
  for (auto e : secret_points) AppendLe(buf, e.value(), 16);
  for (auto e : share_points) AppendLe(buf, e.value(), 16);
  ParamsDigest d;
  crypto_hash_sha256(d.data(), buf.data(), buf.size());
  return d;
}

void CheckCompatible(const AggregatedShare& acc, const ShareBundle& s) {
  if (!(acc.beta == s.beta))
    throw AggregationError("shares taken at different evaluation points");
  if (acc.params_digest != s.params_digest)
    throw AggregationError("shares bound to different sharing parameters");
  if (acc.original_len != s.original_len || acc.sum_share.size() != s.share.size())
    throw AggregationError("shares of different lengths");
  if (!(acc.sum_share.prime() == s.share.prime()))
    throw AggregationError("shares from different fields");
}

}  // namespace

SharingParams::SharingParams(const FieldPrime& prime, std::size_t t_c,
                             std::vector<FieldElement> secret_points,
                             std::vector<FieldElement> share_points)
    : prime_(prime),
      t_c_(t_c),
      secret_points_(std::move(secret_points)),
      share_points_(std::move(share_points)) {
  const std::size_t t_r = secret_points_.size();
  const std::size_t a = share_points_.size();
  if (t_c_ == 0) throw ParameterError("corruption threshold must be at least 1");
  if (t_c_ >= t_r)
    throw ParameterError("corruption threshold must be below reconstruction threshold");
  if (t_r >= a)
    throw ParameterError("reconstruction threshold must be below the share count");
  std::vector<FieldElement> all(secret_points_);
  all.insert(all.end(), share_points_.begin(), share_points_.end());
  for (auto e : all)
    if (e.value() >= prime_.modulus())
      throw ParameterError("evaluation point is not a field element");
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw ParameterError("evaluation points must be pairwise distinct");

  encoding_.resize(a * t_r);
  for (std::size_t j = 0; j < a; ++j) {
    const auto row = lagrange_coeffs(prime_, secret_points_, share_points_[j]);
    std::copy(row.begin(), row.end(), encoding_.begin() + j * t_r);
  }
  digest_ = DigestOf(prime_, t_c_, secret_points_, share_points_);
}

SharingParams SharingParams::Make(const FieldPrime& prime, std::size_t num_shares,
                                  std::size_t corruption_threshold,
                                  std::size_t reconstruction_threshold) {
  const uint128 needed = static_cast<uint128>(reconstruction_threshold) + num_shares;
  if (needed > prime.modulus())
    throw ParameterError("t_r + A = " + Uint128ToString(needed) +
                         " evaluation points exceed the field size");
  std::vector<FieldElement> secret(reconstruction_threshold);
  std::vector<FieldElement> shares(num_shares);
  for (std::size_t k = 0; k < reconstruction_threshold; ++k) secret[k] = FieldElement(k);
  for (std::size_t j = 0; j < num_shares; ++j)
    shares[j] = FieldElement(reconstruction_threshold + j);
  return SharingParams(prime, corruption_threshold, std::move(secret), std::move(shares));
}

SharingParams SharingParams::WithPoints(const FieldPrime& prime,
                                        std::size_t corruption_threshold,
                                        std::vector<FieldElement> secret_points,
                                        std::vector<FieldElement> share_points) {
  return SharingParams(prime, corruption_threshold, std::move(secret_points),
                       std::move(share_points));
}

bool SharingParams::has_share_point(FieldElement beta) const {
  return std::find(share_points_.begin(), share_points_.end(), beta) !=
         share_points_.end();
}

std::size_t SharingParams::share_length(std::size_t original_len) const {
  const std::size_t rho = packing();
  return (original_len + rho - 1) / rho;
}

std::vector<FieldVector> lcc_encode(std::span<const FieldVector> columns,
                                    const SharingParams& params) {
  const std::size_t t_r = params.reconstruction_threshold();
  if (columns.size() != t_r)
    throw DimensionError("expected " + std::to_string(t_r) + " columns, got " +
                         std::to_string(columns.size()));
  const FieldPrime& f = params.prime();
  const std::size_t len = columns.empty() ? 0 : columns[0].size();
  for (const auto& c : columns) {
    if (c.size() != len) throw DimensionError("columns differ in length");
    if (!(c.prime() == f)) throw DimensionError("column from a different field");
  }
  std::vector<FieldVector> out;
  out.reserve(params.num_shares());
  for (std::size_t j = 0; j < params.num_shares(); ++j) {
    FieldVector share(f, len);
    for (std::size_t k = 0; k < t_r; ++k) {
      const FieldElement coef = params.encoding(j, k);
      if (coef.is_zero()) continue;
      const FieldVector& col = columns[k];
      for (std::size_t l = 0; l < len; ++l)
        share[l] = f.add(share[l], f.mul(coef, col[l]));
    }
    out.push_back(std::move(share));
  }
  return out;
}

std::vector<ShareBundle> secret_share(const FieldVector& secret,
                                      const SharingParams& params, Prg& rng) {
  if (secret.empty()) throw ParameterError("secret vector is empty");
  const FieldPrime& f = params.prime();
  if (!(secret.prime() == f)) throw ParameterError("secret lives in a different field");
  const std::size_t rho = params.packing();
  const std::size_t t_r = params.reconstruction_threshold();
  const std::size_t rows = params.share_length(secret.size());

  // Row r of the reshaped secret holds entries r*rho .. r*rho + rho - 1;
  // column c collects entry c of every row.
  std::vector<FieldVector> columns(t_r, FieldVector(f, rows));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < rho; ++c) {
      const std::size_t idx = r * rho + c;
      columns[c][r] = idx < secret.size() ? secret[idx] : rng.uniform(f);
    }
  }
  for (std::size_t k = rho; k < t_r; ++k)
    for (std::size_t r = 0; r < rows; ++r) columns[k][r] = rng.uniform(f);

  auto evaluated = lcc_encode(columns, params);
  std::vector<ShareBundle> out;
  out.reserve(evaluated.size());
  for (std::size_t j = 0; j < evaluated.size(); ++j) {
    out.push_back(ShareBundle{params.share_points()[j], std::move(evaluated[j]),
                              secret.size(), params.digest()});
  }
  return out;
}

AggregatedShare to_aggregate(const ShareBundle& share) {
  return AggregatedShare{share.beta, share.share, 1, share.original_len,
                         share.params_digest};
}

void accumulate(AggregatedShare& acc, const ShareBundle& share) {
  CheckCompatible(acc, share);
  add_into(acc.sum_share, share.share);
  ++acc.contributor_count;
}

AggregatedShare add_shares(std::span<const ShareBundle> shares) {
  if (shares.empty()) throw AggregationError("no shares to aggregate");
  AggregatedShare acc = to_aggregate(shares[0]);
  for (std::size_t i = 1; i < shares.size(); ++i) accumulate(acc, shares[i]);
  return acc;
}

FieldVector secret_reconstruct(std::span<const AggregatedShare> shares,
                               const SharingParams& params,
                               std::size_t original_len) {
  const std::size_t t_r = params.reconstruction_threshold();
  if (shares.size() < t_r)
    throw InsufficientSharesError("need " + std::to_string(t_r) + " shares, got " +
                                  std::to_string(shares.size()));
  const FieldPrime& f = params.prime();
  const std::size_t len = params.share_length(original_len);
  for (const auto& s : shares) {
    if (s.params_digest != params.digest())
      throw AggregationError("share bound to different sharing parameters");
    if (s.sum_share.size() != len || s.original_len != original_len)
      throw AggregationError("share length does not match original length");
    if (!(s.sum_share.prime() == f))
      throw AggregationError("share from a different field");
    if (s.contributor_count != shares[0].contributor_count)
      throw AggregationError("shares summed over different contributor counts");
  }

  std::vector<const AggregatedShare*> order;
  order.reserve(shares.size());
  for (const auto& s : shares) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const AggregatedShare* a, const AggregatedShare* b) {
              return a->beta < b->beta;
            });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (order[i]->beta == order[i - 1]->beta)
      throw DegenerateBasisError("two shares carry the same evaluation point");
  order.resize(t_r);

  std::vector<FieldElement> nodes(t_r);
  for (std::size_t k = 0; k < t_r; ++k) nodes[k] = order[k]->beta;

  const std::size_t rho = params.packing();
  FieldVector out(f, original_len);
  for (std::size_t c = 0; c < rho; ++c) {
    const auto coef = lagrange_coeffs(f, nodes, params.secret_points()[c]);
    for (std::size_t r = 0; r < len; ++r) {
      const std::size_t idx = r * rho + c;
      if (idx >= original_len) continue;  // padding
      FieldElement acc;
      for (std::size_t k = 0; k < t_r; ++k)
        acc = f.add(acc, f.mul(coef[k], order[k]->sum_share[r]));
      out[idx] = acc;
    }
  }
  return out;
}

std::vector<ShamirShare> shamir_share(FieldElement secret, std::size_t t_c,
                                      std::size_t t_r, std::size_t num_shares,
                                      const FieldPrime& prime, Prg& rng) {
  if (!(t_c < t_r && t_r <= num_shares))
    throw ParameterError("Shamir thresholds need t_c < t_r <= A");
  if (static_cast<uint128>(num_shares) >= prime.modulus())
    throw ParameterError("too many Shamir shares for the field");
  // f(X) = secret + c_1 X + ... + c_{t_r-1} X^{t_r-1}
  std::vector<FieldElement> coeffs(t_r);
  coeffs[0] = secret;
  for (std::size_t i = 1; i < t_r; ++i) coeffs[i] = rng.uniform(prime);
  std::vector<ShamirShare> out(num_shares);
  for (std::size_t j = 0; j < num_shares; ++j) {
    const FieldElement x(j + 1);
    FieldElement y;
    for (std::size_t i = t_r; i-- > 0;) y = prime.add(prime.mul(y, x), coeffs[i]);
    out[j] = ShamirShare{j + 1, y};
  }
  return out;
}

FieldElement shamir_reconstruct(std::span<const ShamirShare> shares,
                                std::size_t t_r, const FieldPrime& prime) {
  if (shares.size() < t_r)
    throw InsufficientSharesError("need " + std::to_string(t_r) +
                                  " Shamir shares, got " + std::to_string(shares.size()));
  // lambda_j = prod_{z != j} i_z / (i_z - i_j)
  FieldElement secret;
  for (std::size_t j = 0; j < t_r; ++j) {
    const FieldElement ij = prime.element(shares[j].index);
    FieldElement num(1), den(1);
    for (std::size_t z = 0; z < t_r; ++z) {
      if (z == j) continue;
      const FieldElement iz = prime.element(shares[z].index);
      const FieldElement diff = prime.sub(iz, ij);
      if (diff.is_zero())
        throw DegenerateBasisError("duplicate Shamir share index");
      num = prime.mul(num, iz);
      den = prime.mul(den, diff);
    }
    const FieldElement lambda = prime.mul(num, prime.inv(den));
    secret = prime.add(secret, prime.mul(lambda, shares[j].value));
  }
  return secret;
}

}  // namespace disagg
