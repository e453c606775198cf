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

#include "disagg/wire.h"

#include <algorithm>
#include <string>

#include "disagg/errors.h"

namespace disagg {
namespace {

FieldVector ReadElements(ByteReader& r, std::uint64_t len, const FieldPrime& prime) {
  if (len > r.remaining() / kElementBytes)
    throw FormatError("frame shorter than its declared element count");
  std::vector<FieldElement> elems(len);
  for (auto& e : elems) {
    const uint128 v = r.u128();
    if (v >= prime.modulus()) throw FormatError("share element is not reduced");
    e = FieldElement(v);
  }
  return FieldVector(prime, std::move(elems));
}

ByteReader OpenFrame(std::span<const std::uint8_t> frame, std::uint8_t tag) {
  ByteReader r(frame);
  const std::uint8_t got = r.u8();
  if (got != tag)
    throw FormatError("unexpected frame tag " + std::to_string(got) + ", expected " +
                      std::to_string(tag));
  const std::uint64_t body = r.u64();
  if (body != r.remaining()) throw FormatError("frame length prefix mismatch");
  return r;
}

void WriteHeader(ByteWriter& w, std::uint8_t tag, std::size_t body_len) {
  w.u8(tag);
  w.u64(body_len);
}

}  // namespace

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u128(uint128 v) {
  for (int i = 0; i < 16; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint8_t ByteReader::u8() { return bytes(1)[0]; }

std::uint64_t ByteReader::u64() {
  auto b = bytes(8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

uint128 ByteReader::u128() {
  auto b = bytes(16);
  uint128 v = 0;
  for (int i = 15; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::span<const std::uint8_t> ByteReader::bytes(std::size_t n) {
  if (n > remaining()) throw FormatError("truncated frame");
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::vector<std::uint8_t> EncodeShareBundle(const ShareBundle& b) {
  ByteWriter w;
  const std::size_t len = b.share.size();
  WriteHeader(w, kShareBundleTag, ShareBundleFrameBytes(len) - kFrameHeaderBytes);
  w.bytes(b.params_digest);
  w.u128(b.beta.value());
  w.u64(b.original_len);
  w.u64(len);
  for (auto e : b.share) w.u128(e.value());
  return w.take();
}

ShareBundle DecodeShareBundle(std::span<const std::uint8_t> frame,
                              const FieldPrime& prime) {
  ByteReader r = OpenFrame(frame, kShareBundleTag);
  ShareBundle b{FieldElement(), FieldVector(prime), 0, {}};
  auto digest = r.bytes(32);
  std::copy(digest.begin(), digest.end(), b.params_digest.begin());
  const uint128 beta = r.u128();
  if (beta >= prime.modulus()) throw FormatError("beta is not reduced");
  b.beta = FieldElement(beta);
  b.original_len = r.u64();
  const std::uint64_t len = r.u64();
  b.share = ReadElements(r, len, prime);
  if (r.remaining() != 0) throw FormatError("trailing bytes after share elements");
  return b;
}

std::vector<std::uint8_t> EncodeAggregatedShare(const AggregatedShare& s) {
  ByteWriter w;
  const std::size_t len = s.sum_share.size();
  WriteHeader(w, kAggregatedShareTag, 32 + 16 + 8 + 8 + 8 + len * kElementBytes);
  w.bytes(s.params_digest);
  w.u128(s.beta.value());
  w.u64(s.original_len);
  w.u64(len);
  w.u64(s.contributor_count);
  for (auto e : s.sum_share) w.u128(e.value());
  return w.take();
}

AggregatedShare DecodeAggregatedShare(std::span<const std::uint8_t> frame,
                                      const FieldPrime& prime) {
  ByteReader r = OpenFrame(frame, kAggregatedShareTag);
  AggregatedShare s{FieldElement(), FieldVector(prime), 0, 0, {}};
  auto digest = r.bytes(32);
  std::copy(digest.begin(), digest.end(), s.params_digest.begin());
  const uint128 beta = r.u128();
  if (beta >= prime.modulus()) throw FormatError("beta is not reduced");
  s.beta = FieldElement(beta);
  s.original_len = r.u64();
  const std::uint64_t len = r.u64();
  s.contributor_count = r.u64();
  s.sum_share = ReadElements(r, len, prime);
  if (r.remaining() != 0) throw FormatError("trailing bytes after share elements");
  return s;
}

}  // namespace disagg
