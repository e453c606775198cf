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

#ifndef DISAGG_WIRE_H_
#define DISAGG_WIRE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "disagg/field.h"
#include "disagg/lcc.h"

namespace disagg {

// Frame layout (all integers little-endian):
//   tag:u8 | body_len:u64 | body
// ShareBundle body:
//   params_digest[32] | beta:u128 | original_len:u64 | L:u64 | L x u128
// AggregatedShare body:
//   params_digest[32] | beta:u128 | original_len:u64 | L:u64 |
//   contributor_count:u64 | L x u128
inline constexpr std::uint8_t kShareBundleTag = 0x01;
inline constexpr std::uint8_t kAggregatedShareTag = 0x02;
inline constexpr std::size_t kFrameHeaderBytes = 9;
inline constexpr std::size_t kElementBytes = 16;

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u64(std::uint64_t v);
  void u128(uint128 v);
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t>& buffer() { return buf_; }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

// Bounds-checked reader; every accessor throws FormatError on truncation.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}
  std::uint8_t u8();
  std::uint64_t u64();
  uint128 u128();
  std::span<const std::uint8_t> bytes(std::size_t n);
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> EncodeShareBundle(const ShareBundle& bundle);
ShareBundle DecodeShareBundle(std::span<const std::uint8_t> frame,
                              const FieldPrime& prime);

std::vector<std::uint8_t> EncodeAggregatedShare(const AggregatedShare& share);
AggregatedShare DecodeAggregatedShare(std::span<const std::uint8_t> frame,
                                      const FieldPrime& prime);

// Encoded size of a ShareBundle with L elements.
constexpr std::size_t ShareBundleFrameBytes(std::size_t len) {
  return kFrameHeaderBytes + 32 + 16 + 8 + 8 + len * kElementBytes;
}

}  // namespace disagg

#endif  // DISAGG_WIRE_H_
