// Copyright 2026 The Liquid Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// UDP wire format. All integers are big-endian. See docs/FORMAT.md.
//
// Data packet (30-byte header, then exactly symbol_size payload bytes):
//   0  magic      u16  0x4C51
//   2  version    u8   1
//   3  type       u8   0x01
//   4  global_seq u64
//  12  block_id   u64
//  20  esi        u32
//  24  block_size u32  (bytes, >= 1)
//  28  symbol_sz  u16  (>= 1)
//
// Feedback packet (22 bytes + 12 per entry):
//   0  magic      u16
//   2  version    u8
//   3  type       u8   0x02
//   4  highest    u64  (0xFFFF...FF when nothing has been received)
//  12  received   u64
//  20  count      u16
//  22  count x { block_id u64, symbols_received u32 }

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lq/error.hpp"

namespace lq::wire {

inline constexpr std::uint16_t kMagic = 0x4C51;
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kDataHeaderSize = 30;
inline constexpr std::size_t kFeedbackHeaderSize = 22;
inline constexpr std::size_t kFeedbackEntrySize = 12;
inline constexpr std::uint64_t kNoSequence = ~std::uint64_t{0};

enum class PacketType : std::uint8_t { data = 0x01, feedback = 0x02 };

struct DataPacketHeader {
  std::uint64_t global_seq = 0;
  BlockId block_id = 0;
  Esi esi = 0;
  std::uint32_t block_size_bytes = 1;
  std::uint16_t symbol_size = 1;

  friend bool operator==(const DataPacketHeader&, const DataPacketHeader&) = default;
};

struct DataPacketView {
  DataPacketHeader header;
  std::span<const std::uint8_t> payload;
};

struct FeedbackEntry {
  BlockId block_id = 0;
  std::uint32_t symbols_received = 0;

  friend bool operator==(const FeedbackEntry&, const FeedbackEntry&) = default;
};

struct FeedbackPacket {
  std::uint64_t highest_seq_seen = kNoSequence;
  std::uint64_t total_data_packets_received = 0;
  std::vector<FeedbackEntry> entries;

  // highest_seq_seen + 1, i.e. 0 when nothing has been seen.
  std::uint64_t seq_span() const noexcept { return highest_seq_seen + 1; }

  friend bool operator==(const FeedbackPacket&, const FeedbackPacket&) = default;
};

// Serializers throw Error(invalid_argument) for values that violate the
// field invariants (zero sizes, payload length != symbol_size, > 65535
// entries, received > highest + 1).
void write_data_header(const DataPacketHeader& header, std::span<std::uint8_t> out);
std::vector<std::uint8_t> encode_data_packet(const DataPacketHeader& header,
                                             std::span<const std::uint8_t> payload);
std::vector<std::uint8_t> encode_feedback(const FeedbackPacket& packet);

std::size_t feedback_size(std::size_t entries) noexcept;

// Non-throwing parsers for untrusted input. On success return Errc::ok and
// fill `out`; otherwise `out` is unspecified. The payload span aliases
// `bytes`.
Errc parse_data_packet(std::span<const std::uint8_t> bytes, DataPacketView& out) noexcept;
Errc parse_feedback(std::span<const std::uint8_t> bytes, FeedbackPacket& out) noexcept;

// Throwing wrappers (Error carries the parse code).
DataPacketView decode_data_packet(std::span<const std::uint8_t> bytes);
FeedbackPacket decode_feedback(std::span<const std::uint8_t> bytes);

// Type of a well-formed-looking datagram (magic and version checked).
std::optional<PacketType> peek_type(std::span<const std::uint8_t> bytes) noexcept;

}  // namespace lq::wire
