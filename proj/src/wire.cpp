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

#include "lq/wire.hpp"

#include <cstring>
#include <string>

namespace lq::wire {

namespace {

template <class T>
void put_be(std::uint8_t* p, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    p[sizeof(T) - 1 - i] = static_cast<std::uint8_t>(v & 0xff);
    v = static_cast<T>(v >> 8);
  }
}

template <class T>
T get_be(const std::uint8_t* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v = static_cast<T>((v << 8) | p[i]);
  return v;
}

void put_preamble(std::uint8_t* p, PacketType type) {
  put_be<std::uint16_t>(p, kMagic);
  p[2] = kVersion;
  p[3] = static_cast<std::uint8_t>(type);
}

Errc check_preamble(std::span<const std::uint8_t> bytes, PacketType type) {
  if (bytes.size() < 2) return Errc::truncated;
  if (get_be<std::uint16_t>(bytes.data()) != kMagic) return Errc::bad_magic;
  if (bytes.size() < 3) return Errc::truncated;
  if (bytes[2] != kVersion) return Errc::bad_version;
  if (bytes.size() < 4) return Errc::truncated;
  if (bytes[3] != static_cast<std::uint8_t>(type)) return Errc::wrong_type;
  return Errc::ok;
}

}  // namespace

std::size_t feedback_size(std::size_t entries) noexcept {
  return kFeedbackHeaderSize + entries * kFeedbackEntrySize;
}

void write_data_header(const DataPacketHeader& h, std::span<std::uint8_t> out) {
  if (out.size() < kDataHeaderSize) throw Error(Errc::invalid_argument, "header buffer too small");
  if (h.block_size_bytes == 0 || h.symbol_size == 0)
    throw Error(Errc::invalid_argument, "block and symbol sizes must be >= 1");
  std::uint8_t* p = out.data();
  put_preamble(p, PacketType::data);
  put_be<std::uint64_t>(p + 4, h.global_seq);
  put_be<std::uint64_t>(p + 12, h.block_id);
  put_be<std::uint32_t>(p + 20, h.esi);
  put_be<std::uint32_t>(p + 24, h.block_size_bytes);
  put_be<std::uint16_t>(p + 28, h.symbol_size);
}

std::vector<std::uint8_t> encode_data_packet(const DataPacketHeader& h,
                                             std::span<const std::uint8_t> payload) {
  if (payload.size() != h.symbol_size)
    throw Error(Errc::invalid_argument, "payload length must equal symbol_size");
  std::vector<std::uint8_t> out(kDataHeaderSize + payload.size());
  write_data_header(h, out);
  std::memcpy(out.data() + kDataHeaderSize, payload.data(), payload.size());
  return out;
}

std::vector<std::uint8_t> encode_feedback(const FeedbackPacket& f) {
  if (f.entries.size() > 0xffff) throw Error(Errc::invalid_argument, "too many feedback entries");
  if (f.total_data_packets_received > f.seq_span())
    throw Error(Errc::invalid_argument, "received count exceeds highest sequence + 1");
  std::vector<std::uint8_t> out;
  out.reserve(feedback_size(f.entries.size()));
  std::uint8_t head[kFeedbackHeaderSize];
  put_preamble(head, PacketType::feedback);
  put_be<std::uint64_t>(head + 4, f.highest_seq_seen);
  put_be<std::uint64_t>(head + 12, f.total_data_packets_received);
  put_be<std::uint16_t>(head + 20, static_cast<std::uint16_t>(f.entries.size()));
  out.insert(out.end(), head, head + sizeof head);
  for (const auto& e : f.entries) {
    std::uint8_t entry[kFeedbackEntrySize];
    put_be<std::uint64_t>(entry, e.block_id);
    put_be<std::uint32_t>(entry + 8, e.symbols_received);
    out.insert(out.end(), entry, entry + sizeof entry);
  }
  return out;
}

Errc parse_data_packet(std::span<const std::uint8_t> bytes, DataPacketView& out) noexcept {
  if (Errc e = check_preamble(bytes, PacketType::data); e != Errc::ok) return e;
  if (bytes.size() < kDataHeaderSize) return Errc::truncated;
  const std::uint8_t* p = bytes.data();
  out.header.global_seq = get_be<std::uint64_t>(p + 4);
  out.header.block_id = get_be<std::uint64_t>(p + 12);
  out.header.esi = get_be<std::uint32_t>(p + 20);
  out.header.block_size_bytes = get_be<std::uint32_t>(p + 24);
  out.header.symbol_size = get_be<std::uint16_t>(p + 28);
  if (out.header.block_size_bytes == 0 || out.header.symbol_size == 0) return Errc::malformed;
  const std::size_t payload = bytes.size() - kDataHeaderSize;
  if (payload < out.header.symbol_size) return Errc::truncated;
  if (payload > out.header.symbol_size) return Errc::malformed;
  out.payload = bytes.subspan(kDataHeaderSize);
  return Errc::ok;
}

Errc parse_feedback(std::span<const std::uint8_t> bytes, FeedbackPacket& out) noexcept {
  if (Errc e = check_preamble(bytes, PacketType::feedback); e != Errc::ok) return e;
  if (bytes.size() < kFeedbackHeaderSize) return Errc::truncated;
  const std::uint8_t* p = bytes.data();
  const auto highest = get_be<std::uint64_t>(p + 4);
  const auto received = get_be<std::uint64_t>(p + 12);
  const auto count = get_be<std::uint16_t>(p + 20);
  const std::size_t expected = feedback_size(count);
  if (bytes.size() < expected) return Errc::truncated;
  if (bytes.size() > expected) return Errc::malformed;
  // Sentinel highest means "nothing seen": highest + 1 wraps to 0.
  if (received > highest + 1) return Errc::malformed;
  try {
    out.highest_seq_seen = highest;
    out.total_data_packets_received = received;
    out.entries.resize(count);
  } catch (...) {
    return Errc::malformed;
  }
  p += kFeedbackHeaderSize;
  for (auto& e : out.entries) {
    e.block_id = get_be<std::uint64_t>(p);
    e.symbols_received = get_be<std::uint32_t>(p + 8);
    p += kFeedbackEntrySize;
  }
  return Errc::ok;
}

DataPacketView decode_data_packet(std::span<const std::uint8_t> bytes) {
  DataPacketView view;
  if (Errc e = parse_data_packet(bytes, view); e != Errc::ok)
    throw Error(e, std::string("data packet: ") + to_string(e));
  return view;
}

FeedbackPacket decode_feedback(std::span<const std::uint8_t> bytes) {
  FeedbackPacket f;
  if (Errc e = parse_feedback(bytes, f); e != Errc::ok)
    throw Error(e, std::string("feedback packet: ") + to_string(e));
  return f;
}

std::optional<PacketType> peek_type(std::span<const std::uint8_t> bytes) noexcept {
  if (bytes.size() < 4) return std::nullopt;
  if (get_be<std::uint16_t>(bytes.data()) != kMagic || bytes[2] != kVersion) return std::nullopt;
  if (bytes[3] == static_cast<std::uint8_t>(PacketType::data)) return PacketType::data;
  if (bytes[3] == static_cast<std::uint8_t>(PacketType::feedback)) return PacketType::feedback;
  return std::nullopt;
}

}  // namespace lq::wire
