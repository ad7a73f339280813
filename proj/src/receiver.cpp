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

#include "lq/receiver.hpp"

#include <algorithm>
#include <limits>

namespace lq {

struct ReceiverEngine::Block {
  BlockId id = 0;
  std::uint32_t block_bytes = 0;
  std::uint16_t symbol_size = 0;
  std::unique_ptr<BlockDecoder> decoder;  // released on delivery
  bool delivered = false;
  Nanos first_at{0};
  Nanos last_progress{0};
  Nanos delivered_at{0};
};

ReceiverEngine::ReceiverEngine(ReceiverConfig config) : config_(std::move(config)) {
  if (!config_.codec) config_.codec = make_codec(CodecKind::rlc);
  if (config_.max_active_blocks == 0) throw Error(Errc::invalid_argument, "max_active_blocks must be >= 1");
}

ReceiverEngine::~ReceiverEngine() = default;
ReceiverEngine::ReceiverEngine(ReceiverEngine&&) noexcept = default;
ReceiverEngine& ReceiverEngine::operator=(ReceiverEngine&&) noexcept = default;

bool ReceiverEngine::forgotten(BlockId id) const {
  auto it = forgotten_.upper_bound(id);
  if (it == forgotten_.begin()) return false;
  --it;
  return id <= it->second;
}

void ReceiverEngine::forget(BlockId id) {
  BlockId first = id;
  BlockId last = id;
  auto next = forgotten_.upper_bound(id);
  if (next != forgotten_.begin()) {
    auto prev = std::prev(next);
    if (prev->second != std::numeric_limits<BlockId>::max() && prev->second + 1 >= id) {
      first = prev->first;
      last = std::max(last, prev->second);
      forgotten_.erase(prev);
    }
  }
  if (next != forgotten_.end() && last != std::numeric_limits<BlockId>::max() && next->first <= last + 1) {
    last = std::max(last, next->second);
    forgotten_.erase(next);
  }
  forgotten_[first] = last;
}

bool ReceiverEngine::is_delivered(BlockId id) const {
  auto it = blocks_.find(id);
  return it != blocks_.end() && it->second->delivered;
}

std::optional<DeliveredBlock> ReceiverEngine::on_data_packet(const wire::DataPacketHeader& h,
                                                             std::span<const std::uint8_t> payload,
                                                             Nanos now) {
  if (h.global_seq == wire::kNoSequence) throw Error(Errc::malformed, "reserved sequence number");
  if (payload.size() != h.symbol_size) throw Error(Errc::malformed_symbol, "payload size mismatch");

  if (highest_ == wire::kNoSequence || h.global_seq > highest_) highest_ = h.global_seq;
  if (received_ < highest_ + 1) ++received_;
  ++metrics_.packets;

  if (forgotten(h.block_id)) {
    ++metrics_.late_symbols;
    return std::nullopt;
  }
  auto it = blocks_.find(h.block_id);
  if (it != blocks_.end()) {
    const Block& b = *it->second;
    if (b.block_bytes != h.block_size_bytes || b.symbol_size != h.symbol_size) {
      ++metrics_.protocol_errors;
      throw Error(Errc::protocol_error, "block size changed for a known block");
    }
    if (b.delivered) {
      ++metrics_.late_symbols;
      return std::nullopt;
    }
  } else {
    if (active_count_ >= config_.max_active_blocks) {
      ++metrics_.overflow;
      ++metrics_.protocol_errors;
      return std::nullopt;
    }
    auto b = std::make_unique<Block>();
    b->id = h.block_id;
    b->block_bytes = h.block_size_bytes;
    b->symbol_size = h.symbol_size;
    b->decoder = config_.codec->make_decoder(h.block_id, h.block_size_bytes, h.symbol_size);
    b->first_at = now;
    it = blocks_.emplace(h.block_id, std::move(b)).first;
    ++active_count_;
  }

  Block& b = *it->second;
  const AddResult r = b.decoder->add(h.esi, payload);
  if (r == AddResult::duplicate) {
    ++metrics_.duplicates;
    return std::nullopt;
  }
  b.last_progress = now;
  if (b.decoder->rank() < b.decoder->k()) return std::nullopt;

  auto data = b.decoder->try_finish();
  if (!data) return std::nullopt;
  DeliveredBlock out;
  out.block_id = b.id;
  out.data = std::move(*data);
  out.block_bytes = b.block_bytes;
  out.k = b.decoder->k();
  out.symbols_received = b.decoder->received();
  out.first_symbol_at = b.first_at;
  out.delivered_at = now;
  b.delivered = true;
  b.delivered_at = now;
  b.decoder.reset();
  --active_count_;
  ++metrics_.delivered;
  return out;
}

std::optional<DeliveredBlock> ReceiverEngine::on_datagram(std::span<const std::uint8_t> bytes, Nanos now) {
  wire::DataPacketView view;
  if (wire::parse_data_packet(bytes, view) != Errc::ok) {
    ++metrics_.malformed;
    return std::nullopt;
  }
  try {
    return on_data_packet(view.header, view.payload, now);
  } catch (const Error& e) {
    if (e.code() != Errc::protocol_error) ++metrics_.malformed;
    return std::nullopt;
  }
}

wire::FeedbackPacket ReceiverEngine::make_feedback() const {
  wire::FeedbackPacket f;
  f.highest_seq_seen = highest_;
  f.total_data_packets_received = received_;
  for (const auto& [id, b] : blocks_) {
    if (b->delivered) continue;
    if (f.entries.size() == 0xffff) break;
    f.entries.push_back({id, b->decoder->received()});
  }
  return f;
}

std::size_t ReceiverEngine::gc_delivered(Nanos now, Nanos retention) {
  std::size_t n = 0;
  for (auto it = blocks_.begin(); it != blocks_.end();) {
    if (it->second->delivered && now - it->second->delivered_at >= retention) {
      forget(it->first);
      it = blocks_.erase(it);
      ++n;
    } else {
      ++it;
    }
  }
  return n;
}

void ReceiverEngine::tick(Nanos now) {
  if (config_.active_timeout.count() <= 0) return;
  for (auto it = blocks_.begin(); it != blocks_.end();) {
    const Block& b = *it->second;
    if (!b.delivered && now - b.last_progress >= config_.active_timeout) {
      ++metrics_.expired;
      --active_count_;
      forget(it->first);
      it = blocks_.erase(it);
    } else {
      ++it;
    }
  }
}

// ---------------------------------------------------------------------------

void InOrderDelivery::drain(std::vector<DeliveredBlock>& out) {
  for (auto it = held_.find(next_); it != held_.end(); it = held_.find(next_)) {
    out.push_back(std::move(it->second.block));
    held_.erase(it);
    ++next_;
  }
}

std::vector<DeliveredBlock> InOrderDelivery::push(DeliveredBlock block, Nanos now) {
  std::vector<DeliveredBlock> out;
  if (block.block_id < next_) {
    // Its slot was already skipped; hand it over rather than drop it.
    out.push_back(std::move(block));
    return out;
  }
  const BlockId id = block.block_id;
  held_.emplace(id, Held{std::move(block), now});
  drain(out);
  return out;
}

std::vector<DeliveredBlock> InOrderDelivery::poll(Nanos now) {
  std::vector<DeliveredBlock> out;
  while (!held_.empty()) {
    auto oldest = std::min_element(held_.begin(), held_.end(),
                                   [](const auto& a, const auto& b) { return a.second.since < b.second.since; });
    if (now - oldest->second.since < max_wait_) break;
    const BlockId first = held_.begin()->first;
    skipped_ += first - next_;
    next_ = first;
    drain(out);
  }
  return out;
}

}  // namespace lq
