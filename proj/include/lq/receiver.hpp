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

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "lq/codec.hpp"
#include "lq/wire.hpp"

namespace lq {

struct ReceiverConfig {
  std::shared_ptr<const Codec> codec;  // null means the random-linear codec
  std::size_t max_active_blocks = 1024;
  // Active blocks with no progress for this long are dropped; 0 disables.
  Nanos active_timeout = std::chrono::milliseconds(400);
};

struct DeliveredBlock {
  BlockId block_id = 0;
  std::vector<std::uint8_t> data;  // empty for the ideal codec
  std::uint32_t block_bytes = 0;
  std::uint32_t k = 0;
  std::uint32_t symbols_received = 0;  // distinct ESIs at the moment of recovery
  Nanos first_symbol_at{0};
  Nanos delivered_at{0};
};

struct ReceiverMetrics {
  std::uint64_t packets = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t late_symbols = 0;  // for blocks already delivered or expired
  std::uint64_t malformed = 0;
  std::uint64_t protocol_errors = 0;
  std::uint64_t overflow = 0;  // new block refused at max_active_blocks
  std::uint64_t expired = 0;
  std::uint64_t delivered = 0;
};

// Sans-I/O receiver: feed data packets, poll for feedback.
class ReceiverEngine {
 public:
  explicit ReceiverEngine(ReceiverConfig config = {});
  ~ReceiverEngine();
  ReceiverEngine(ReceiverEngine&&) noexcept;
  ReceiverEngine& operator=(ReceiverEngine&&) noexcept;

  // Returns the recovered block on the packet that completes it. Throws
  // Error(protocol_error) when the header disagrees with an earlier packet
  // of the same block, Error(malformed_symbol) on a payload size mismatch.
  std::optional<DeliveredBlock> on_data_packet(const wire::DataPacketHeader& header,
                                               std::span<const std::uint8_t> payload, Nanos now);
  // Untrusted datagram: parse errors and protocol errors are counted, not thrown.
  std::optional<DeliveredBlock> on_datagram(std::span<const std::uint8_t> bytes, Nanos now);

  // Counters plus one entry per active block, ascending block_id.
  wire::FeedbackPacket make_feedback() const;

  // Forgets delivered blocks older than `retention`; returns how many.
  std::size_t gc_delivered(Nanos now, Nanos retention);
  // Applies active_timeout.
  void tick(Nanos now);

  std::uint64_t highest_seq_seen() const noexcept { return highest_; }
  std::uint64_t packets_received() const noexcept { return received_; }
  std::size_t active_blocks() const noexcept { return active_count_; }
  bool is_delivered(BlockId id) const;
  const ReceiverMetrics& metrics() const noexcept { return metrics_; }

 private:
  struct Block;

  bool forgotten(BlockId id) const;
  void forget(BlockId id);

  ReceiverConfig config_;
  std::map<BlockId, std::unique_ptr<Block>> blocks_;
  // Closed ranges [first, last] of ids whose state was dropped.
  std::map<BlockId, BlockId> forgotten_;
  std::size_t active_count_ = 0;
  std::uint64_t highest_ = wire::kNoSequence;
  std::uint64_t received_ = 0;
  ReceiverMetrics metrics_;
};

// Optional in-order release on top of the receiver: holds recovered blocks
// until their predecessors arrive or `max_wait` has passed, then skips gaps.
class InOrderDelivery {
 public:
  explicit InOrderDelivery(Nanos max_wait, BlockId first = 0) : max_wait_(max_wait), next_(first) {}

  std::vector<DeliveredBlock> push(DeliveredBlock block, Nanos now);
  std::vector<DeliveredBlock> poll(Nanos now);
  std::uint64_t skipped() const noexcept { return skipped_; }
  std::size_t held() const noexcept { return held_.size(); }

 private:
  struct Held {
    DeliveredBlock block;
    Nanos since;
  };

  void drain(std::vector<DeliveredBlock>& out);

  Nanos max_wait_;
  BlockId next_;
  std::map<BlockId, Held> held_;
  std::uint64_t skipped_ = 0;
};

}  // namespace lq
