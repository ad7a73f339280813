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
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "lq/codec.hpp"
#include "lq/estimator.hpp"
#include "lq/planner.hpp"
#include "lq/wire.hpp"

namespace lq {

enum class SchedulePolicy { oldest_first, round_robin };

struct SenderConfig {
  std::shared_ptr<const Codec> codec;  // null means the random-linear codec
  std::uint16_t symbol_size = kDefaultSymbolSize;
  PlanParams plan;
  EstimatorConfig estimator;
  SchedulePolicy policy = SchedulePolicy::oldest_first;
  // At most this many packets per pacing_interval; 0 disables the cap.
  std::uint32_t max_packets_per_interval = 0;
  Nanos pacing_interval{0};
  // Expected round trip. Feedback silence longer than 4x this is flagged.
  Nanos rtt = std::chrono::milliseconds(40);
  // A symbol still beyond the feedback horizon this long after it was sent
  // is presumed lost and no longer counted as in flight. Without this a
  // lost final packet would never be noticed. 0 disables.
  Nanos in_flight_timeout = std::chrono::milliseconds(60);
  // Incomplete blocks older than this are abandoned; 0 keeps them forever.
  Nanos block_timeout{0};
};

struct OutgoingPacket {
  wire::DataPacketHeader header;
  std::vector<std::uint8_t> payload;

  std::vector<std::uint8_t> serialize() const { return wire::encode_data_packet(header, payload); }
};

struct SendPlan {
  BlockId block_id = 0;
  std::uint64_t additional_symbols = 0;
};

struct SenderBlockInfo {
  BlockId block_id = 0;
  std::uint32_t k = 0;
  std::uint32_t block_bytes = 0;
  Nanos created_at{0};
  std::uint64_t planned = 0;  // symbols the block is scheduled to send in total
  std::uint64_t symbols_sent = 0;
  Esi esi_next = 0;
  std::uint64_t reported_received = 0;
  std::uint64_t in_flight = 0;  // sent beyond the horizon and not timed out, plus queued
};

struct SenderMetrics {
  std::uint64_t packets_sent = 0;
  std::uint64_t feedback_received = 0;
  std::uint64_t stale_feedback = 0;
  std::uint64_t topup_symbols = 0;
  std::uint64_t blocks_submitted = 0;
  std::uint64_t blocks_completed = 0;
  std::uint64_t blocks_abandoned = 0;
  std::uint64_t feedback_silences = 0;
};

// Sans-I/O sender. Three inputs (submit, on_feedback, tick) and one output
// (next_packet); the caller owns clocks and sockets and must serialize calls.
class SenderEngine {
 public:
  explicit SenderEngine(SenderConfig config = {});
  ~SenderEngine();
  SenderEngine(SenderEngine&&) noexcept;
  SenderEngine& operator=(SenderEngine&&) noexcept;

  // Admits a block and schedules its initial symbols. Block ids are
  // assigned sequentially from 0.
  BlockId submit(std::span<const std::uint8_t> data, Nanos now);
  // For codecs that carry no data (the ideal codec used by the simulator).
  BlockId submit_size(std::uint32_t block_bytes, Nanos now);

  // Updates loss statistics, infers completed blocks and tops up deficient
  // ones. Stale feedback (either counter regressed) is counted and ignored.
  std::vector<SendPlan> on_feedback(const wire::FeedbackPacket& feedback, Nanos now);

  // Timeouts, feedback-silence detection, and a re-plan so symbols presumed
  // lost are replaced even when no feedback arrives.
  std::vector<SendPlan> tick(Nanos now);

  // Next datagram to send, or nullopt when idle or paced out. Stamps the
  // global sequence number.
  std::optional<OutgoingPacket> next_packet(Nanos now);
  bool has_pending() const noexcept { return pending_total_ > 0; }

  const LossStats& loss() const noexcept { return estimator_.stats(); }
  const SenderMetrics& metrics() const noexcept { return metrics_; }
  const SenderConfig& config() const noexcept { return config_; }
  std::optional<SenderBlockInfo> block(BlockId id, Nanos now = Nanos{0}) const;
  std::size_t active_blocks() const noexcept { return blocks_.size(); }
  std::uint64_t next_seq() const noexcept { return next_seq_; }
  bool feedback_silent() const noexcept { return silent_; }

 private:
  struct Block;

  BlockId admit(std::unique_ptr<BlockEncoder> encoder, std::uint32_t block_bytes, Nanos now);
  void schedule(Block& b, std::uint64_t additional);
  void retire(std::map<BlockId, std::unique_ptr<Block>>::iterator it);
  std::uint64_t in_flight(const Block& b, Nanos now) const;
  std::vector<SendPlan> replan(Nanos now);
  Block* pick();

  SenderConfig config_;
  LossEstimator estimator_;
  std::map<BlockId, std::unique_ptr<Block>> blocks_;
  BlockId next_block_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t pending_total_ = 0;
  FeedbackCounters last_feedback_;
  std::optional<Nanos> last_feedback_at_;
  bool silent_ = false;
  std::optional<BlockId> rr_cursor_;
  std::int64_t pacing_slot_ = -1;
  std::uint32_t paced_count_ = 0;
  SenderMetrics metrics_;
};

}  // namespace lq
