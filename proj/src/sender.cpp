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

#include "lq/sender.hpp"

#include <algorithm>
#include <limits>

namespace lq {

struct SenderEngine::Block {
  BlockId id = 0;
  std::uint32_t k = 0;
  std::uint32_t block_bytes = 0;
  Nanos created_at{0};
  std::unique_ptr<BlockEncoder> encoder;
  std::uint64_t planned = 0;
  std::uint64_t sent = 0;
  Esi esi_next = 0;
  std::uint64_t reported = 0;
  bool seen_active = false;
  // Lower bound on symbols known to have arrived, from per-window loss counts.
  std::uint64_t proven_received = 0;
  struct Sent {
    std::uint64_t seq;
    Nanos at;
  };
  std::deque<Sent> uncovered;  // beyond the feedback horizon, ascending seq

  std::uint64_t pending() const noexcept { return planned - sent; }
};

SenderEngine::SenderEngine(SenderConfig config)
    : config_(std::move(config)), estimator_(config_.estimator) {
  if (!config_.codec) config_.codec = make_codec(CodecKind::rlc);
  if (config_.symbol_size == 0) throw Error(Errc::invalid_argument, "symbol_size must be >= 1");
  if (config_.max_packets_per_interval > 0 && config_.pacing_interval.count() <= 0)
    throw Error(Errc::invalid_argument, "pacing cap needs a positive interval");
  config_.plan.validate();
}

SenderEngine::~SenderEngine() = default;
SenderEngine::SenderEngine(SenderEngine&&) noexcept = default;
SenderEngine& SenderEngine::operator=(SenderEngine&&) noexcept = default;

BlockId SenderEngine::submit(std::span<const std::uint8_t> data, Nanos now) {
  if (data.empty()) throw Error(Errc::invalid_argument, "block must not be empty");
  if (data.size() > std::numeric_limits<std::uint32_t>::max())
    throw Error(Errc::invalid_argument, "block larger than 4 GiB");
  const auto bytes = static_cast<std::uint32_t>(data.size());
  return admit(config_.codec->make_encoder(next_block_, bytes, data, config_.symbol_size), bytes, now);
}

BlockId SenderEngine::submit_size(std::uint32_t block_bytes, Nanos now) {
  if (config_.codec->needs_data()) throw Error(Errc::invalid_argument, "codec needs block data");
  if (block_bytes == 0) throw Error(Errc::invalid_argument, "block must not be empty");
  return admit(config_.codec->make_encoder(next_block_, block_bytes, {}, config_.symbol_size),
               block_bytes, now);
}

BlockId SenderEngine::admit(std::unique_ptr<BlockEncoder> encoder, std::uint32_t block_bytes, Nanos now) {
  auto b = std::make_unique<Block>();
  b->id = next_block_++;
  b->k = encoder->k();
  b->block_bytes = block_bytes;
  b->created_at = now;
  b->encoder = std::move(encoder);
  schedule(*b, plan_initial(b->k, estimator_.stats(), config_.plan));
  if (!last_feedback_at_ && blocks_.empty()) last_feedback_at_ = now;
  const BlockId id = b->id;
  blocks_.emplace(id, std::move(b));
  ++metrics_.blocks_submitted;
  return id;
}

void SenderEngine::schedule(Block& b, std::uint64_t additional) {
  const std::uint64_t esi_room = std::uint64_t{std::numeric_limits<Esi>::max()} - b.esi_next - b.pending();
  additional = std::min(additional, esi_room);
  b.planned += additional;
  pending_total_ += additional;
}

void SenderEngine::retire(std::map<BlockId, std::unique_ptr<Block>>::iterator it) {
  pending_total_ -= it->second->pending();
  blocks_.erase(it);
}

std::vector<SendPlan> SenderEngine::on_feedback(const wire::FeedbackPacket& feedback, Nanos now) {
  const auto cur = FeedbackCounters::from(feedback);
  if (cur.seq_span() < last_feedback_.seq_span() || cur.received < last_feedback_.received ||
      cur.received > cur.seq_span()) {
    ++metrics_.stale_feedback;
    return {};
  }
  ++metrics_.feedback_received;
  last_feedback_at_ = now;
  silent_ = false;

  const std::uint64_t d_span = cur.seq_span() - last_feedback_.seq_span();
  const std::uint64_t d_recv = cur.received - last_feedback_.received;
  const std::uint64_t window_losses = d_span > d_recv ? d_span - d_recv : 0;
  last_feedback_ = cur;
  estimator_.observe(cur);

  auto entries = feedback.entries;
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.block_id < b.block_id; });
  auto find_entry = [&](BlockId id) -> const wire::FeedbackEntry* {
    auto e = std::lower_bound(entries.begin(), entries.end(), id,
                              [](const auto& x, BlockId v) { return x.block_id < v; });
    return (e != entries.end() && e->block_id == id) ? &*e : nullptr;
  };

  // A block missing from the active list has either completed or had every
  // covered symbol lost; it counts as completed once it was listed before or
  // at least one of its symbols provably arrived.
  for (auto it = blocks_.begin(); it != blocks_.end();) {
    Block& b = *it->second;
    std::uint64_t newly_covered = 0;
    while (!b.uncovered.empty() && b.uncovered.front().seq < cur.seq_span()) {
      b.uncovered.pop_front();
      ++newly_covered;
    }
    if (newly_covered > window_losses) b.proven_received += newly_covered - window_losses;
    if (const auto* e = find_entry(b.id)) {
      b.seen_active = true;
      b.reported = e->symbols_received;
    } else if (b.seen_active || b.proven_received > 0) {
      ++metrics_.blocks_completed;
      retire(it++);
      continue;
    } else {
      b.reported = 0;
    }
    ++it;
  }

  return replan(now);
}

std::uint64_t SenderEngine::in_flight(const Block& b, Nanos now) const {
  std::uint64_t live = b.uncovered.size();
  if (config_.in_flight_timeout.count() > 0) {
    const Nanos cutoff = now - config_.in_flight_timeout;
    for (const auto& s : b.uncovered) {
      if (s.at > cutoff) break;
      --live;
    }
  }
  return live + b.pending();
}

std::vector<SendPlan> SenderEngine::replan(Nanos now) {
  std::vector<SendPlan> plans;
  const LossStats& stats = estimator_.stats();
  for (auto& [id, bp] : blocks_) {
    Block& b = *bp;
    std::uint64_t target = std::uint64_t{b.k} + surplus_symbols(b.k, config_.plan);
    // Listed as active with K symbols in: rank deficient, one more is enough.
    if (b.seen_active && b.reported >= b.k) target = std::max(target, b.reported + 1);
    const std::uint64_t n = plan_topup(b.k, b.reported, in_flight(b, now), stats, config_.plan, target);
    if (n == 0) continue;
    const std::uint64_t before = b.planned;
    schedule(b, n);
    metrics_.topup_symbols += b.planned - before;
    plans.push_back({id, b.planned - before});
  }
  return plans;
}

std::vector<SendPlan> SenderEngine::tick(Nanos now) {
  if (config_.block_timeout.count() > 0) {
    for (auto it = blocks_.begin(); it != blocks_.end();) {
      if (now - it->second->created_at >= config_.block_timeout) {
        ++metrics_.blocks_abandoned;
        retire(it++);
      } else {
        ++it;
      }
    }
  }
  if (!silent_ && !blocks_.empty() && last_feedback_at_ && now - *last_feedback_at_ > 4 * config_.rtt) {
    silent_ = true;
    ++metrics_.feedback_silences;
  }
  return replan(now);
}

SenderEngine::Block* SenderEngine::pick() {
  if (pending_total_ == 0) return nullptr;
  if (config_.policy == SchedulePolicy::round_robin) {
    auto start = rr_cursor_ ? blocks_.upper_bound(*rr_cursor_) : blocks_.begin();
    for (auto it = start; it != blocks_.end(); ++it)
      if (it->second->pending() > 0) return it->second.get();
    for (auto it = blocks_.begin(); it != start; ++it)
      if (it->second->pending() > 0) return it->second.get();
    return nullptr;
  }
  for (auto& [id, b] : blocks_)
    if (b->pending() > 0) return b.get();
  return nullptr;
}

std::optional<OutgoingPacket> SenderEngine::next_packet(Nanos now) {
  if (config_.max_packets_per_interval > 0) {
    const std::int64_t slot = now.count() / config_.pacing_interval.count();
    if (slot != pacing_slot_) {
      pacing_slot_ = slot;
      paced_count_ = 0;
    }
    if (paced_count_ >= config_.max_packets_per_interval) return std::nullopt;
  }
  Block* b = pick();
  if (!b) return std::nullopt;

  OutgoingPacket out;
  out.header.global_seq = next_seq_++;
  out.header.block_id = b->id;
  out.header.esi = b->esi_next++;
  out.header.block_size_bytes = b->block_bytes;
  out.header.symbol_size = config_.symbol_size;
  out.payload.resize(config_.symbol_size);
  b->encoder->encode(out.header.esi, out.payload);
  ++b->sent;
  --pending_total_;
  b->uncovered.push_back({out.header.global_seq, now});
  rr_cursor_ = b->id;
  ++paced_count_;
  ++metrics_.packets_sent;
  return out;
}

std::optional<SenderBlockInfo> SenderEngine::block(BlockId id, Nanos now) const {
  auto it = blocks_.find(id);
  if (it == blocks_.end()) return std::nullopt;
  const Block& b = *it->second;
  return SenderBlockInfo{b.id,   b.k,          b.block_bytes, b.created_at,
                         b.planned, b.sent,    b.esi_next,    b.reported,
                         in_flight(b, now)};
}

}  // namespace lq
