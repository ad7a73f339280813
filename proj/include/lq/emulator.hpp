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

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "lq/codec.hpp"
#include "lq/estimator.hpp"
#include "lq/loss_trace.hpp"
#include "lq/planner.hpp"

namespace lq::emu {

struct StreamProfile {
  double fps = 30.0;
  std::vector<std::uint32_t> frame_sizes{40000};  // repeating pattern, bytes
  double duration_s = 60.0;

  std::uint32_t frames() const noexcept;
  std::uint32_t frame_size(std::uint32_t frame) const noexcept {
    return frame_sizes[frame % frame_sizes.size()];
  }
  void validate() const;
};

struct ImpairmentProfile {
  double forward_delay_ms = 20.0;
  double reverse_delay_ms = 20.0;
  LossTrace loss;  // forward path
  double reverse_loss = 0.0;
  double rate_cap_mbps = 0.0;  // forward link rate; 0 means unlimited
  std::uint64_t seed = 1;
  void validate() const;
};

struct EmuConfig {
  StreamProfile stream;
  ImpairmentProfile impairment;
  PlanParams plan;
  EstimatorConfig estimator;
  CodecKind codec = CodecKind::rlc;
  std::uint16_t symbol_size = kDefaultSymbolSize;
  // Receiver feedback: after this many packets, or feedback_interval_ms
  // after the previous feedback if anything arrived since.
  std::uint32_t feedback_every_packets = 16;
  double feedback_interval_ms = 5.0;
  // 0 picks rtt + feedback interval + 2 ms.
  double in_flight_timeout_ms = 0.0;
  double drain_s = 5.0;  // run past the last frame for stragglers
  // Sleep so virtual time tracks wall time. Results stay on virtual time.
  bool real_time = false;
  void validate() const;
};

struct FrameRow {
  std::uint64_t frame_id = 0;
  double t_avail_ms = 0.0;
  double t_deliver_ms = -1.0;  // -1 when never delivered
  double latency_ms = -1.0;
  std::uint32_t k_symbols = 0;
  std::uint64_t symbols_sent = 0;
  std::uint64_t symbols_received = 0;
  double loss_rate_scheduled = 0.0;  // forward loss at t_avail

  bool delivered() const noexcept { return t_deliver_ms >= 0.0; }
  double sent_ratio() const noexcept { return static_cast<double>(symbols_sent) / k_symbols; }
  double recv_ratio() const noexcept { return static_cast<double>(symbols_received) / k_symbols; }
};

// Forward-path packets between consecutive loss breakpoints.
struct SegmentStat {
  double t_begin_s = 0.0;
  double t_end_s = std::numeric_limits<double>::infinity();
  double scheduled_rate = 0.0;  // at t_begin_s
  std::uint64_t packets = 0;
  std::uint64_t dropped = 0;

  double realized() const noexcept { return packets ? static_cast<double>(dropped) / packets : 0.0; }
};

struct EmuResult {
  std::vector<FrameRow> frames;
  std::vector<SegmentStat> segments;
  std::uint64_t forward_packets = 0;
  std::uint64_t forward_bytes = 0;
  std::uint64_t forward_losses = 0;
  std::uint64_t feedback_packets = 0;
  std::uint64_t feedback_bytes = 0;
  std::uint64_t feedback_losses = 0;
  std::uint64_t duplicate_sends = 0;  // repeated (block, esi)
  std::uint64_t corrupt_blocks = 0;   // recovered bytes differ from the source
  std::uint64_t topup_symbols = 0;
  double end_ms = 0.0;

  std::uint64_t delivered() const noexcept;
};

EmuResult run_emulated(const EmuConfig& config);

// frame_id,t_avail_ms,t_deliver_ms,latency_ms,k_symbols,symbols_sent,
// symbols_received,sent_ratio,recv_ratio,loss_rate_scheduled
void write_frames_csv(std::ostream& out, const EmuResult& result);

}  // namespace lq::emu
