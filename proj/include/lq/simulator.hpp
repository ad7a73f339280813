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
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "lq/estimator.hpp"
#include "lq/loss_trace.hpp"
#include "lq/planner.hpp"

namespace lq::sim {

struct SimConfig {
  std::uint32_t frames = 240;
  std::uint32_t packets_per_frame = 500;  // K
  std::uint32_t slots_per_frame = 800;    // S
  std::uint32_t one_way_delay_slots = 400;
  double frame_interval_ms = 33.3;
  LossTrace loss = spike_trace();
  std::uint64_t seed = 1;
  // The receiver's counters are sampled every this many slots and become
  // visible to the sender one_way_delay_slots later.
  std::uint32_t feedback_every_slots = 1;
  double payload_bits = 10000;
  double warmup_s = 0.3;
  // Extra slots after the last frame for stragglers; 0 picks 60 intervals.
  std::uint64_t drain_slots = 0;
  EstimatorConfig estimator;
  // When set, exactly these slots drop their packet and `loss` is ignored.
  std::optional<std::set<std::uint64_t>> forced_drops;

  double slot_ms() const noexcept { return frame_interval_ms / slots_per_frame; }
  void validate() const;  // throws Error(invalid_argument)
};

struct FrameRecord {
  std::uint64_t frame_id = 0;
  std::uint64_t avail_slot = 0;
  std::optional<std::uint64_t> delivered_slot;
  double t_avail_ms = 0.0;
  double t_delivered_ms = -1.0;  // -1 when never delivered
  double latency_ms = -1.0;
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_arrived = 0;

  bool delivered() const noexcept { return delivered_slot.has_value(); }
  std::uint64_t latency_slots() const noexcept { return delivered_slot ? *delivered_slot - avail_slot : 0; }
};

struct RunResult {
  std::vector<FrameRecord> frames;
  std::vector<std::uint64_t> send_slots;  // ascending
  std::uint64_t sends = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t losses = 0;
  std::uint64_t duplicate_sends = 0;  // repeated (block, esi); liquid only
  std::uint64_t slots_run = 0;
};

// Per-slot uniform draws shared by both protocols: the packet in slot t is
// dropped iff draw(t) < loss(t). draw(t) is the t-th output of
// mt19937_64(seed), top 53 bits scaled to [0, 1).
class LossRealization {
 public:
  explicit LossRealization(const SimConfig& cfg);
  bool dropped(std::uint64_t slot);
  double rate(std::uint64_t slot) const;

 private:
  const SimConfig& cfg_;
  std::mt19937_64 rng_;
  std::vector<double> draws_;
};

RunResult run_liquid(const SimConfig& cfg, const PlanParams& params);
RunResult run_retx_oracle(const SimConfig& cfg);

struct PairedResult {
  RunResult liquid;
  RunResult oracle;
};

PairedResult paired_run(const SimConfig& cfg, const PlanParams& params);

// Packets sent per bin of `width_s` seconds starting at `origin_s`, covering
// every bin that overlaps [origin_s, end_s).
std::vector<std::uint64_t> packets_per_bin(const RunResult& run, const SimConfig& cfg, double origin_s,
                                           double width_s, double end_s);

// frames.csv: protocol,frame_id,t_avail_ms,t_delivered_ms,latency_ms,packets_sent,packets_arrived
void write_frames_csv(std::ostream& out, const PairedResult& result);
// bandwidth.csv: t_s,liquid_mbps,oracle_mbps,loss_rate (1 s bins from 0; the
// last bin may be shorter and is scaled by its length).
void write_bandwidth_csv(std::ostream& out, const PairedResult& result, const SimConfig& cfg);

}  // namespace lq::sim
