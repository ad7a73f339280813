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

#include "lq/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <ostream>
#include <queue>
#include <string>

#include "lq/receiver.hpp"
#include "lq/sender.hpp"

namespace lq::sim {

namespace {

Nanos slot_time(const SimConfig& cfg, std::uint64_t slot) {
  return Nanos(static_cast<std::int64_t>(std::llround(static_cast<double>(slot) * cfg.slot_ms() * 1e6)));
}

std::uint64_t last_slot(const SimConfig& cfg) {
  const std::uint64_t drain = cfg.drain_slots ? cfg.drain_slots : 60ull * cfg.slots_per_frame;
  return std::uint64_t{cfg.frames} * cfg.slots_per_frame + drain;
}

std::vector<FrameRecord> blank_frames(const SimConfig& cfg) {
  std::vector<FrameRecord> frames(cfg.frames);
  for (std::uint32_t f = 0; f < cfg.frames; ++f) {
    frames[f].frame_id = f;
    frames[f].avail_slot = std::uint64_t{f} * cfg.slots_per_frame;
    frames[f].t_avail_ms = static_cast<double>(frames[f].avail_slot) * cfg.slot_ms();
  }
  return frames;
}

void mark_delivered(FrameRecord& f, std::uint64_t slot, const SimConfig& cfg) {
  f.delivered_slot = slot;
  f.t_delivered_ms = static_cast<double>(slot) * cfg.slot_ms();
  f.latency_ms = f.t_delivered_ms - f.t_avail_ms;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void SimConfig::validate() const {
  if (packets_per_frame == 0) throw Error(Errc::invalid_argument, "packets_per_frame must be >= 1");
  if (slots_per_frame < packets_per_frame)
    throw Error(Errc::invalid_argument, "slots_per_frame must be >= packets_per_frame");
  if (!(frame_interval_ms > 0.0)) throw Error(Errc::invalid_argument, "frame_interval_ms must be positive");
  if (feedback_every_slots == 0) throw Error(Errc::invalid_argument, "feedback_every_slots must be >= 1");
  if (!(payload_bits > 0.0)) throw Error(Errc::invalid_argument, "payload_bits must be positive");
  if (!(warmup_s >= 0.0)) throw Error(Errc::invalid_argument, "warmup_s must be >= 0");
}

LossRealization::LossRealization(const SimConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

double LossRealization::rate(std::uint64_t slot) const {
  if (cfg_.forced_drops) return cfg_.forced_drops->count(slot) ? 1.0 : 0.0;
  return cfg_.loss.at(static_cast<double>(slot) * cfg_.slot_ms() / 1000.0);
}

bool LossRealization::dropped(std::uint64_t slot) {
  if (cfg_.forced_drops) return cfg_.forced_drops->count(slot) != 0;
  while (draws_.size() <= slot) draws_.push_back(static_cast<double>(rng_() >> 11) * 0x1.0p-53);
  return draws_[slot] < rate(slot);
}

RunResult run_liquid(const SimConfig& cfg, const PlanParams& params) {
  cfg.validate();
  params.validate();
  LossRealization loss(cfg);
  const auto codec = make_codec(CodecKind::ideal);

  SenderConfig scfg;
  scfg.codec = codec;
  scfg.symbol_size = 1;
  scfg.plan = params;
  scfg.estimator = cfg.estimator;
  // Feedback about slot t is visible from slot t + max(2D, 1); presume loss
  // exactly then, the same slot the oracle may retransmit.
  const double visible = std::max(2.0 * cfg.one_way_delay_slots, 1.0);
  scfg.in_flight_timeout = Nanos(std::llround((visible - 0.5) * cfg.slot_ms() * 1e6));
  SenderEngine tx(scfg);

  ReceiverConfig rcfg;
  rcfg.codec = codec;
  rcfg.active_timeout = Nanos{0};
  ReceiverEngine rx(rcfg);

  RunResult r;
  r.frames = blank_frames(cfg);
  std::vector<std::vector<bool>> esi_used(cfg.frames);
  std::deque<std::pair<std::uint64_t, wire::DataPacketHeader>> in_transit;
  std::deque<std::pair<std::uint64_t, wire::FeedbackPacket>> feedback;
  const std::vector<std::uint8_t> payload(1, 0);
  const std::uint64_t d = cfg.one_way_delay_slots;
  const std::uint64_t s = cfg.slots_per_frame;
  const std::uint64_t end = last_slot(cfg);
  std::uint32_t delivered = 0;

  std::uint64_t t = 0;
  for (; t < end; ++t) {
    const Nanos now = slot_time(cfg, t);
    while (!feedback.empty() && feedback.front().first <= t) {
      tx.on_feedback(feedback.front().second, now);
      feedback.pop_front();
    }
    if (t % s == 0 && t / s < cfg.frames) tx.submit_size(cfg.packets_per_frame, now);

    if (auto p = tx.next_packet(now)) {
      const auto& h = p->header;
      auto& used = esi_used.at(h.block_id);
      if (used.size() <= h.esi) used.resize(h.esi + 1, false);
      if (used[h.esi]) ++r.duplicate_sends;
      used[h.esi] = true;
      ++r.sends;
      ++r.frames[h.block_id].packets_sent;
      r.send_slots.push_back(t);
      if (loss.dropped(t)) {
        ++r.losses;
      } else {
        in_transit.emplace_back(t + d, h);
      }
    }

    while (!in_transit.empty() && in_transit.front().first <= t) {
      const auto h = in_transit.front().second;
      in_transit.pop_front();
      ++r.arrivals;
      ++r.frames[h.block_id].packets_arrived;
      if (auto got = rx.on_data_packet(h, payload, now)) {
        mark_delivered(r.frames[got->block_id], t, cfg);
        ++delivered;
      }
    }
    if (t % cfg.feedback_every_slots == 0) feedback.emplace_back(t + d, rx.make_feedback());
    if (t % s == 0) rx.gc_delivered(now, Nanos{0});

    if (delivered == cfg.frames && !tx.has_pending() && in_transit.empty()) {
      ++t;
      break;
    }
  }
  r.slots_run = t;
  return r;
}

RunResult run_retx_oracle(const SimConfig& cfg) {
  cfg.validate();
  LossRealization loss(cfg);

  struct Item {
    std::uint64_t frame;
    std::uint64_t eligible;
    std::uint32_t idx;
  };
  auto older = [](const Item& a, const Item& b) {
    if (a.frame != b.frame) return a.frame > b.frame;
    if (a.eligible != b.eligible) return a.eligible > b.eligible;
    return a.idx > b.idx;
  };
  auto later = [](const Item& a, const Item& b) { return a.eligible > b.eligible; };
  std::priority_queue<Item, std::vector<Item>, decltype(older)> ready(older);
  std::priority_queue<Item, std::vector<Item>, decltype(later)> waiting(later);

  RunResult r;
  r.frames = blank_frames(cfg);
  std::vector<std::uint32_t> missing(cfg.frames, cfg.packets_per_frame);
  std::deque<std::pair<std::uint64_t, std::uint64_t>> in_transit;  // (arrival slot, frame)
  const std::uint64_t d = cfg.one_way_delay_slots;
  const std::uint64_t s = cfg.slots_per_frame;
  const std::uint64_t end = last_slot(cfg);
  std::uint32_t delivered = 0;

  std::uint64_t t = 0;
  for (; t < end; ++t) {
    if (t % s == 0 && t / s < cfg.frames)
      for (std::uint32_t i = 0; i < cfg.packets_per_frame; ++i) ready.push({t / s, t, i});
    while (!waiting.empty() && waiting.top().eligible <= t) {
      ready.push(waiting.top());
      waiting.pop();
    }
    if (!ready.empty()) {
      const Item it = ready.top();
      ready.pop();
      ++r.sends;
      ++r.frames[it.frame].packets_sent;
      r.send_slots.push_back(t);
      if (loss.dropped(t)) {
        ++r.losses;
        // Loss is known when the packet would have arrived (t + D); the
        // request reaches the sender D later.
        waiting.push({it.frame, t + 2 * d, it.idx});
      } else {
        in_transit.emplace_back(t + d, it.frame);
      }
    }
    while (!in_transit.empty() && in_transit.front().first <= t) {
      const std::uint64_t f = in_transit.front().second;
      in_transit.pop_front();
      ++r.arrivals;
      ++r.frames[f].packets_arrived;
      if (--missing[f] == 0) {
        mark_delivered(r.frames[f], t, cfg);
        ++delivered;
      }
    }
    if (delivered == cfg.frames) {
      ++t;
      break;
    }
  }
  r.slots_run = t;
  return r;
}

PairedResult paired_run(const SimConfig& cfg, const PlanParams& params) {
  return {run_liquid(cfg, params), run_retx_oracle(cfg)};
}

std::vector<std::uint64_t> packets_per_bin(const RunResult& run, const SimConfig& cfg, double origin_s,
                                           double width_s, double end_s) {
  if (!(width_s > 0.0)) throw Error(Errc::invalid_argument, "bin width must be positive");
  if (end_s <= origin_s) return {};
  const auto bins = static_cast<std::size_t>(std::ceil((end_s - origin_s) / width_s - 1e-12));
  std::vector<std::uint64_t> out(bins, 0);
  for (std::uint64_t slot : run.send_slots) {
    const double ts = static_cast<double>(slot) * cfg.slot_ms() / 1000.0;
    if (ts < origin_s) continue;
    const auto b = static_cast<std::size_t>((ts - origin_s) / width_s);
    if (b < bins) ++out[b];
  }
  return out;
}

void write_frames_csv(std::ostream& out, const PairedResult& result) {
  out << "protocol,frame_id,t_avail_ms,t_delivered_ms,latency_ms,packets_sent,packets_arrived\n";
  auto rows = [&](const char* name, const RunResult& run) {
    for (const auto& f : run.frames) {
      out << name << ',' << f.frame_id << ',' << fmt(f.t_avail_ms) << ','
          << (f.delivered() ? fmt(f.t_delivered_ms) : std::string("-1")) << ','
          << (f.delivered() ? fmt(f.latency_ms) : std::string("-1")) << ',' << f.packets_sent << ','
          << f.packets_arrived << '\n';
    }
  };
  rows("liquid", result.liquid);
  rows("oracle", result.oracle);
}

void write_bandwidth_csv(std::ostream& out, const PairedResult& result, const SimConfig& cfg) {
  const std::uint64_t slots = std::max(result.liquid.slots_run, result.oracle.slots_run);
  const double end_s = static_cast<double>(slots) * cfg.slot_ms() / 1000.0;
  const auto liquid = packets_per_bin(result.liquid, cfg, 0.0, 1.0, end_s);
  const auto oracle = packets_per_bin(result.oracle, cfg, 0.0, 1.0, end_s);
  LossRealization loss(cfg);
  out << "t_s,liquid_mbps,oracle_mbps,loss_rate\n";
  for (std::size_t b = 0; b < liquid.size(); ++b) {
    const double start = static_cast<double>(b);
    const double width = std::min(1.0, end_s - start);
    double rate_sum = 0.0;
    std::uint64_t n = 0;
    for (auto slot = static_cast<std::uint64_t>(std::ceil(start * 1000.0 / cfg.slot_ms()));
         slot < slots && static_cast<double>(slot) * cfg.slot_ms() / 1000.0 < start + 1.0; ++slot, ++n)
      rate_sum += loss.rate(slot);
    auto mbps = [&](std::uint64_t packets) {
      return static_cast<double>(packets) * cfg.payload_bits / 1e6 / width;
    };
    out << fmt(start) << ',' << fmt(mbps(liquid[b])) << ',' << fmt(mbps(oracle[b])) << ','
        << fmt(n ? rate_sum / static_cast<double>(n) : 0.0) << '\n';
  }
}

}  // namespace lq::sim
