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

#include "lq/emulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <ostream>
#include <random>
#include <string>
#include <thread>

#include "lq/receiver.hpp"
#include "lq/sender.hpp"
#include "lq/wire.hpp"

namespace lq::emu {

namespace {

constexpr Nanos kNever = Nanos::max();
constexpr Nanos kTickPeriod = std::chrono::milliseconds(5);

Nanos from_ms(double ms) { return Nanos(static_cast<std::int64_t>(std::llround(ms * 1e6))); }
double to_ms(Nanos t) { return static_cast<double>(t.count()) / 1e6; }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<std::uint8_t> frame_bytes(std::uint64_t seed, std::uint32_t frame, std::uint32_t size) {
  std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ull * (frame + 1)));
  std::vector<std::uint8_t> out(size);
  for (std::size_t i = 0; i < size; i += 8) {
    std::uint64_t w = rng();
    for (std::size_t j = i; j < std::min<std::size_t>(i + 8, size); ++j, w >>= 8)
      out[j] = static_cast<std::uint8_t>(w);
  }
  return out;
}

struct Datagram {
  Nanos at;
  std::vector<std::uint8_t> bytes;
};

}  // namespace

std::uint32_t StreamProfile::frames() const noexcept {
  return static_cast<std::uint32_t>(std::llround(duration_s * fps));
}

void StreamProfile::validate() const {
  if (!(fps > 0.0)) throw Error(Errc::invalid_argument, "fps must be positive");
  if (!(duration_s > 0.0)) throw Error(Errc::invalid_argument, "duration_s must be positive");
  if (frame_sizes.empty()) throw Error(Errc::invalid_argument, "frame_sizes must not be empty");
  for (auto s : frame_sizes)
    if (s == 0) throw Error(Errc::invalid_argument, "frame sizes must be >= 1 byte");
  if (frames() == 0) throw Error(Errc::invalid_argument, "stream has no frames");
}

void ImpairmentProfile::validate() const {
  if (!(forward_delay_ms >= 0.0) || !(reverse_delay_ms >= 0.0))
    throw Error(Errc::invalid_argument, "delays must be >= 0");
  if (!(reverse_loss >= 0.0 && reverse_loss <= 1.0))
    throw Error(Errc::invalid_argument, "reverse_loss must be in [0, 1]");
  if (!(rate_cap_mbps >= 0.0)) throw Error(Errc::invalid_argument, "rate_cap_mbps must be >= 0");
}

void EmuConfig::validate() const {
  stream.validate();
  impairment.validate();
  plan.validate();
  if (symbol_size == 0) throw Error(Errc::invalid_argument, "symbol_size must be >= 1");
  if (feedback_every_packets == 0) throw Error(Errc::invalid_argument, "feedback_every_packets must be >= 1");
  if (!(feedback_interval_ms > 0.0)) throw Error(Errc::invalid_argument, "feedback_interval_ms must be positive");
  if (!(in_flight_timeout_ms >= 0.0)) throw Error(Errc::invalid_argument, "in_flight_timeout_ms must be >= 0");
  if (!(drain_s >= 0.0)) throw Error(Errc::invalid_argument, "drain_s must be >= 0");
}

std::uint64_t EmuResult::delivered() const noexcept {
  return static_cast<std::uint64_t>(
      std::count_if(frames.begin(), frames.end(), [](const FrameRow& f) { return f.delivered(); }));
}

EmuResult run_emulated(const EmuConfig& cfg) {
  cfg.validate();
  const auto& imp = cfg.impairment;
  const auto codec = make_codec(cfg.codec);
  const Nanos fwd_delay = from_ms(imp.forward_delay_ms);
  const Nanos rev_delay = from_ms(imp.reverse_delay_ms);
  const Nanos fb_interval = from_ms(cfg.feedback_interval_ms);

  SenderConfig scfg;
  scfg.codec = codec;
  scfg.symbol_size = cfg.symbol_size;
  scfg.plan = cfg.plan;
  scfg.estimator = cfg.estimator;
  scfg.rtt = std::max(fwd_delay + rev_delay, Nanos(std::chrono::milliseconds(1)));
  scfg.in_flight_timeout = cfg.in_flight_timeout_ms > 0.0
                               ? from_ms(cfg.in_flight_timeout_ms)
                               : fwd_delay + rev_delay + fb_interval + std::chrono::milliseconds(2);
  SenderEngine tx(scfg);
  ReceiverConfig rcfg;
  rcfg.codec = codec;
  ReceiverEngine rx(rcfg);

  std::mt19937_64 fwd_rng(imp.seed);
  std::mt19937_64 rev_rng(imp.seed ^ 0xA0761D6478BD642Full);
  auto draw = [](std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  const std::uint32_t n_frames = cfg.stream.frames();
  auto frame_time = [&](std::uint32_t f) {
    return Nanos(static_cast<std::int64_t>(std::llround(f * 1e9 / cfg.stream.fps)));
  };
  const Nanos end_time = frame_time(n_frames) + from_ms(cfg.drain_s * 1000.0);

  EmuResult r;
  r.frames.resize(n_frames);
  const auto& points = imp.loss.points();
  for (std::size_t i = 0; i < points.size(); ++i) {
    SegmentStat s;
    s.t_begin_s = points[i].time_s;
    if (i + 1 < points.size()) s.t_end_s = points[i + 1].time_s;
    s.scheduled_rate = points[i].rate;
    r.segments.push_back(s);
  }
  auto segment_of = [&](double ts) -> SegmentStat& {
    auto it = std::upper_bound(points.begin(), points.end(), ts,
                               [](double v, const Breakpoint& b) { return v < b.time_s; });
    const auto idx = it == points.begin() ? 0 : static_cast<std::size_t>(it - points.begin()) - 1;
    return r.segments[idx];
  };

  std::vector<std::vector<std::uint8_t>> sources(n_frames);
  std::vector<EsiSet> esis;
  esis.reserve(n_frames);
  std::deque<Datagram> forward, reverse;
  std::uint32_t next_frame = 0;
  std::uint64_t delivered = 0;
  Nanos link_free{0};
  Nanos retry_at{0};
  Nanos next_tick{0};
  Nanos last_feedback{0};
  std::uint32_t since_feedback = 0;
  const double bytes_per_ns = imp.rate_cap_mbps > 0.0 ? imp.rate_cap_mbps * 1e6 / 8.0 / 1e9 : 0.0;

  auto send_feedback = [&](Nanos now) {
    auto bytes = wire::encode_feedback(rx.make_feedback());
    ++r.feedback_packets;
    r.feedback_bytes += bytes.size();
    last_feedback = now;
    since_feedback = 0;
    if (imp.reverse_loss > 0.0 && draw(rev_rng) < imp.reverse_loss) {
      ++r.feedback_losses;
      return;
    }
    reverse.push_back({now + rev_delay, std::move(bytes)});
  };

  const auto wall_start = std::chrono::steady_clock::now();
  Nanos t{0};
  while (true) {
    if (next_frame == n_frames && delivered == n_frames && !tx.has_pending() && forward.empty()) break;
    Nanos next = kNever;
    if (!reverse.empty()) next = std::min(next, reverse.front().at);
    if (next_frame < n_frames) next = std::min(next, frame_time(next_frame));
    if (tx.has_pending()) next = std::min(next, std::max({link_free, retry_at, t}));
    if (!forward.empty()) next = std::min(next, forward.front().at);
    if (since_feedback > 0) next = std::min(next, std::max(last_feedback + fb_interval, t));
    next = std::min(next, next_tick);
    if (next > end_time) break;
    t = next;
    if (cfg.real_time) std::this_thread::sleep_until(wall_start + t);

    while (!reverse.empty() && reverse.front().at <= t) {
      tx.on_feedback(wire::decode_feedback(reverse.front().bytes), t);
      reverse.pop_front();
    }

    while (next_frame < n_frames && frame_time(next_frame) <= t) {
      const std::uint32_t size = cfg.stream.frame_size(next_frame);
      BlockId id;
      if (codec->needs_data()) {
        sources[next_frame] = frame_bytes(imp.seed, next_frame, size);
        id = tx.submit(sources[next_frame], t);
      } else {
        id = tx.submit_size(size, t);
      }
      auto& row = r.frames[id];
      row.frame_id = id;
      row.t_avail_ms = to_ms(t);
      row.loss_rate_scheduled = imp.loss.at(row.t_avail_ms / 1000.0);
      row.k_symbols = tx.block(id, t)->k;
      esis.emplace_back(row.k_symbols);
      ++next_frame;
    }

    if (next_tick <= t) {
      tx.tick(t);
      rx.tick(t);
      rx.gc_delivered(t, std::chrono::seconds(1));
      next_tick = t + kTickPeriod;
    }

    while (tx.has_pending() && link_free <= t && retry_at <= t) {
      auto pkt = tx.next_packet(t);
      if (!pkt) {
        const auto iv = tx.config().pacing_interval;
        retry_at = iv.count() > 0 ? Nanos((t.count() / iv.count() + 1) * iv.count()) : t + Nanos(1);
        break;
      }
      const auto& h = pkt->header;
      auto& row = r.frames[h.block_id];
      ++row.symbols_sent;
      if (!esis[h.block_id].insert(h.esi)) ++r.duplicate_sends;
      auto bytes = pkt->serialize();
      ++r.forward_packets;
      r.forward_bytes += bytes.size();
      const Nanos ser = bytes_per_ns > 0.0
                            ? Nanos(static_cast<std::int64_t>(std::ceil(bytes.size() / bytes_per_ns)))
                            : Nanos{0};
      link_free = t + ser;
      auto& seg = segment_of(to_ms(t) / 1000.0);
      ++seg.packets;
      if (draw(fwd_rng) < imp.loss.at(to_ms(t) / 1000.0)) {
        ++seg.dropped;
        ++r.forward_losses;
        continue;
      }
      forward.push_back({t + ser + fwd_delay, std::move(bytes)});
    }

    while (!forward.empty() && forward.front().at <= t) {
      const auto bytes = std::move(forward.front().bytes);
      forward.pop_front();
      const auto view = wire::decode_data_packet(bytes);
      ++r.frames[view.header.block_id].symbols_received;
      if (auto got = rx.on_datagram(bytes, t)) {
        auto& row = r.frames[got->block_id];
        row.t_deliver_ms = to_ms(t);
        row.latency_ms = row.t_deliver_ms - row.t_avail_ms;
        if (codec->needs_data() && got->data != sources[got->block_id]) ++r.corrupt_blocks;
        sources[got->block_id] = {};
        ++delivered;
      }
      if (++since_feedback >= cfg.feedback_every_packets) send_feedback(t);
    }
    if (since_feedback > 0 && t >= last_feedback + fb_interval) send_feedback(t);
  }
  r.end_ms = to_ms(t);
  r.topup_symbols = tx.metrics().topup_symbols;
  return r;
}

void write_frames_csv(std::ostream& out, const EmuResult& result) {
  out << "frame_id,t_avail_ms,t_deliver_ms,latency_ms,k_symbols,symbols_sent,symbols_received,"
         "sent_ratio,recv_ratio,loss_rate_scheduled\n";
  for (const auto& f : result.frames) {
    out << f.frame_id << ',' << fmt(f.t_avail_ms) << ','
        << (f.delivered() ? fmt(f.t_deliver_ms) : std::string("-1")) << ','
        << (f.delivered() ? fmt(f.latency_ms) : std::string("-1")) << ',' << f.k_symbols << ','
        << f.symbols_sent << ',' << f.symbols_received << ',' << fmt(f.sent_ratio()) << ','
        << fmt(f.recv_ratio()) << ',' << fmt(f.loss_rate_scheduled) << '\n';
  }
}

}  // namespace lq::emu
