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

#include "liquid.h"

#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "lq/bench.hpp"
#include "lq/receiver.hpp"
#include "lq/scenario.hpp"
#include "lq/sender.hpp"
#include "lq/stats.hpp"
#include "lq/udp.hpp"
#include "lq/wire.hpp"

struct lq_sender {
  lq::SenderEngine engine;
  std::optional<std::vector<std::uint8_t>> held;  // produced but not yet copied out
};

struct lq_receiver {
  lq::ReceiverEngine engine;
  std::deque<lq::DeliveredBlock> ready;
};

namespace {

thread_local std::string g_last_error;

lq_status fail(lq_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

lq_status from_errc(lq::Errc code) {
  switch (code) {
    case lq::Errc::ok: return LQ_OK;
    case lq::Errc::invalid_argument: return LQ_INVALID_ARGUMENT;
    case lq::Errc::malformed_symbol:
    case lq::Errc::bad_magic:
    case lq::Errc::bad_version:
    case lq::Errc::truncated:
    case lq::Errc::wrong_type:
    case lq::Errc::malformed: return LQ_MALFORMED;
    case lq::Errc::stale_feedback:
    case lq::Errc::protocol_error: return LQ_PROTOCOL_ERROR;
    case lq::Errc::not_ready: return LQ_NOT_READY;
    case lq::Errc::scenario: return LQ_SCENARIO_INVALID;
    case lq::Errc::io: return LQ_IO_ERROR;
    case lq::Errc::bind: return LQ_BIND_FAILED;
    case lq::Errc::internal: return LQ_INTERNAL;
  }
  return LQ_INTERNAL;
}

template <class F>
lq_status guarded(F&& f) noexcept {
  try {
    return f();
  } catch (const lq::Error& e) {
    return fail(from_errc(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LQ_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LQ_INTERNAL, e.what());
  } catch (...) {
    return fail(LQ_INTERNAL, "unknown exception");
  }
}

#define LQ_REQUIRE(cond, what) \
  if (!(cond)) return fail(LQ_INVALID_ARGUMENT, what)

lq::Nanos ns(std::int64_t v) { return lq::Nanos{v}; }

std::shared_ptr<const lq::Codec> codec_of(lq_codec c) {
  if (c != LQ_CODEC_RLC && c != LQ_CODEC_IDEAL) throw lq::Error(lq::Errc::invalid_argument, "unknown codec");
  return lq::make_codec(c == LQ_CODEC_IDEAL ? lq::CodecKind::ideal : lq::CodecKind::rlc);
}

lq::SenderConfig to_cpp(const lq_sender_config& c) {
  if (c.c_extra < -1) throw lq::Error(lq::Errc::invalid_argument, "c_extra must be >= -1");
  if (c.alpha <= 0 || c.alpha > 1) throw lq::Error(lq::Errc::invalid_argument, "alpha must be in (0, 1]");
  if (c.symbol_size == 0) throw lq::Error(lq::Errc::invalid_argument, "symbol_size must be positive");
  if (c.pacing_interval_ns < 0 || c.rtt_ns < 0 || c.in_flight_timeout_ns < 0 || c.block_timeout_ns < 0)
    throw lq::Error(lq::Errc::invalid_argument, "durations must be non-negative");
  if (c.max_packets_per_interval > 0 && c.pacing_interval_ns == 0)
    throw lq::Error(lq::Errc::invalid_argument, "pacing needs a positive pacing_interval_ns");
  lq::SenderConfig out;
  out.codec = codec_of(c.codec);
  out.symbol_size = c.symbol_size;
  out.plan.z_var = c.z_var;
  out.plan.z_bin = c.z_bin;
  out.plan.p_cap = c.p_cap;
  if (c.c_extra >= 0) out.plan.c_extra = static_cast<std::uint32_t>(c.c_extra);
  out.plan.validate();
  out.estimator.alpha = c.alpha;
  out.estimator.min_sample_packets = c.min_sample_packets;
  out.estimator.subtract_sampling_noise = c.subtract_sampling_noise != 0;
  out.policy = c.round_robin ? lq::SchedulePolicy::round_robin : lq::SchedulePolicy::oldest_first;
  out.max_packets_per_interval = c.max_packets_per_interval;
  out.pacing_interval = ns(c.pacing_interval_ns);
  out.rtt = ns(c.rtt_ns);
  out.in_flight_timeout = ns(c.in_flight_timeout_ns);
  out.block_timeout = ns(c.block_timeout_ns);
  return out;
}

lq::ReceiverConfig to_cpp(const lq_receiver_config& c) {
  if (c.max_active_blocks == 0) throw lq::Error(lq::Errc::invalid_argument, "max_active_blocks must be positive");
  if (c.active_timeout_ns < 0) throw lq::Error(lq::Errc::invalid_argument, "active_timeout_ns must be >= 0");
  lq::ReceiverConfig out;
  out.codec = codec_of(c.codec);
  out.max_active_blocks = c.max_active_blocks;
  out.active_timeout = ns(c.active_timeout_ns);
  return out;
}

lq::udp::LinkOptions to_cpp(const lq_link_options& c) {
  if (c.feedback_every_packets == 0)
    throw lq::Error(lq::Errc::invalid_argument, "feedback_every_packets must be positive");
  if (c.feedback_interval_ns < 0) throw lq::Error(lq::Errc::invalid_argument, "feedback_interval_ns must be >= 0");
  if (!(c.induced_loss >= 0 && c.induced_loss < 1))
    throw lq::Error(lq::Errc::invalid_argument, "induced_loss must be in [0, 1)");
  lq::udp::LinkOptions out;
  out.feedback_every_packets = c.feedback_every_packets;
  out.feedback_interval = ns(c.feedback_interval_ns);
  out.induced_loss = c.induced_loss;
  out.seed = c.seed;
  return out;
}

void fill(lq_summary* out, const lq::scenario::Summary& s) {
  out->frames = s.frames;
  out->delivered = s.delivered;
  out->p50_ms = s.p50_ms;
  out->p95_ms = s.p95_ms;
  out->p99_ms = s.p99_ms;
  out->max_ms = s.max_ms;
  out->mean_overhead = s.mean_overhead;
  out->duplicate_sends = s.duplicate_sends;
}

void fill_latencies(lq_summary* out, std::vector<double> lat) {
  out->p50_ms = out->p95_ms = out->p99_ms = out->max_ms = 0;
  if (lat.empty()) return;
  const auto l = lq::summarize(lat);
  out->p50_ms = l.p50;
  out->p95_ms = l.p95;
  out->p99_ms = l.p99;
  out->max_ms = l.max;
}

std::ofstream open_csv(const char* path) {
  std::ofstream f(path);
  if (!f) throw lq::Error(lq::Errc::io, std::string("cannot write ") + path);
  return f;
}

lq_status copy_out(const void* src, size_t n, void* buf, size_t cap, size_t* len) {
  *len = n;
  if (cap < n) return fail(LQ_BUFFER_TOO_SMALL, "buffer too small: need " + std::to_string(n) + " bytes");
  if (n) std::memcpy(buf, src, n);
  return LQ_OK;
}

const char* mode_name(lq::scenario::Mode m) { return m == lq::scenario::Mode::simulate ? "simulate" : "emurun"; }

lq_mode to_c(lq::scenario::Mode m) {
  return m == lq::scenario::Mode::simulate ? LQ_MODE_SIMULATE : LQ_MODE_EMURUN;
}

}  // namespace

extern "C" {

const char* lq_status_str(lq_status status) {
  switch (status) {
    case LQ_OK: return "ok";
    case LQ_INVALID_ARGUMENT: return "invalid argument";
    case LQ_MALFORMED: return "malformed datagram";
    case LQ_PROTOCOL_ERROR: return "protocol error";
    case LQ_NOT_READY: return "not ready";
    case LQ_BUFFER_TOO_SMALL: return "buffer too small";
    case LQ_SCENARIO_INVALID: return "invalid scenario";
    case LQ_IO_ERROR: return "i/o error";
    case LQ_BIND_FAILED: return "bind failed";
    case LQ_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* lq_last_error(void) { return g_last_error.c_str(); }

const char* lq_version(void) { return "0.1.0"; }

// ---- sender

void lq_sender_config_default(lq_sender_config* config) {
  if (!config) return;
  const lq::SenderConfig d;
  *config = {};
  config->codec = LQ_CODEC_RLC;
  config->symbol_size = d.symbol_size;
  config->z_var = d.plan.z_var;
  config->z_bin = d.plan.z_bin;
  config->p_cap = d.plan.p_cap;
  config->c_extra = -1;
  config->alpha = d.estimator.alpha;
  config->min_sample_packets = d.estimator.min_sample_packets;
  config->subtract_sampling_noise = d.estimator.subtract_sampling_noise;
  config->round_robin = d.policy == lq::SchedulePolicy::round_robin;
  config->max_packets_per_interval = d.max_packets_per_interval;
  config->pacing_interval_ns = d.pacing_interval.count();
  config->rtt_ns = d.rtt.count();
  config->in_flight_timeout_ns = d.in_flight_timeout.count();
  config->block_timeout_ns = d.block_timeout.count();
}

lq_status lq_sender_new(const lq_sender_config* config, lq_sender** out) {
  LQ_REQUIRE(out, "out is null");
  *out = nullptr;
  return guarded([&] {
    lq_sender_config c;
    lq_sender_config_default(&c);
    if (config) c = *config;
    *out = new lq_sender{lq::SenderEngine(to_cpp(c)), std::nullopt};
    return LQ_OK;
  });
}

void lq_sender_free(lq_sender* sender) { delete sender; }

lq_status lq_sender_submit(lq_sender* sender, const uint8_t* data, size_t len, int64_t now_ns, uint64_t* block_id) {
  LQ_REQUIRE(sender, "sender is null");
  LQ_REQUIRE(data || len == 0, "data is null");
  LQ_REQUIRE(len <= std::numeric_limits<std::uint32_t>::max(), "block larger than 4 GiB");
  return guarded([&] {
    lq::BlockId id;
    if (sender->engine.config().codec && !sender->engine.config().codec->needs_data())
      id = sender->engine.submit_size(static_cast<std::uint32_t>(len), ns(now_ns));
    else
      id = sender->engine.submit({data, len}, ns(now_ns));
    if (block_id) *block_id = id;
    return LQ_OK;
  });
}

lq_status lq_sender_on_feedback(lq_sender* sender, const uint8_t* datagram, size_t len, int64_t now_ns) {
  LQ_REQUIRE(sender, "sender is null");
  LQ_REQUIRE(datagram || len == 0, "datagram is null");
  return guarded([&] {
    lq::wire::FeedbackPacket fb;
    const auto rc = lq::wire::parse_feedback({datagram, len}, fb);
    if (rc != lq::Errc::ok) return fail(from_errc(rc), std::string("feedback: ") + lq::to_string(rc));
    sender->engine.on_feedback(fb, ns(now_ns));
    return LQ_OK;
  });
}

lq_status lq_sender_tick(lq_sender* sender, int64_t now_ns) {
  LQ_REQUIRE(sender, "sender is null");
  return guarded([&] {
    sender->engine.tick(ns(now_ns));
    return LQ_OK;
  });
}

lq_status lq_sender_next_datagram(lq_sender* sender, int64_t now_ns, uint8_t* buf, size_t cap, size_t* len) {
  LQ_REQUIRE(sender && len, "sender or len is null");
  LQ_REQUIRE(buf || cap == 0, "buf is null");
  return guarded([&] {
    if (!sender->held) {
      auto p = sender->engine.next_packet(ns(now_ns));
      if (!p) {
        *len = 0;
        return fail(LQ_NOT_READY, "nothing to send");
      }
      sender->held = p->serialize();
    }
    const auto st = copy_out(sender->held->data(), sender->held->size(), buf, cap, len);
    if (st == LQ_OK) sender->held.reset();
    return st;
  });
}

size_t lq_sender_max_datagram(const lq_sender* sender) {
  if (!sender) return 0;
  return lq::wire::kDataHeaderSize + sender->engine.config().symbol_size;
}

lq_status lq_sender_stats_get(const lq_sender* sender, lq_sender_stats* out) {
  LQ_REQUIRE(sender && out, "sender or out is null");
  const auto& m = sender->engine.metrics();
  out->packets_sent = m.packets_sent;
  out->feedback_received = m.feedback_received;
  out->stale_feedback = m.stale_feedback;
  out->topup_symbols = m.topup_symbols;
  out->blocks_submitted = m.blocks_submitted;
  out->blocks_completed = m.blocks_completed;
  out->blocks_abandoned = m.blocks_abandoned;
  out->active_blocks = sender->engine.active_blocks();
  out->loss_estimate = sender->engine.loss().p_hat;
  out->loss_variance = sender->engine.loss().var_hat;
  return LQ_OK;
}

// ---- receiver

void lq_receiver_config_default(lq_receiver_config* config) {
  if (!config) return;
  const lq::ReceiverConfig d;
  *config = {};
  config->codec = LQ_CODEC_RLC;
  config->max_active_blocks = static_cast<std::uint32_t>(d.max_active_blocks);
  config->active_timeout_ns = d.active_timeout.count();
}

lq_status lq_receiver_new(const lq_receiver_config* config, lq_receiver** out) {
  LQ_REQUIRE(out, "out is null");
  *out = nullptr;
  return guarded([&] {
    lq_receiver_config c;
    lq_receiver_config_default(&c);
    if (config) c = *config;
    *out = new lq_receiver{lq::ReceiverEngine(to_cpp(c)), {}};
    return LQ_OK;
  });
}

void lq_receiver_free(lq_receiver* receiver) { delete receiver; }

lq_status lq_receiver_on_datagram(lq_receiver* receiver, const uint8_t* datagram, size_t len, int64_t now_ns,
                                  int* delivered) {
  LQ_REQUIRE(receiver, "receiver is null");
  LQ_REQUIRE(datagram || len == 0, "datagram is null");
  if (delivered) *delivered = 0;
  return guarded([&] {
    const auto before = receiver->engine.metrics();
    auto block = receiver->engine.on_datagram({datagram, len}, ns(now_ns));
    const auto& after = receiver->engine.metrics();
    if (block) {
      receiver->ready.push_back(std::move(*block));
      if (delivered) *delivered = 1;
    }
    if (after.malformed > before.malformed) return fail(LQ_MALFORMED, "malformed data packet");
    if (after.protocol_errors > before.protocol_errors)
      return fail(LQ_PROTOCOL_ERROR, "data packet disagrees with earlier packets of its block");
    return LQ_OK;
  });
}

lq_status lq_receiver_poll_block(lq_receiver* receiver, uint64_t* block_id, uint8_t* buf, size_t cap, size_t* len) {
  LQ_REQUIRE(receiver && len, "receiver or len is null");
  LQ_REQUIRE(buf || cap == 0, "buf is null");
  if (receiver->ready.empty()) {
    *len = 0;
    return fail(LQ_NOT_READY, "no recovered block");
  }
  const auto& b = receiver->ready.front();
  const auto st = copy_out(b.data.data(), b.data.size(), buf, cap, len);
  if (st != LQ_OK) return st;
  if (block_id) *block_id = b.block_id;
  receiver->ready.pop_front();
  return LQ_OK;
}

lq_status lq_receiver_feedback(const lq_receiver* receiver, uint8_t* buf, size_t cap, size_t* len) {
  LQ_REQUIRE(receiver && len, "receiver or len is null");
  LQ_REQUIRE(buf || cap == 0, "buf is null");
  return guarded([&] {
    const auto bytes = lq::wire::encode_feedback(receiver->engine.make_feedback());
    return copy_out(bytes.data(), bytes.size(), buf, cap, len);
  });
}

lq_status lq_receiver_tick(lq_receiver* receiver, int64_t now_ns) {
  LQ_REQUIRE(receiver, "receiver is null");
  return guarded([&] {
    receiver->engine.tick(ns(now_ns));
    return LQ_OK;
  });
}

lq_status lq_receiver_stats_get(const lq_receiver* receiver, lq_receiver_stats* out) {
  LQ_REQUIRE(receiver && out, "receiver or out is null");
  const auto& m = receiver->engine.metrics();
  out->packets = m.packets;
  out->duplicates = m.duplicates;
  out->late_symbols = m.late_symbols;
  out->malformed = m.malformed;
  out->protocol_errors = m.protocol_errors;
  out->overflow = m.overflow;
  out->expired = m.expired;
  out->delivered = m.delivered;
  out->active_blocks = receiver->engine.active_blocks();
  return LQ_OK;
}

// ---- experiments

lq_status lq_scenario_check(const char* path, lq_mode* mode) {
  LQ_REQUIRE(path, "path is null");
  return guarded([&] {
    const auto s = lq::scenario::load(path);
    if (mode) *mode = to_c(s.mode);
    return LQ_OK;
  });
}

lq_status lq_scenario_run(const char* path, lq_mode expect, const char* out_dir, int64_t seed, lq_summary* liquid,
                          lq_summary* oracle) {
  LQ_REQUIRE(path, "path is null");
  return guarded([&] {
    auto s = lq::scenario::load(path);
    if (expect != LQ_MODE_ANY && to_c(s.mode) != expect)
      return fail(LQ_SCENARIO_INVALID, std::string(path) + ": mode is \"" + mode_name(s.mode) + "\"");
    if (seed >= 0) lq::scenario::set_seed(s, static_cast<std::uint64_t>(seed));
    const auto out = lq::scenario::run(s, out_dir ? std::string(out_dir) : s.output_dir);
    if (liquid) fill(liquid, out.summary);
    if (oracle) {
      *oracle = {};
      if (out.oracle) fill(oracle, *out.oracle);
    }
    return LQ_OK;
  });
}

lq_status lq_scenario_list(char* buf, size_t cap, size_t* len) {
  LQ_REQUIRE(len, "len is null");
  LQ_REQUIRE(buf || cap == 0, "buf is null");
  return guarded([&] {
    std::string text;
    for (const auto& p : lq::scenario::shipped()) {
      const auto s = lq::scenario::load(p);
      text += s.name + '\t' + mode_name(s.mode) + '\t' + p.string() + '\t' + s.description + '\n';
    }
    // Room for a terminating NUL; *len excludes it.
    const auto st = copy_out(text.c_str(), text.size() + 1, buf, cap, len);
    *len = text.size() + (st == LQ_OK ? 0 : 1);
    return st;
  });
}

void lq_link_options_default(lq_link_options* options) {
  if (!options) return;
  const lq::udp::LinkOptions d;
  options->feedback_every_packets = d.feedback_every_packets;
  options->feedback_interval_ns = d.feedback_interval.count();
  options->induced_loss = d.induced_loss;
  options->seed = d.seed;
}

lq_status lq_udp_send(const lq_send_options* options, lq_send_result* result) {
  LQ_REQUIRE(options && options->bind && options->peer, "options, bind and peer are required");
  LQ_REQUIRE(options->frame_sizes && options->frame_size_count > 0, "frame_sizes is empty");
  LQ_REQUIRE(options->linger_ns >= 0, "linger_ns must be >= 0");
  return guarded([&] {
    lq::udp::SendOptions o;
    o.bind = lq::udp::parse_endpoint(options->bind);
    o.peer = lq::udp::parse_endpoint(options->peer);
    o.stream.fps = options->fps;
    o.stream.frame_sizes.assign(options->frame_sizes, options->frame_sizes + options->frame_size_count);
    o.stream.duration_s = options->duration_s;
    o.stream.validate();
    o.sender = to_cpp(options->sender);
    o.link = to_cpp(options->link);
    o.linger = ns(options->linger_ns);
    std::ofstream csv;
    if (options->csv_path) csv = open_csv(options->csv_path);
    const auto r = lq::udp::run_sender(o);
    if (options->csv_path) {
      csv << "frame_id,k,symbols_sent\n";
      for (const auto& f : r.frames) csv << f.frame_id << ',' << f.k << ',' << f.symbols_sent << '\n';
      if (!csv) throw lq::Error(lq::Errc::io, std::string("write failed: ") + options->csv_path);
    }
    if (result) {
      result->frames = r.frames.size();
      result->packets = r.packets;
      result->dropped = r.dropped;
      result->feedback_packets = r.feedback_packets;
      result->completed = r.completed;
    }
    return LQ_OK;
  });
}

lq_status lq_udp_recv(const lq_recv_options* options, lq_summary* summary) {
  LQ_REQUIRE(options && options->bind, "options and bind are required");
  LQ_REQUIRE(options->idle_timeout_ns > 0, "idle_timeout_ns must be positive");
  return guarded([&] {
    lq::udp::RecvOptions o;
    o.bind = lq::udp::parse_endpoint(options->bind);
    o.receiver = to_cpp(options->receiver);
    o.link = to_cpp(options->link);
    o.expected_frames = options->expected_frames;
    o.idle_timeout = ns(options->idle_timeout_ns);
    std::ofstream csv;
    if (options->csv_path) csv = open_csv(options->csv_path);
    const auto r = lq::udp::run_receiver(o);
    std::vector<double> lat;
    double ratio = 0;
    for (const auto& f : r.frames) {
      if (f.stamp_latency_ms >= 0) lat.push_back(f.stamp_latency_ms);
      ratio += static_cast<double>(f.symbols_received) / f.k;
    }
    if (options->csv_path) {
      csv << "frame_id,block_bytes,k,symbols_received,latency_ms\n";
      for (const auto& f : r.frames) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%llu,%u,%u,%u,%.6f\n", static_cast<unsigned long long>(f.frame_id),
                      f.block_bytes, f.k, f.symbols_received, f.stamp_latency_ms);
        csv << buf;
      }
      if (!csv) throw lq::Error(lq::Errc::io, std::string("write failed: ") + options->csv_path);
    }
    if (summary) {
      *summary = {};
      summary->delivered = r.frames.size();
      summary->frames = std::max<std::uint64_t>(options->expected_frames, r.frames.size());
      summary->mean_overhead = r.frames.empty() ? 0.0 : ratio / static_cast<double>(r.frames.size());
      fill_latencies(summary, std::move(lat));
    }
    return LQ_OK;
  });
}

lq_status lq_bench_codec(const lq_codec_bench_options* options) {
  LQ_REQUIRE(options && options->ks && options->k_count > 0, "ks is empty");
  LQ_REQUIRE(options->symbol_size > 0, "symbol_size must be positive");
  LQ_REQUIRE(options->loss >= 0 && options->loss < 1, "loss must be in [0, 1)");
  LQ_REQUIRE(options->repeats > 0, "repeats must be positive");
  return guarded([&] {
    lq::CodecBenchOptions o;
    o.ks.assign(options->ks, options->ks + options->k_count);
    for (auto k : o.ks)
      if (k == 0) return fail(LQ_INVALID_ARGUMENT, "k must be positive");
    o.symbol_size = options->symbol_size;
    o.loss = options->loss;
    o.repeats = options->repeats;
    o.seed = options->seed;
    std::ofstream csv;
    if (options->csv_path) csv = open_csv(options->csv_path);
    const auto rows = lq::run_codec_bench(o);
    if (options->csv_path) {
      lq::write_codec_bench_csv(csv, rows);
      if (!csv) throw lq::Error(lq::Errc::io, std::string("write failed: ") + options->csv_path);
    }
    return LQ_OK;
  });
}

lq_status lq_bench_loopback(const lq_loopback_bench_options* options, lq_summary* summaries) {
  LQ_REQUIRE(options && options->frame_sizes && options->frame_size_count > 0, "frame_sizes is empty");
  LQ_REQUIRE(options->frames > 0, "frames must be positive");
  LQ_REQUIRE(options->fps > 0, "fps must be positive");
  LQ_REQUIRE(options->induced_loss >= 0 && options->induced_loss < 1, "induced_loss must be in [0, 1)");
  return guarded([&] {
    lq::udp::BenchOptions o;
    o.frame_sizes.assign(options->frame_sizes, options->frame_sizes + options->frame_size_count);
    for (auto b : o.frame_sizes)
      if (b == 0) return fail(LQ_INVALID_ARGUMENT, "frame size must be positive");
    o.fps = options->fps;
    o.frames = options->frames;
    o.induced_loss = options->induced_loss;
    o.seed = options->seed;
    std::ofstream csv;
    if (options->csv_path) csv = open_csv(options->csv_path);
    const auto samples = lq::udp::loopback_bench(o);
    if (options->csv_path) {
      lq::udp::write_bench_csv(csv, samples);
      if (!csv) throw lq::Error(lq::Errc::io, std::string("write failed: ") + options->csv_path);
    }
    if (summaries) {
      for (size_t i = 0; i < o.frame_sizes.size(); ++i) {
        std::vector<double> lat;
        std::uint64_t n = 0;
        for (const auto& s : samples) {
          if (s.frame_bytes != o.frame_sizes[i]) continue;
          ++n;
          if (s.latency_us >= 0) lat.push_back(s.latency_us / 1000.0);
        }
        summaries[i] = {};
        summaries[i].frames = n;
        summaries[i].delivered = lat.size();
        fill_latencies(&summaries[i], std::move(lat));
      }
    }
    return LQ_OK;
  });
}

}  // extern "C"
