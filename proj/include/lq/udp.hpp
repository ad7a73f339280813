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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lq/emulator.hpp"
#include "lq/receiver.hpp"
#include "lq/sender.hpp"

namespace lq::udp {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

// "host:port" or "[v6addr]:port". Throws Error(invalid_argument).
Endpoint parse_endpoint(std::string_view text);

struct LinkOptions {
  std::uint32_t feedback_every_packets = 16;
  Nanos feedback_interval = std::chrono::milliseconds(5);
  double induced_loss = 0.0;  // forward datagrams dropped before sendto
  std::uint64_t seed = 1;
};

// Frames start with a 16-byte stamp: frame id and system-clock send time in
// nanoseconds, both big-endian. Smaller frames carry a truncated stamp.
inline constexpr std::size_t kStampBytes = 16;

struct SentFrame {
  std::uint64_t frame_id = 0;
  std::uint32_t k = 0;
  std::uint64_t symbols_sent = 0;
  Nanos submitted_at{0};  // steady clock
};

struct SendReport {
  std::vector<SentFrame> frames;
  std::uint64_t packets = 0;
  std::uint64_t bytes = 0;
  std::uint64_t dropped = 0;  // induced
  std::uint64_t feedback_packets = 0;
  std::uint64_t feedback_bytes = 0;
  std::uint64_t duplicate_sends = 0;
  bool completed = false;  // every block confirmed before the linger ran out
};

struct SendOptions {
  Endpoint bind{"0.0.0.0", 0};
  Endpoint peer;
  emu::StreamProfile stream;
  SenderConfig sender;
  LinkOptions link;
  // How long to keep serving top-ups after the last frame.
  Nanos linger = std::chrono::seconds(2);
};

struct RecvFrame {
  std::uint64_t frame_id = 0;
  std::uint32_t k = 0;
  std::uint32_t block_bytes = 0;
  std::uint32_t symbols_received = 0;
  Nanos delivered_at{0};  // steady clock
  double stamp_latency_ms = -1.0;  // from the embedded stamp; -1 if absent
};

struct RecvReport {
  std::vector<RecvFrame> frames;  // in delivery order
  std::uint64_t packets = 0;
  std::uint64_t bytes = 0;
  ReceiverMetrics metrics;
};

struct RecvOptions {
  Endpoint bind{"0.0.0.0", 0};
  ReceiverConfig receiver;
  LinkOptions link;
  std::uint32_t expected_frames = 0;  // stop once this many are delivered; 0 waits for idle
  Nanos idle_timeout = std::chrono::seconds(3);
};

// Blocking endpoints. Throw Error(bind) when the socket cannot be bound and
// Error(io) on other socket failures. `stop` ends the loop early.
SendReport run_sender(const SendOptions& options, const std::atomic<bool>* stop = nullptr);
RecvReport run_receiver(const RecvOptions& options, const std::atomic<bool>* stop = nullptr,
                        const std::function<void(std::uint16_t)>& on_bound = {});

// Both endpoints in one process over real sockets, one thread each. Latency
// is measured on the shared steady clock.
struct LoopbackOptions {
  emu::StreamProfile stream;
  SenderConfig sender;
  ReceiverConfig receiver;
  LinkOptions link;
  std::string host = "127.0.0.1";
};
emu::EmuResult run_udp(const LoopbackOptions& options);

struct BenchOptions {
  std::vector<std::uint32_t> frame_sizes{31250, 62500, 125000, 250000};
  double fps = 60.0;
  std::uint32_t frames = 10000;
  double induced_loss = 0.10;
  std::uint64_t seed = 1;
};

struct BenchSample {
  std::uint32_t frame_bytes = 0;
  std::uint64_t frame_id = 0;
  double latency_us = -1.0;  // -1 when not delivered
};

// Processing latency from submit to recovery with the real codec, one run
// per frame size. `progress` sees each size's run as it finishes.
std::vector<BenchSample> loopback_bench(
    const BenchOptions& options,
    const std::function<void(std::uint32_t, const emu::EmuResult&)>& progress = {});

// frame_bytes,frame_id,latency_us
void write_bench_csv(std::ostream& out, const std::vector<BenchSample>& samples);

}  // namespace lq::udp
