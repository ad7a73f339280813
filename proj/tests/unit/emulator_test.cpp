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

#include <gtest/gtest.h>

#include <sstream>

namespace {

using lq::emu::EmuConfig;

EmuConfig small_stream(std::uint64_t seed, double seconds) {
  EmuConfig c;
  c.stream.frame_sizes = {40000};
  c.stream.duration_s = seconds;
  c.symbol_size = 250;
  c.impairment.rate_cap_mbps = 100;
  c.impairment.seed = seed;
  c.impairment.loss = lq::LossTrace::stepped({0.003, 0.03}, seconds / 2);
  return c;
}

TEST(Emulator, ZeroImpairmentTinyFrames) {
  EmuConfig c;
  c.stream.frame_sizes = {1250};
  c.stream.duration_s = 10 / 30.0;
  c.impairment.forward_delay_ms = 0;
  c.impairment.reverse_delay_ms = 0;
  auto r = lq::emu::run_emulated(c);
  ASSERT_EQ(r.frames.size(), 10u);
  for (const auto& f : r.frames) {
    ASSERT_TRUE(f.delivered());
    EXPECT_LT(f.latency_ms, 5.0);
    EXPECT_EQ(f.k_symbols, 1u);
    EXPECT_DOUBLE_EQ(f.sent_ratio(), 3.0);  // K + c_extra with c_extra = 2
  }
}

TEST(Emulator, SerializationDelayFromRateCap) {
  EmuConfig c;
  c.stream.frame_sizes = {12500};  // K = 10 at 1250-byte symbols
  c.stream.duration_s = 1 / 30.0;
  c.impairment.forward_delay_ms = 0;
  c.impairment.reverse_delay_ms = 0;
  c.impairment.rate_cap_mbps = 10;
  auto r = lq::emu::run_emulated(c);
  ASSERT_TRUE(r.frames[0].delivered());
  // Ten 1280-byte datagrams at 10 Mbit/s, 1.024 ms each.
  EXPECT_NEAR(r.frames[0].latency_ms, 10.24, 1e-6);
}

TEST(Emulator, FixedDelayFloor) {
  EmuConfig c;
  c.stream.frame_sizes = {5000};
  c.stream.duration_s = 0.5;
  auto r = lq::emu::run_emulated(c);
  for (const auto& f : r.frames) EXPECT_DOUBLE_EQ(f.latency_ms, 20.0);
}

TEST(Emulator, DeliversEverythingWithoutDuplicates) {
  auto r = lq::emu::run_emulated(small_stream(4, 6.0));
  EXPECT_EQ(r.delivered(), r.frames.size());
  EXPECT_EQ(r.duplicate_sends, 0u);
  EXPECT_EQ(r.corrupt_blocks, 0u);
  for (const auto& f : r.frames) EXPECT_GE(f.recv_ratio(), 1.0) << f.frame_id;
}

TEST(Emulator, HeavyLossStillDelivers) {
  EmuConfig c;
  c.stream.frame_sizes = {20000};
  c.stream.duration_s = 2.0;
  c.impairment.loss = lq::LossTrace::constant(0.4);
  c.impairment.reverse_loss = 0.2;
  auto r = lq::emu::run_emulated(c);
  EXPECT_EQ(r.delivered(), r.frames.size());
  EXPECT_EQ(r.duplicate_sends, 0u);
  EXPECT_EQ(r.corrupt_blocks, 0u);
  EXPECT_GT(r.feedback_losses, 0u);
}

TEST(Emulator, Deterministic) {
  std::ostringstream a, b;
  lq::emu::write_frames_csv(a, lq::emu::run_emulated(small_stream(2, 3.0)));
  lq::emu::write_frames_csv(b, lq::emu::run_emulated(small_stream(2, 3.0)));
  EXPECT_EQ(a.str(), b.str());
  std::ostringstream c;
  lq::emu::write_frames_csv(c, lq::emu::run_emulated(small_stream(3, 3.0)));
  EXPECT_NE(a.str(), c.str());
}

TEST(Emulator, RealizedLossTracksSchedule) {
  auto c = small_stream(5, 20.0);  // two 10 s segments
  c.codec = lq::CodecKind::ideal;
  auto r = lq::emu::run_emulated(c);
  ASSERT_EQ(r.segments.size(), 2u);
  for (const auto& s : r.segments) {
    ASSERT_GT(s.packets, 10000u);
    EXPECT_NEAR(s.realized(), s.scheduled_rate, 0.005);
  }
}

TEST(Emulator, FeedbackUnderOnePercent) {
  auto r = lq::emu::run_emulated(small_stream(1, 4.0));
  EXPECT_LT(static_cast<double>(r.feedback_bytes), 0.01 * static_cast<double>(r.forward_bytes));
}

TEST(Emulator, CsvHeaderAndRows) {
  auto c = small_stream(1, 0.2);
  auto r = lq::emu::run_emulated(c);
  std::ostringstream out;
  lq::emu::write_frames_csv(out, r);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line,
            "frame_id,t_avail_ms,t_deliver_ms,latency_ms,k_symbols,symbols_sent,symbols_received,"
            "sent_ratio,recv_ratio,loss_rate_scheduled");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, r.frames.size());
}

TEST(Emulator, UndeliveredFramesGetSentinels) {
  EmuConfig c;
  c.stream.frame_sizes = {5000};
  c.stream.duration_s = 0.1;
  c.impairment.loss = lq::LossTrace::constant(1.0);
  c.drain_s = 0.2;
  auto r = lq::emu::run_emulated(c);
  EXPECT_EQ(r.delivered(), 0u);
  std::ostringstream out;
  lq::emu::write_frames_csv(out, r);
  EXPECT_NE(out.str().find(",-1,-1,"), std::string::npos);
}

TEST(Emulator, Validation) {
  EmuConfig c;
  c.stream.fps = 0;
  EXPECT_THROW(lq::emu::run_emulated(c), lq::Error);
  c = {};
  c.stream.frame_sizes = {};
  EXPECT_THROW(lq::emu::run_emulated(c), lq::Error);
  c = {};
  c.impairment.forward_delay_ms = -1;
  EXPECT_THROW(lq::emu::run_emulated(c), lq::Error);
  c = {};
  c.feedback_every_packets = 0;
  EXPECT_THROW(lq::emu::run_emulated(c), lq::Error);
}

}  // namespace
