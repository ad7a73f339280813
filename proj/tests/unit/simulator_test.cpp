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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace {

using lq::PlanParams;
using lq::sim::SimConfig;

SimConfig tiny(std::set<std::uint64_t> drops = {}) {
  SimConfig c;
  c.frames = 1;
  c.packets_per_frame = 2;
  c.slots_per_frame = 4;
  c.one_way_delay_slots = 2;
  c.frame_interval_ms = 4.0;
  c.forced_drops = std::move(drops);
  return c;
}

PlanParams bare(std::uint32_t c_extra) {
  PlanParams p;
  p.c_extra = c_extra;
  p.z_bin = 0;
  p.z_var = 0;
  return p;
}

TEST(SimLiquid, ZeroLossHandTrace) {
  auto cfg = tiny();
  cfg.frames = 3;
  auto r = lq::sim::run_liquid(cfg, bare(0));
  for (const auto& f : r.frames) {
    ASSERT_TRUE(f.delivered());
    EXPECT_EQ(f.latency_slots(), 3u);
    EXPECT_EQ(f.packets_sent, 2u);
  }
}

TEST(SimLiquid, SingleLossHandTrace) {
  auto r = lq::sim::run_liquid(tiny({1}), bare(1));
  ASSERT_TRUE(r.frames[0].delivered());
  EXPECT_EQ(r.frames[0].packets_sent, 3u);
  EXPECT_EQ(*r.frames[0].delivered_slot, 4u);
  EXPECT_EQ(r.frames[0].latency_slots(), 4u);
}

TEST(SimLiquid, LostSurplusIsToppedUpAfterFeedback) {
  // N = K = 2 and the last packet (slot 1) is lost. Nothing later arrives to
  // expose the gap, so the sender presumes it lost at slot 1 + 2D = 5.
  auto r = lq::sim::run_liquid(tiny({1}), bare(0));
  ASSERT_TRUE(r.frames[0].delivered());
  EXPECT_EQ(r.frames[0].packets_sent, 3u);
  EXPECT_EQ(*r.frames[0].delivered_slot, 7u);
  EXPECT_EQ(lq::sim::run_retx_oracle(tiny({1})).frames[0].delivered_slot, 7u);
}

TEST(SimLiquid, ZeroDelayDoesNotStall) {
  auto cfg = tiny({1});
  cfg.one_way_delay_slots = 0;
  auto r = lq::sim::run_liquid(cfg, bare(0));
  ASSERT_TRUE(r.frames[0].delivered());
  EXPECT_EQ(r.frames[0].packets_sent, 3u);
}

TEST(SimOracle, HandTraces) {
  EXPECT_EQ(lq::sim::run_retx_oracle(tiny()).frames[0].latency_slots(), 3u);
  EXPECT_EQ(lq::sim::run_retx_oracle(tiny({0})).frames[0].latency_slots(), 6u);
  auto twice = lq::sim::run_retx_oracle(tiny({0, 4}));
  EXPECT_EQ(twice.frames[0].latency_slots(), 10u);
  EXPECT_EQ(twice.sends, 4u);
  EXPECT_EQ(twice.losses, 2u);
}

TEST(SimOracle, RetransmissionWaitsForFreeSlot) {
  // Frame 1 arrives at slot 4 while frame 0's retransmission is due; the
  // older frame wins the slot.
  auto cfg = tiny({0});
  cfg.frames = 2;
  auto r = lq::sim::run_retx_oracle(cfg);
  EXPECT_EQ(*r.frames[0].delivered_slot, 6u);
  EXPECT_EQ(*r.frames[1].delivered_slot, 4u + 1 + 2 + 1);
}

TEST(SimFullScale, ZeroLossLatency) {
  SimConfig cfg;
  cfg.frames = 30;
  cfg.loss = lq::LossTrace::constant(0.0);
  auto r = lq::sim::paired_run(cfg, {});
  const double expect = (499 + 400) * (33.3 / 800);
  EXPECT_NEAR(expect, 37.42, 0.01);
  for (std::size_t i = 0; i < r.liquid.frames.size(); ++i) {
    EXPECT_NEAR(r.liquid.frames[i].latency_ms, expect, 1e-9);
    EXPECT_EQ(r.liquid.frames[i].latency_slots(), r.oracle.frames[i].latency_slots());
  }
}

TEST(SimProperty, ConservationAndOracleAccounting) {
  for (std::uint64_t seed : {1u, 2u}) {
    SimConfig cfg;
    cfg.frames = 60;
    cfg.seed = seed;
    cfg.loss = lq::LossTrace::constant(0.05);
    auto r = lq::sim::paired_run(cfg, {});
    for (const auto* run : {&r.liquid, &r.oracle}) {
      EXPECT_EQ(run->arrivals + run->losses, run->sends);
      std::uint64_t sent = 0;
      for (const auto& f : run->frames) sent += f.packets_sent;
      EXPECT_EQ(sent, run->sends);
      EXPECT_EQ(run->send_slots.size(), run->sends);
    }
    EXPECT_EQ(r.oracle.sends, std::uint64_t{cfg.packets_per_frame} * cfg.frames + r.oracle.losses);
    EXPECT_EQ(r.liquid.duplicate_sends, 0u);
  }
}

TEST(SimProperty, CommonRandomNumbers) {
  SimConfig cfg;
  cfg.seed = 9;
  cfg.loss = lq::LossTrace::constant(0.2);
  lq::sim::LossRealization a(cfg), b(cfg);
  // Query order does not change the realization.
  std::vector<bool> forward;
  for (std::uint64_t t = 0; t < 5000; ++t) forward.push_back(a.dropped(t));
  for (std::uint64_t t = 5000; t-- > 0;) EXPECT_EQ(b.dropped(t), forward[t]);
  const auto drops = std::count(forward.begin(), forward.end(), true);
  EXPECT_NEAR(drops / 5000.0, 0.2, 0.02);
}

TEST(SimProperty, Deterministic) {
  SimConfig cfg;
  cfg.frames = 45;
  cfg.seed = 7;
  auto a = lq::sim::paired_run(cfg, {});
  auto b = lq::sim::paired_run(cfg, {});
  std::ostringstream fa, fb, ba, bb;
  lq::sim::write_frames_csv(fa, a);
  lq::sim::write_frames_csv(fb, b);
  lq::sim::write_bandwidth_csv(ba, a, cfg);
  lq::sim::write_bandwidth_csv(bb, b, cfg);
  EXPECT_EQ(fa.str(), fb.str());
  EXPECT_EQ(ba.str(), bb.str());
}

TEST(SimProperty, BandwidthIntegratesToPacketsSent) {
  SimConfig cfg;
  cfg.frames = 75;  // 2.4975 s: a partial last bin
  auto r = lq::sim::paired_run(cfg, {});
  std::ostringstream out;
  lq::sim::write_bandwidth_csv(out, r, cfg);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t_s,liquid_mbps,oracle_mbps,loss_rate");
  const double end_s = std::max(r.liquid.slots_run, r.oracle.slots_run) * cfg.slot_ms() / 1000.0;
  double liquid_bits = 0, oracle_bits = 0;
  while (std::getline(in, line)) {
    double t, l, o, loss;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &t, &l, &o, &loss), 4);
    const double width = std::min(1.0, end_s - t);
    liquid_bits += l * 1e6 * width;
    oracle_bits += o * 1e6 * width;
  }
  EXPECT_NEAR(liquid_bits, r.liquid.sends * cfg.payload_bits, cfg.payload_bits);
  EXPECT_NEAR(oracle_bits, r.oracle.sends * cfg.payload_bits, cfg.payload_bits);
}

TEST(SimProperty, ZeroLossLiquidMatchesOracleFrameByFrame) {
  for (std::uint32_t k : {1u, 10u, 100u}) {
    SimConfig cfg;
    cfg.frames = 20;
    cfg.packets_per_frame = k;
    cfg.slots_per_frame = 2 * k + 5;
    cfg.one_way_delay_slots = k;
    cfg.loss = lq::LossTrace::constant(0.0);
    auto r = lq::sim::paired_run(cfg, {});
    for (std::size_t i = 0; i < r.liquid.frames.size(); ++i)
      EXPECT_EQ(r.liquid.frames[i].latency_slots(), r.oracle.frames[i].latency_slots());
  }
}

TEST(SimProperty, StationaryLossSurplusBounded) {
  for (double p : {0.01, 0.05, 0.1}) {
    SimConfig cfg;
    cfg.frames = 150;
    cfg.loss = lq::LossTrace::constant(p);
    cfg.seed = 3;
    auto r = lq::sim::run_liquid(cfg, {});
    double ratio = 0;
    std::size_t n = 0;
    for (const auto& f : r.frames) {
      if (f.t_avail_ms < 1000.0) continue;  // estimator warm-up
      ratio += static_cast<double>(f.packets_sent) / cfg.packets_per_frame;
      ++n;
    }
    ratio /= static_cast<double>(n);
    EXPECT_GE(ratio, 1.0 / (1.0 - p)) << p;
    EXPECT_LE(ratio, 1.12 / (1.0 - p)) << p;
  }
}

TEST(SimConfig, Validation) {
  SimConfig c;
  c.slots_per_frame = 100;
  EXPECT_THROW(lq::sim::run_liquid(c, {}), lq::Error);
  c = {};
  c.packets_per_frame = 0;
  EXPECT_THROW(lq::sim::run_retx_oracle(c), lq::Error);
}

}  // namespace
