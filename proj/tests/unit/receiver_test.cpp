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

#include "lq/receiver.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"

namespace {

using namespace std::chrono_literals;
using lq::Nanos;
using lq::ReceiverConfig;
using lq::ReceiverEngine;
using lq::wire::DataPacketHeader;

ReceiverConfig ideal() {
  ReceiverConfig cfg;
  cfg.codec = lq::make_codec(lq::CodecKind::ideal);
  return cfg;
}

DataPacketHeader hdr(std::uint64_t seq, lq::BlockId block, lq::Esi esi, std::uint32_t bytes,
                     std::uint16_t ss = 1) {
  return {seq, block, esi, bytes, ss};
}

const std::vector<std::uint8_t> kOne{0};

TEST(Receiver, SingleSymbolBlockDeliversImmediately) {
  ReceiverEngine rx(ideal());
  auto d = rx.on_data_packet(hdr(0, 0, 0, 1), kOne, 5ms);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->block_id, 0u);
  EXPECT_EQ(d->k, 1u);
  EXPECT_EQ(d->delivered_at, 5ms);
  EXPECT_TRUE(rx.is_delivered(0));
}

TEST(Receiver, DuplicateDoesNotCount) {
  ReceiverEngine rx(ideal());
  EXPECT_FALSE(rx.on_data_packet(hdr(0, 0, 0, 3), kOne, 0ns));
  EXPECT_FALSE(rx.on_data_packet(hdr(1, 0, 1, 3), kOne, 0ns));
  EXPECT_FALSE(rx.on_data_packet(hdr(2, 0, 1, 3), kOne, 0ns));
  EXPECT_EQ(rx.metrics().duplicates, 1u);
  auto d = rx.on_data_packet(hdr(3, 0, 4, 3), kOne, 1ms);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->symbols_received, 3u);
}

// 16 distinct symbols with one dependent row; the 17th recovers the block.
TEST(Receiver, DependentRowDefersDelivery) {
  const std::uint32_t k = 16;
  const lq::BlockId id = 9;
  std::vector<std::uint8_t> data(k * 8);
  std::iota(data.begin(), data.end(), std::uint8_t{1});
  lq::SourceBlock block(id, data, 8);

  // Sources 1..14 leave columns 0 and 15 unknown. Two repair rows reduce to
  // their (c0, c15) pairs and are dependent when those are proportional,
  // which the rank oracle finds within a few hundred candidates.
  std::vector<lq::Esi> esis;
  for (lq::Esi e = 1; e < k - 1; ++e) esis.push_back(e);
  auto row = [&](lq::Esi esi) {
    std::vector<std::uint8_t> r(k, 0);
    if (esi < k) r[esi] = 1;
    else lq::repair_coefficients(id, esi, r);
    return r;
  };
  lq::Esi a = k, b = 0;
  for (lq::Esi cand = k + 1; cand < k + 200000 && b == 0; ++cand) {
    lq::oracle::Matrix m;
    for (auto e : esis) m.push_back(row(e));
    m.push_back(row(a));
    m.push_back(row(cand));
    if (lq::oracle::rank(m) == 15) b = cand;
  }
  ASSERT_NE(b, 0u);

  ReceiverEngine rx;
  std::uint64_t seq = 0;
  for (auto e : esis) {
    auto s = lq::encode_symbol(block, e);
    EXPECT_FALSE(rx.on_data_packet(hdr(seq++, id, e, data.size(), 8), s.payload, 0ns));
  }
  auto sa = lq::encode_symbol(block, a);
  EXPECT_FALSE(rx.on_data_packet(hdr(seq++, id, a, data.size(), 8), sa.payload, 0ns));
  auto sb = lq::encode_symbol(block, b);
  EXPECT_FALSE(rx.on_data_packet(hdr(seq++, id, b, data.size(), 8), sb.payload, 0ns));
  // 16 distinct symbols in, not recovered.
  auto fb = rx.make_feedback();
  ASSERT_EQ(fb.entries.size(), 1u);
  EXPECT_EQ(fb.entries[0].symbols_received, 16u);
  auto s0 = lq::encode_symbol(block, 0);
  auto d = rx.on_data_packet(hdr(seq++, id, 0, data.size(), 8), s0.payload, 1ms);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->data, data);
  EXPECT_EQ(d->symbols_received, 17u);
}

TEST(Receiver, FeedbackBeforeAnything) {
  ReceiverEngine rx(ideal());
  auto f = rx.make_feedback();
  EXPECT_EQ(f.highest_seq_seen, lq::wire::kNoSequence);
  EXPECT_EQ(f.total_data_packets_received, 0u);
  EXPECT_TRUE(f.entries.empty());
}

TEST(Receiver, FeedbackBookkeeping) {
  ReceiverEngine rx(ideal());
  rx.on_data_packet(hdr(0, 0, 0, 10), kOne, 0ns);
  rx.on_data_packet(hdr(1, 0, 1, 10), kOne, 0ns);
  rx.on_data_packet(hdr(3, 0, 3, 10), kOne, 0ns);
  auto f = rx.make_feedback();
  EXPECT_EQ(f.highest_seq_seen, 3u);
  EXPECT_EQ(f.total_data_packets_received, 3u);
  ASSERT_EQ(f.entries.size(), 1u);
  EXPECT_EQ(f.entries[0], (lq::wire::FeedbackEntry{0, 3}));
}

TEST(Receiver, FeedbackListsOnlyActiveBlocks) {
  ReceiverEngine rx(ideal());
  rx.on_data_packet(hdr(0, 0, 0, 2), kOne, 0ns);
  rx.on_data_packet(hdr(1, 0, 1, 2), kOne, 0ns);
  rx.on_data_packet(hdr(2, 1, 0, 5), kOne, 0ns);
  auto f = rx.make_feedback();
  ASSERT_EQ(f.entries.size(), 1u);
  EXPECT_EQ(f.entries[0].block_id, 1u);
  EXPECT_EQ(f.entries[0].symbols_received, 1u);
}

TEST(Receiver, LateSymbolsCountButAreDiscarded) {
  ReceiverEngine rx(ideal());
  ASSERT_TRUE(rx.on_data_packet(hdr(0, 0, 0, 1), kOne, 0ns));
  EXPECT_FALSE(rx.on_data_packet(hdr(1, 0, 1, 1), kOne, 1ms));
  EXPECT_EQ(rx.packets_received(), 2u);
  EXPECT_EQ(rx.metrics().late_symbols, 1u);

  EXPECT_EQ(rx.gc_delivered(2ms, 5ms), 0u);
  EXPECT_EQ(rx.gc_delivered(10ms, 5ms), 1u);
  EXPECT_FALSE(rx.is_delivered(0));
  // No fresh state is created for the forgotten block.
  EXPECT_FALSE(rx.on_data_packet(hdr(2, 0, 2, 1), kOne, 11ms));
  EXPECT_EQ(rx.active_blocks(), 0u);
  EXPECT_EQ(rx.packets_received(), 3u);
  EXPECT_EQ(rx.metrics().late_symbols, 2u);
}

TEST(Receiver, InconsistentBlockSizeIsProtocolError) {
  ReceiverEngine rx(ideal());
  rx.on_data_packet(hdr(0, 4, 0, 10), kOne, 0ns);
  try {
    rx.on_data_packet(hdr(1, 4, 1, 11), kOne, 0ns);
    FAIL();
  } catch (const lq::Error& e) {
    EXPECT_EQ(e.code(), lq::Errc::protocol_error);
  }
  // The untrusted path counts instead of throwing.
  auto bytes = lq::wire::encode_data_packet(hdr(2, 4, 2, 12), kOne);
  EXPECT_FALSE(rx.on_datagram(bytes, 0ns));
  EXPECT_EQ(rx.metrics().protocol_errors, 2u);
  EXPECT_FALSE(rx.on_datagram(std::vector<std::uint8_t>{1, 2, 3}, 0ns));
  EXPECT_EQ(rx.metrics().malformed, 1u);
}

TEST(Receiver, ActiveCapAndExpiry) {
  auto cfg = ideal();
  cfg.max_active_blocks = 2;
  cfg.active_timeout = 10ms;
  ReceiverEngine rx(cfg);
  rx.on_data_packet(hdr(0, 0, 0, 5), kOne, 0ns);
  rx.on_data_packet(hdr(1, 1, 0, 5), kOne, 0ns);
  rx.on_data_packet(hdr(2, 2, 0, 5), kOne, 0ns);
  EXPECT_EQ(rx.active_blocks(), 2u);
  EXPECT_EQ(rx.metrics().overflow, 1u);
  rx.on_data_packet(hdr(3, 1, 1, 5), kOne, 8ms);
  rx.tick(12ms);
  EXPECT_EQ(rx.metrics().expired, 1u);
  EXPECT_EQ(rx.active_blocks(), 1u);
  EXPECT_EQ(rx.make_feedback().entries.size(), 1u);
}

TEST(ReceiverProperty, IdealDeliversOnKthDistinctEsi) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint32_t k = 1 + rng() % 40;
    ReceiverEngine rx(ideal());
    std::set<lq::Esi> distinct;
    for (std::uint64_t seq = 0;; ++seq) {
      const lq::Esi esi = static_cast<lq::Esi>(rng() % (2 * k));
      const bool fresh = distinct.insert(esi).second;
      auto d = rx.on_data_packet(hdr(seq, 0, esi, k), kOne, 0ns);
      if (fresh && distinct.size() == k) {
        ASSERT_TRUE(d);
        break;
      }
      ASSERT_FALSE(d);
    }
  }
}

TEST(ReceiverProperty, RealCodecOverheadAtDelivery) {
  std::mt19937_64 rng(6);
  const std::uint32_t k = 16;
  int within = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::uint8_t> data(k * 4);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng());
    lq::SourceBlock block(trial, data, 4);
    ReceiverEngine rx;
    std::set<lq::Esi> used;
    for (std::uint64_t seq = 0;; ++seq) {
      lq::Esi esi;
      do esi = static_cast<lq::Esi>(rng() % 1000); while (!used.insert(esi).second);
      auto s = lq::encode_symbol(block, esi);
      auto d = rx.on_data_packet(hdr(seq, trial, esi, data.size(), 4), s.payload, 0ns);
      if (d) {
        ASSERT_EQ(d->data, data);
        if (d->symbols_received - k <= 3) ++within;
        break;
      }
    }
  }
  EXPECT_GE(within, 990);
}

TEST(ReceiverProperty, FeedbackMatchesRecount) {
  std::mt19937_64 rng(7);
  ReceiverEngine rx(ideal());
  std::map<lq::BlockId, std::set<lq::Esi>> log;
  std::map<lq::BlockId, std::uint32_t> ks;
  std::set<lq::BlockId> done;
  std::uint64_t highest = 0, count = 0;
  for (std::uint64_t seq = 0; seq < 20000; ++seq) {
    if (rng() % 10 == 0) continue;  // a gap in the sequence space
    const lq::BlockId b = seq / 60 + rng() % 3;
    if (!ks.count(b)) ks[b] = 20 + b % 30;
    const lq::Esi esi = static_cast<lq::Esi>(rng() % 80);
    auto d = rx.on_data_packet(hdr(seq, b, esi, ks[b]), kOne, 0ns);
    highest = seq;
    ++count;
    if (!done.count(b)) log[b].insert(esi);
    if (d) done.insert(b);

    if (seq % 97 == 0) {
      auto f = rx.make_feedback();
      ASSERT_EQ(f.highest_seq_seen, highest);
      ASSERT_EQ(f.total_data_packets_received, count);
      std::vector<lq::wire::FeedbackEntry> expect;
      for (const auto& [id, esis] : log)
        if (!done.count(id)) expect.push_back({id, static_cast<std::uint32_t>(esis.size())});
      ASSERT_EQ(f.entries, expect);
    }
  }
}

TEST(ReceiverProperty, CountersMonotoneUnderReordering) {
  std::mt19937_64 rng(8);
  std::vector<std::uint64_t> seqs(5000);
  std::iota(seqs.begin(), seqs.end(), 0);
  // Local shuffles only, as a network would produce.
  for (std::size_t i = 0; i + 8 < seqs.size(); i += 8) std::shuffle(seqs.begin() + i, seqs.begin() + i + 8, rng);
  ReceiverEngine rx(ideal());
  std::uint64_t last_span = 0, last_recv = 0;
  for (auto s : seqs) {
    if (rng() % 5 == 0) continue;
    rx.on_data_packet(hdr(s, s / 100, s % 100, 1000), kOne, 0ns);
    auto f = rx.make_feedback();
    ASSERT_GE(f.seq_span(), last_span);
    ASSERT_GE(f.total_data_packets_received, last_recv);
    ASSERT_LE(f.total_data_packets_received, f.seq_span());
    last_span = f.seq_span();
    last_recv = f.total_data_packets_received;
  }
}

TEST(InOrder, HoldsUntilPredecessorArrives) {
  lq::InOrderDelivery shim(10ms);
  lq::DeliveredBlock b1;
  b1.block_id = 1;
  EXPECT_TRUE(shim.push(b1, 0ns).empty());
  lq::DeliveredBlock b0;
  b0.block_id = 0;
  auto out = shim.push(b0, 1ms);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].block_id, 0u);
  EXPECT_EQ(out[1].block_id, 1u);
}

TEST(InOrder, SkipsGapAfterWait) {
  lq::InOrderDelivery shim(10ms);
  lq::DeliveredBlock b2;
  b2.block_id = 2;
  EXPECT_TRUE(shim.push(b2, 0ns).empty());
  EXPECT_TRUE(shim.poll(5ms).empty());
  auto out = shim.poll(10ms);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].block_id, 2u);
  EXPECT_EQ(shim.skipped(), 2u);
  lq::DeliveredBlock late;
  late.block_id = 0;
  EXPECT_EQ(shim.push(late, 11ms).size(), 1u);
}

}  // namespace
