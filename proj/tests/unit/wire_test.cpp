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

#include "lq/wire.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <random>

namespace {

using namespace lq::wire;

TEST(Wire, MinimalDataPacketLayout) {
  DataPacketHeader h{0, 0, 0, 1, 1};
  std::vector<std::uint8_t> payload{0x5a};
  auto bytes = encode_data_packet(h, payload);
  ASSERT_EQ(bytes.size(), 31u);
  EXPECT_EQ(bytes.size() - payload.size(), kDataHeaderSize);
  EXPECT_EQ(bytes[0], 0x4C);
  EXPECT_EQ(bytes[1], 0x51);
  EXPECT_EQ(bytes[2], 0x01);
  EXPECT_EQ(bytes[3], 0x01);
  auto view = decode_data_packet(bytes);
  EXPECT_EQ(view.header, h);
  EXPECT_EQ(view.payload.size(), 1u);
  EXPECT_EQ(view.payload[0], 0x5a);
}

TEST(Wire, DataHeaderFieldsAreBigEndian) {
  DataPacketHeader h{0x0102030405060708ULL, 0x1112131415161718ULL, 0x21222324u, 0x31323334u, 0x0002};
  auto bytes = encode_data_packet(h, std::vector<std::uint8_t>{9, 9});
  const std::vector<std::uint8_t> expect{0x4C, 0x51, 0x01, 0x01, 0x01, 0x02, 0x03, 0x04, 0x05, 0x06,
                                         0x07, 0x08, 0x11, 0x12, 0x13, 0x14, 0x15, 0x16, 0x17, 0x18,
                                         0x21, 0x22, 0x23, 0x24, 0x31, 0x32, 0x33, 0x34, 0x00, 0x02,
                                         0x09, 0x09};
  EXPECT_EQ(bytes, expect);
}

TEST(Wire, FeedbackRoundtripsBitExactly) {
  FeedbackPacket f{999, 950, {{7, 312}}};
  auto bytes = encode_feedback(f);
  EXPECT_EQ(bytes.size(), 34u);
  const std::vector<std::uint8_t> expect{0x4C, 0x51, 0x01, 0x02, 0, 0, 0, 0, 0, 0, 0x03, 0xE7,
                                         0,    0,    0,    0,    0, 0, 0x03, 0xB6, 0x00, 0x01,
                                         0,    0,    0,    0,    0, 0, 0,    0x07, 0, 0, 0x01, 0x38};
  EXPECT_EQ(bytes, expect);
  EXPECT_EQ(decode_feedback(bytes), f);
  EXPECT_EQ(encode_feedback(decode_feedback(bytes)), bytes);
}

TEST(Wire, EmptyFeedbackUsesSentinel) {
  FeedbackPacket f;
  auto bytes = encode_feedback(f);
  EXPECT_EQ(bytes.size(), kFeedbackHeaderSize);
  auto back = decode_feedback(bytes);
  EXPECT_EQ(back.highest_seq_seen, kNoSequence);
  EXPECT_EQ(back.seq_span(), 0u);
}

TEST(Wire, DistinctParseErrors) {
  auto data = encode_data_packet({1, 2, 3, 10, 4}, std::vector<std::uint8_t>(4, 1));
  DataPacketView view;
  FeedbackPacket fb;

  auto bad_magic = data;
  bad_magic[0] = 0;
  EXPECT_EQ(parse_data_packet(bad_magic, view), lq::Errc::bad_magic);

  auto bad_version = data;
  bad_version[2] = 2;
  EXPECT_EQ(parse_data_packet(bad_version, view), lq::Errc::bad_version);

  EXPECT_EQ(parse_data_packet(std::span(data).first(20), view), lq::Errc::truncated);
  EXPECT_EQ(parse_data_packet(std::span(data).first(33), view), lq::Errc::truncated);
  EXPECT_EQ(parse_feedback(data, fb), lq::Errc::wrong_type);

  auto longer = data;
  longer.push_back(0);
  EXPECT_EQ(parse_data_packet(longer, view), lq::Errc::malformed);

  auto zero_symbol = data;
  zero_symbol[28] = zero_symbol[29] = 0;
  EXPECT_EQ(parse_data_packet(zero_symbol, view), lq::Errc::malformed);

  auto feedback = encode_feedback({5, 3, {{1, 2}}});
  EXPECT_EQ(parse_data_packet(feedback, view), lq::Errc::wrong_type);
  EXPECT_EQ(parse_feedback(std::span(feedback).first(30), fb), lq::Errc::truncated);

  // received > highest + 1
  auto inconsistent = encode_feedback({5, 6, {}});
  inconsistent[19] = 7;
  EXPECT_EQ(parse_feedback(inconsistent, fb), lq::Errc::malformed);

  try {
    decode_data_packet(bad_magic);
    FAIL();
  } catch (const lq::Error& e) {
    EXPECT_EQ(e.code(), lq::Errc::bad_magic);
  }
}

TEST(Wire, SerializerRejectsInvalidValues) {
  EXPECT_THROW(encode_data_packet({0, 0, 0, 0, 1}, std::vector<std::uint8_t>(1)), lq::Error);
  EXPECT_THROW(encode_data_packet({0, 0, 0, 1, 2}, std::vector<std::uint8_t>(1)), lq::Error);
  EXPECT_THROW(encode_feedback({3, 5, {}}), lq::Error);
}

TEST(Wire, CanonicalRoundtripProperty) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    DataPacketHeader h{rng(), rng(), static_cast<std::uint32_t>(rng()),
                       static_cast<std::uint32_t>(1 + rng() % 0xfffffffeu),
                       static_cast<std::uint16_t>(1 + rng() % 64)};
    std::vector<std::uint8_t> payload(h.symbol_size);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
    auto bytes = encode_data_packet(h, payload);
    auto view = decode_data_packet(bytes);
    ASSERT_EQ(view.header, h);
    ASSERT_TRUE(std::equal(payload.begin(), payload.end(), view.payload.begin(), view.payload.end()));
    ASSERT_EQ(encode_data_packet(view.header, view.payload), bytes);

    FeedbackPacket f;
    f.highest_seq_seen = (i % 17 == 0) ? kNoSequence : rng() >> 1;
    f.total_data_packets_received = f.seq_span() == 0 ? 0 : rng() % f.seq_span();
    f.entries.resize(rng() % 20);
    for (auto& e : f.entries) e = {rng(), static_cast<std::uint32_t>(rng())};
    auto fbytes = encode_feedback(f);
    ASSERT_EQ(fbytes.size(), feedback_size(f.entries.size()));
    ASSERT_EQ(decode_feedback(fbytes), f);
    ASSERT_EQ(encode_feedback(decode_feedback(fbytes)), fbytes);
  }
}

TEST(Wire, FuzzNeverCrashes) {
  std::mt19937_64 rng(2);
  std::vector<std::uint8_t> buf(2000);
  std::size_t accepted = 0;
  const int cases = 1000000;
  for (int i = 0; i < cases; ++i) {
    const std::size_t len = 1 + rng() % 2000;
    for (std::size_t j = 0; j < len; j += 8) {
      const std::uint64_t r = rng();
      std::memcpy(buf.data() + j, &r, std::min<std::size_t>(8, len - j));
    }
    // Half of the inputs get a valid preamble so the field parsers are reached.
    if (i % 2 == 0 && len >= 4) {
      buf[0] = 0x4C;
      buf[1] = 0x51;
      buf[2] = 0x01;
      buf[3] = (i % 4 == 0) ? 0x01 : 0x02;
      if (i % 8 == 0 && len >= 30) {
        buf[28] = static_cast<std::uint8_t>((len - 30) >> 8);
        buf[29] = static_cast<std::uint8_t>(len - 30);
      } else if (i % 8 == 2 && len >= 22) {
        const std::size_t n = (len - 22) / 12;
        buf[20] = static_cast<std::uint8_t>(n >> 8);
        buf[21] = static_cast<std::uint8_t>(n);
        buf[12] = buf[13] = 0;  // keep received small
      }
    }
    std::span<const std::uint8_t> in(buf.data(), len);
    DataPacketView view;
    FeedbackPacket fb;
    if (parse_data_packet(in, view) == lq::Errc::ok) {
      ++accepted;
      ASSERT_EQ(view.payload.size(), view.header.symbol_size);
    }
    if (parse_feedback(in, fb) == lq::Errc::ok) {
      ++accepted;
      ASSERT_EQ(in.size(), feedback_size(fb.entries.size()));
    }
  }
  EXPECT_GT(accepted, 0u);
}

}  // namespace
