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

#include "lq/codec.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"

namespace {

using lq::AddResult;
using lq::EncodedSymbol;
using lq::RlcDecoder;
using lq::SourceBlock;

std::vector<std::uint8_t> random_bytes(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>(rng());
  return v;
}

TEST(SourceBlock, PadsFinalSymbolAndCountsK) {
  std::vector<std::uint8_t> data(10, 0xab);
  SourceBlock block(3, data, 4);
  EXPECT_EQ(block.k(), 3u);
  EXPECT_EQ(block.original_size(), 10u);
  auto last = block.symbol(2);
  EXPECT_EQ(last[0], 0xab);
  EXPECT_EQ(last[1], 0xab);
  EXPECT_EQ(last[2], 0);
  EXPECT_EQ(last[3], 0);
  EXPECT_THROW(SourceBlock(0, {}, 4), lq::Error);
  EXPECT_EQ(lq::symbol_count(0, 4), 1u);
}

TEST(EncodeSymbol, SystematicPrefix) {
  std::vector<std::uint8_t> data{1, 2, 3, 4, 5, 6, 7, 8};
  SourceBlock block(9, data, 2);
  ASSERT_EQ(block.k(), 4u);
  auto sym = lq::encode_symbol(block, 2);
  EXPECT_EQ(sym.payload, (std::vector<std::uint8_t>{5, 6}));
}

TEST(EncodeSymbol, SingleSymbolBlockRepairIsScalarMultiple) {
  std::mt19937_64 rng(5);
  auto data = random_bytes(rng, 16);
  SourceBlock block(77, data, 16);
  for (lq::Esi esi : {1u, 2u, 100u, 4000000000u}) {
    std::uint8_t c = 0;
    lq::repair_coefficients(77, esi, {&c, 1});
    ASSERT_NE(c, 0);
    auto sym = lq::encode_symbol(block, esi);
    for (std::size_t i = 0; i < data.size(); ++i) EXPECT_EQ(sym.payload[i], lq::oracle::slow_mul(c, data[i]));
  }
}

TEST(EncodeSymbol, Deterministic) {
  std::mt19937_64 rng(6);
  auto data = random_bytes(rng, 300);
  SourceBlock block(1, data, 32);
  EXPECT_EQ(lq::encode_symbol(block, 40).payload, lq::encode_symbol(block, 40).payload);
  SourceBlock again(1, data, 32);
  EXPECT_EQ(lq::encode_symbol(block, 41).payload, lq::encode_symbol(again, 41).payload);
}

TEST(RepairCoefficients, FrozenVector) {
  // Pins the bit-exact derivation documented in docs/FORMAT.md.
  std::array<std::uint8_t, 10> c{};
  lq::repair_coefficients(0, 0, c);
  std::array<std::uint8_t, 10> again{};
  lq::repair_coefficients(0, 0, again);
  EXPECT_EQ(c, again);
  for (auto v : c) EXPECT_NE(v, 0);
  // splitmix64 first output for state 0x9E3779B97F4A7C15 is 0xE220A8397B1DCDAF.
  EXPECT_EQ(c[0], 1 + 0xAF % 255);
  EXPECT_EQ(c[1], 1 + 0xCD % 255);
  EXPECT_EQ(c[2], 1 + 0x1D % 255);
  EXPECT_EQ(c[7], 1 + 0xE2 % 255);
}

TEST(RlcDecoder, FirstSymbolGivesRankOneAndDuplicatesAreIgnored) {
  std::mt19937_64 rng(7);
  auto data = random_bytes(rng, 80);
  SourceBlock block(2, data, 10);
  RlcDecoder dec(2, 80, 10);
  EXPECT_EQ(dec.add(lq::encode_symbol(block, 5)), AddResult::innovative);
  EXPECT_EQ(dec.rank(), 1u);
  EXPECT_EQ(dec.add(lq::encode_symbol(block, 5)), AddResult::duplicate);
  EXPECT_EQ(dec.rank(), 1u);
  EXPECT_EQ(dec.received(), 1u);
  EXPECT_FALSE(dec.try_finish().has_value());
}

TEST(RlcDecoder, RejectsWrongSizeOrBlock) {
  RlcDecoder dec(2, 80, 10);
  std::vector<std::uint8_t> small(9);
  try {
    dec.add(0, small);
    FAIL() << "expected malformed symbol";
  } catch (const lq::Error& e) {
    EXPECT_EQ(e.code(), lq::Errc::malformed_symbol);
  }
  EncodedSymbol other{3, 0, std::vector<std::uint8_t>(10)};
  EXPECT_THROW(dec.add(other), lq::Error);
}

TEST(RlcDecoder, SystematicSymbolsCopyOut) {
  std::mt19937_64 rng(8);
  auto data = random_bytes(rng, 1000);
  SourceBlock block(4, data, 64);
  RlcDecoder dec(4, 1000, 64);
  for (lq::Esi i = 0; i < block.k(); ++i) dec.add(lq::encode_symbol(block, i));
  auto out = dec.try_finish();
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(*out, data);
}

TEST(RlcDecoder, RepairOnlyK16MatchesOracleSolve) {
  std::mt19937_64 rng(9);
  constexpr std::uint16_t kSymbol = 8;
  auto data = random_bytes(rng, 16 * kSymbol);
  SourceBlock block(12, data, kSymbol);
  ASSERT_EQ(block.k(), 16u);

  lq::oracle::Matrix coeffs, rhs;
  RlcDecoder dec(12, static_cast<std::uint32_t>(data.size()), kSymbol);
  for (lq::Esi esi = 16; esi < 32; ++esi) {
    auto sym = lq::encode_symbol(block, esi);
    std::vector<std::uint8_t> row(16);
    lq::repair_coefficients(12, esi, row);
    coeffs.push_back(row);
    rhs.push_back(sym.payload);
    dec.add(sym);
  }
  ASSERT_EQ(lq::oracle::rank(coeffs), 16u);
  auto solved = lq::oracle::solve(coeffs, rhs);
  ASSERT_TRUE(solved.has_value());
  std::vector<std::uint8_t> flat;
  for (auto& r : *solved) flat.insert(flat.end(), r.begin(), r.end());
  EXPECT_EQ(flat, data);

  auto out = dec.try_finish();
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(*out, data);
}

TEST(RlcDecoder, EightRandomSymbolsReachFullRankMostly) {
  // Monte Carlo: 10,000 trials, K=8, 8 distinct uniformly random ESIs.
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<lq::Esi> pick(0, 999);
  int full = 0;
  const int trials = 10000;
  std::vector<std::uint8_t> payload(1, 0);
  for (int t = 0; t < trials; ++t) {
    RlcDecoder dec(static_cast<lq::BlockId>(t), 8, 1);
    std::set<lq::Esi> chosen;
    while (chosen.size() < 8) chosen.insert(pick(rng));
    for (auto esi : chosen) dec.add(esi, payload);
    if (dec.rank() == 8) ++full;
  }
  EXPECT_GE(static_cast<double>(full) / trials, 0.96);
}

TEST(RlcDecoder, RankMatchesOracleOnRandomSubsets) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 200; ++t) {
    const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % 12);
    RlcDecoder dec(t, k, 1);
    lq::oracle::Matrix m;
    std::vector<std::uint8_t> payload(1, 0);
    std::set<lq::Esi> used;
    for (int i = 0; i < static_cast<int>(k) + 2; ++i) {
      lq::Esi esi = static_cast<lq::Esi>(rng() % (2 * k + 4));
      if (!used.insert(esi).second) continue;
      std::vector<std::uint8_t> row(k, 0);
      if (esi < k) row[esi] = 1; else lq::repair_coefficients(t, esi, row);
      m.push_back(row);
      dec.add(esi, payload);
      ASSERT_EQ(dec.rank(), lq::oracle::rank(m));
    }
  }
}

TEST(IdealDecoder, RecoversAtKDistinct) {
  auto codec = lq::make_codec(lq::CodecKind::ideal);
  {
    auto dec = codec->make_decoder(0, 3, 1);
    dec->add(0, {});
    dec->add(7, {});
    EXPECT_FALSE(dec->complete());
    dec->add(9, {});
    EXPECT_TRUE(dec->complete());
    EXPECT_TRUE(dec->try_finish().has_value());
  }
  {
    auto dec = codec->make_decoder(0, 3, 1);
    dec->add(0, {});
    EXPECT_EQ(dec->add(0, {}), AddResult::duplicate);
    dec->add(7, {});
    EXPECT_FALSE(dec->complete());
  }
  {
    auto dec = codec->make_decoder(0, 500, 1);
    for (lq::Esi e = 0; e < 499; ++e) dec->add(e * 3, {});
    EXPECT_FALSE(dec->complete());
    EXPECT_FALSE(dec->try_finish().has_value());
  }
}

// Properties ---------------------------------------------------------------

TEST(CodecProperties, SystematicRoundtrip) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 200; ++t) {
    const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % 64);
    const std::uint16_t ss = static_cast<std::uint16_t>(1 + rng() % 40);
    const std::size_t len = (k - 1) * ss + 1 + rng() % ss;
    auto data = random_bytes(rng, len);
    SourceBlock block(t, data, ss);
    ASSERT_EQ(block.k(), k);
    RlcDecoder dec(t, static_cast<std::uint32_t>(len), ss);
    for (lq::Esi i = 0; i < k; ++i) dec.add(lq::encode_symbol(block, i));
    ASSERT_EQ(dec.try_finish(), data);
  }
}

TEST(CodecProperties, AnyFullRankSetDecodesToSameBytes) {
  std::mt19937_64 rng(22);
  for (std::uint32_t k = 1; k <= 32; ++k) {
    auto data = random_bytes(rng, k * 6);
    SourceBlock block(k, data, 6);
    for (int variant = 0; variant < 3; ++variant) {
      RlcDecoder dec(k, k * 6, 6);
      std::set<lq::Esi> used;
      while (!dec.complete()) {
        lq::Esi esi = static_cast<lq::Esi>(rng() % (4 * k + 8));
        if (used.insert(esi).second) dec.add(lq::encode_symbol(block, esi));
      }
      ASSERT_EQ(dec.try_finish(), data) << "k=" << k;
    }
  }
}

TEST(CodecProperties, TwoExtraRepairSymbolsAlmostAlwaysSuffice) {
  std::mt19937_64 rng(23);
  const int trials = 10000;
  int failures = 0;
  std::vector<std::uint8_t> payload(1, 0);
  for (int t = 0; t < trials; ++t) {
    RlcDecoder dec(rng(), 16, 1);
    const lq::Esi base = 16 + static_cast<lq::Esi>(rng() % 100000);
    for (lq::Esi i = 0; i < 18; ++i) dec.add(base + i, payload);
    if (!dec.complete()) ++failures;
  }
  EXPECT_LT(static_cast<double>(failures) / trials, 1e-3);
}

}  // namespace
