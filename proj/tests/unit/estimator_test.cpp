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

#include "lq/estimator.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using lq::FeedbackCounters;
using lq::LossStats;

FeedbackCounters at(std::uint64_t span, std::uint64_t received) { return {span - 1, received}; }

TEST(LossSample, Definition) {
  auto s = lq::loss_sample(at(1, 0), at(1001, 950));
  ASSERT_TRUE(s);
  EXPECT_NEAR(*s, 0.05, 1e-12);
}

TEST(LossSample, NoNewSequenceNumbers) {
  EXPECT_FALSE(lq::loss_sample(at(10, 9), at(10, 9)));
  // Feedback before anything was seen.
  EXPECT_FALSE(lq::loss_sample(FeedbackCounters{}, FeedbackCounters{}));
}

TEST(LossSample, ReorderingClampsToZero) {
  // Two late packets from before the previous horizon arrive in this window.
  auto s = lq::loss_sample(at(100, 90), at(110, 102));
  ASSERT_TRUE(s);
  EXPECT_EQ(*s, 0.0);
}

TEST(LossSample, FirstFeedbackUsesSentinel) {
  auto s = lq::loss_sample(FeedbackCounters{}, at(4, 3));
  ASSERT_TRUE(s);
  EXPECT_NEAR(*s, 0.25, 1e-12);
}

TEST(LossSample, RegressionIsStale) {
  try {
    lq::loss_sample(at(100, 90), at(99, 90));
    FAIL();
  } catch (const lq::Error& e) {
    EXPECT_EQ(e.code(), lq::Errc::stale_feedback);
  }
  EXPECT_THROW(lq::loss_sample(at(100, 90), at(120, 89)), lq::Error);
}

TEST(Ewma, FirstUpdate) {
  auto out = lq::ewma_update(LossStats{}, 0.1);
  EXPECT_NEAR(out.p_hat, 0.01, 1e-12);
}

TEST(Ewma, MeanAndVarianceUpdate) {
  LossStats s;
  s.p_hat = 0.05;
  auto out = lq::ewma_update(s, 0.25);
  EXPECT_NEAR(out.p_hat, 0.07, 1e-12);
  EXPECT_NEAR(out.var_hat, 0.00324, 1e-12);
}

TEST(Ewma, ConstantSamplesReachFixedPoint) {
  for (double c : {0.0, 0.03, 0.5, 1.0}) {
    LossStats s;
    s.var_hat = 0.2;
    for (int i = 0; i < 500; ++i) s = lq::ewma_update(s, c);
    EXPECT_NEAR(s.p_hat, c, 1e-6);
    EXPECT_NEAR(s.var_hat, 0.0, 1e-6);
  }
}

TEST(Ewma, RejectsOutOfRangeSample) {
  EXPECT_THROW(lq::ewma_update(LossStats{}, 1.5), lq::Error);
  EXPECT_THROW(lq::ewma_update(LossStats{}, -0.1), lq::Error);
}

TEST(Ewma, SamplingNoiseCorrectionOnlyWhenSizeGiven) {
  LossStats s;
  s.p_hat = 0.1;
  auto plain = lq::ewma_update(s, 0.12);
  auto corrected = lq::ewma_update(s, 0.12, 100);
  EXPECT_EQ(plain.p_hat, corrected.p_hat);
  EXPECT_LT(corrected.var_hat, plain.var_hat);
  EXPECT_GE(corrected.var_hat, 0.0);
}

TEST(EwmaProperty, StaysClamped) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double alpha : {0.01, 0.1, 0.5, 1.0}) {
    LossStats s;
    s.alpha = alpha;
    for (int i = 0; i < 20000; ++i) {
      const double sample = (i % 3 == 0) ? (rng() & 1 ? 1.0 : 0.0) : u(rng);
      s = lq::ewma_update(s, sample, (i % 2) ? std::optional<std::uint64_t>(1 + rng() % 50) : std::nullopt);
      ASSERT_GE(s.p_hat, 0.0);
      ASSERT_LE(s.p_hat, 1.0);
      ASSERT_GE(s.var_hat, 0.0);
      ASSERT_LE(s.var_hat, lq::kMaxLossVariance);
    }
  }
}

// Each sample is the loss fraction of a 256-packet window with i.i.d.
// Bernoulli(p) drops.
TEST(EwmaProperty, ConvergesOnBernoulliLoss) {
  for (double p : {0.01, 0.1, 0.3}) {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
      std::mt19937_64 rng(seed);
      std::bernoulli_distribution drop(p);
      LossStats s;
      for (int i = 0; i < 2000; ++i) {
        int lost = 0;
        for (int j = 0; j < 256; ++j) lost += drop(rng);
        s = lq::ewma_update(s, lost / 256.0);
      }
      EXPECT_LT(std::abs(s.p_hat - p), 0.02) << "p=" << p << " seed=" << seed;
    }
  }
}

TEST(EwmaProperty, HigherSampleNeverLowersEstimate) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    LossStats s;
    s.p_hat = u(rng);
    s.var_hat = 0.25 * u(rng);
    const double sample = s.p_hat + (1.0 - s.p_hat) * u(rng);
    EXPECT_GE(lq::ewma_update(s, sample).p_hat, s.p_hat);
  }
}

TEST(LossEstimator, AccumulatesUntilMinimumSpan) {
  lq::EstimatorConfig cfg;
  cfg.min_sample_packets = 100;
  cfg.subtract_sampling_noise = false;
  lq::LossEstimator est(cfg);
  EXPECT_TRUE(est.observe(at(50, 45)));
  EXPECT_EQ(est.stats().samples, 0u);
  EXPECT_TRUE(est.observe(at(100, 90)));
  EXPECT_EQ(est.stats().samples, 1u);
  EXPECT_NEAR(est.stats().p_hat, 0.01, 1e-12);
  EXPECT_TRUE(est.observe(at(150, 140)));
  EXPECT_EQ(est.stats().samples, 1u);
}

TEST(LossEstimator, IgnoresStaleFeedback) {
  lq::EstimatorConfig cfg;
  cfg.min_sample_packets = 1;
  lq::LossEstimator est(cfg);
  EXPECT_TRUE(est.observe(at(100, 90)));
  const auto before = est.stats();
  EXPECT_FALSE(est.observe(at(80, 70)));
  EXPECT_EQ(est.stats().samples, before.samples);
  EXPECT_EQ(est.stats().p_hat, before.p_hat);
}

TEST(LossEstimator, RejectsBadAlpha) {
  lq::EstimatorConfig cfg;
  cfg.alpha = 0.0;
  EXPECT_THROW(lq::LossEstimator{cfg}, lq::Error);
}

}  // namespace
