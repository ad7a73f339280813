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

#include <cstdint>
#include <optional>

#include "lq/wire.hpp"

namespace lq {

// Snapshot of the receiver's two cumulative counters as carried in feedback.
struct FeedbackCounters {
  std::uint64_t highest_seq_seen = wire::kNoSequence;
  std::uint64_t received = 0;

  std::uint64_t seq_span() const noexcept { return highest_seq_seen + 1; }
  static FeedbackCounters from(const wire::FeedbackPacket& f) noexcept {
    return {f.highest_seq_seen, f.total_data_packets_received};
  }
};

struct LossStats {
  double p_hat = 0.0;
  double var_hat = 0.0;
  double alpha = 0.1;
  std::uint64_t samples = 0;
};

inline constexpr double kMaxLossVariance = 0.25;

// Loss fraction between two feedback snapshots: 1 - d(received)/d(highest),
// clamped to [0, 1]. std::nullopt when no new sequence numbers were covered.
// Throws Error(stale_feedback) if either counter went backwards.
std::optional<double> loss_sample(const FeedbackCounters& prev, const FeedbackCounters& cur);

// p' = (1-a) p + a s
// v' = (1-a) v + a ((s - p')^2 - noise)
// where noise = p'(1-p')/sample_packets when the sample size is known, so
// var_hat tracks variation of the underlying rate rather than the binomial
// scatter of finite windows. Both outputs are clamped ([0,1], [0,0.25]).
LossStats ewma_update(const LossStats& stats, double sample,
                      std::optional<std::uint64_t> sample_packets = std::nullopt);

struct EstimatorConfig {
  double alpha = 0.1;
  // Feedback deltas are accumulated until they cover this many sequence
  // numbers before forming one sample.
  std::uint64_t min_sample_packets = 64;
  bool subtract_sampling_noise = true;
};

// Feeds cumulative feedback counters into the EWMA.
class LossEstimator {
 public:
  explicit LossEstimator(EstimatorConfig config = {});

  // Returns false for stale (regressed) counters, which are ignored.
  bool observe(const FeedbackCounters& counters);

  const LossStats& stats() const noexcept { return stats_; }
  const EstimatorConfig& config() const noexcept { return config_; }

 private:
  EstimatorConfig config_;
  LossStats stats_;
  FeedbackCounters reference_;
  FeedbackCounters latest_;
};

}  // namespace lq
