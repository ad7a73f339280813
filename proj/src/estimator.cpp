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

#include <algorithm>

namespace lq {

std::optional<double> loss_sample(const FeedbackCounters& prev, const FeedbackCounters& cur) {
  if (cur.seq_span() < prev.seq_span() || cur.received < prev.received)
    throw Error(Errc::stale_feedback, "feedback counters regressed");
  const std::uint64_t d_span = cur.seq_span() - prev.seq_span();
  if (d_span == 0) return std::nullopt;
  const double d_recv = static_cast<double>(cur.received - prev.received);
  return std::clamp(1.0 - d_recv / static_cast<double>(d_span), 0.0, 1.0);
}

LossStats ewma_update(const LossStats& stats, double sample, std::optional<std::uint64_t> sample_packets) {
  if (!(sample >= 0.0 && sample <= 1.0)) throw Error(Errc::invalid_argument, "loss sample outside [0,1]");
  const double a = stats.alpha;
  LossStats out = stats;
  out.p_hat = std::clamp((1.0 - a) * stats.p_hat + a * sample, 0.0, 1.0);
  double dev = (sample - out.p_hat) * (sample - out.p_hat);
  if (sample_packets && *sample_packets > 0)
    dev -= out.p_hat * (1.0 - out.p_hat) / static_cast<double>(*sample_packets);
  out.var_hat = std::clamp((1.0 - a) * stats.var_hat + a * dev, 0.0, kMaxLossVariance);
  ++out.samples;
  return out;
}

LossEstimator::LossEstimator(EstimatorConfig config) : config_(config) {
  if (!(config_.alpha > 0.0 && config_.alpha <= 1.0))
    throw Error(Errc::invalid_argument, "alpha must be in (0, 1]");
  stats_.alpha = config_.alpha;
}

bool LossEstimator::observe(const FeedbackCounters& counters) {
  if (counters.seq_span() < latest_.seq_span() || counters.received < latest_.received) return false;
  latest_ = counters;
  const std::uint64_t span = counters.seq_span() - reference_.seq_span();
  if (span < std::max<std::uint64_t>(config_.min_sample_packets, 1)) return true;
  if (auto s = loss_sample(reference_, counters)) {
    std::optional<std::uint64_t> n;
    if (config_.subtract_sampling_noise) n = span;
    stats_ = ewma_update(stats_, *s, n);
  }
  reference_ = counters;
  return true;
}

}  // namespace lq
