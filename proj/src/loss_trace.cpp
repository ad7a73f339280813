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

#include "lq/loss_trace.hpp"

#include <algorithm>
#include <string>

#include "lq/error.hpp"

namespace lq {

LossTrace::LossTrace(std::vector<Breakpoint> points, Interpolation mode)
    : points_(std::move(points)), mode_(mode) {
  if (points_.empty()) throw Error(Errc::invalid_argument, "loss trace needs at least one breakpoint");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!(p.rate >= 0.0 && p.rate <= 1.0))
      throw Error(Errc::invalid_argument, "loss rate outside [0, 1] at breakpoint " + std::to_string(i));
    if (i > 0 && !(p.time_s > points_[i - 1].time_s))
      throw Error(Errc::invalid_argument, "breakpoint times must strictly increase");
  }
}

LossTrace LossTrace::constant(double rate) { return LossTrace({{0.0, rate}}, Interpolation::step); }

LossTrace LossTrace::stepped(const std::vector<double>& rates, double segment_s) {
  if (!(segment_s > 0.0)) throw Error(Errc::invalid_argument, "segment length must be positive");
  std::vector<Breakpoint> pts;
  for (std::size_t i = 0; i < rates.size(); ++i) pts.push_back({segment_s * static_cast<double>(i), rates[i]});
  return LossTrace(std::move(pts), Interpolation::step);
}

double LossTrace::at(double t) const noexcept {
  if (t <= points_.front().time_s) return points_.front().rate;
  if (t >= points_.back().time_s) return points_.back().rate;
  auto hi = std::upper_bound(points_.begin(), points_.end(), t,
                             [](double v, const Breakpoint& b) { return v < b.time_s; });
  auto lo = std::prev(hi);
  if (mode_ == Interpolation::step) return lo->rate;
  const double f = (t - lo->time_s) / (hi->time_s - lo->time_s);
  return lo->rate + f * (hi->rate - lo->rate);
}

std::string_view to_string(Interpolation mode) noexcept {
  return mode == Interpolation::linear ? "linear" : "step";
}

Interpolation interpolation_from_string(std::string_view name) {
  if (name == "linear") return Interpolation::linear;
  if (name == "step") return Interpolation::step;
  throw Error(Errc::invalid_argument, "interpolation must be \"linear\" or \"step\"");
}

LossTrace spike_trace(double peak) {
  if (!(peak >= 0.0 && peak <= 1.0)) throw Error(Errc::invalid_argument, "peak loss outside [0, 1]");
  return LossTrace({{0.0, 0.0},
                    {0.5, 0.0},
                    {0.83, peak},
                    {1.33, peak / 3.0},
                    {3.0, peak / 6.0},
                    {4.5, peak / 15.0},
                    {5.5, peak / 6.0},
                    {6.5, peak / 30.0},
                    {8.0, 0.0}},
                   Interpolation::linear);
}

}  // namespace lq
