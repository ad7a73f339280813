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

#include <string_view>
#include <vector>

namespace lq {

struct Breakpoint {
  double time_s = 0.0;
  double rate = 0.0;
};

enum class Interpolation { linear, step };

// Loss probability as a function of time. Linear traces interpolate between
// breakpoints; step traces hold each rate until the next breakpoint. Both
// hold the first rate before the first breakpoint and the last one after.
class LossTrace {
 public:
  LossTrace() = default;
  // Throws Error(invalid_argument) unless times strictly increase and every
  // rate is in [0, 1].
  LossTrace(std::vector<Breakpoint> points, Interpolation mode);

  static LossTrace constant(double rate);
  // One rate per segment, each `segment_s` long, starting at 0.
  static LossTrace stepped(const std::vector<double>& rates, double segment_s);

  double at(double time_s) const noexcept;
  const std::vector<Breakpoint>& points() const noexcept { return points_; }
  Interpolation mode() const noexcept { return mode_; }

 private:
  std::vector<Breakpoint> points_{{0.0, 0.0}};
  Interpolation mode_ = Interpolation::step;
};

std::string_view to_string(Interpolation mode) noexcept;
Interpolation interpolation_from_string(std::string_view name);

// Shape of the synthetic loss spike: nothing until 0.5 s, a peak at 0.83 s,
// a fast fall to 1.33 s, then a slow decay with a small bump, 0 by 8 s.
// Only the times are anchored; the levels scale with `peak`.
LossTrace spike_trace(double peak = 0.30);

}  // namespace lq
