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

#include "lq/estimator.hpp"

namespace lq {

struct PlanParams {
  double z_var = 1.0;   // standard deviations of loss-rate headroom
  double z_bin = 2.0;   // binomial tail multiplier
  std::optional<std::uint32_t> c_extra;  // default max(2, ceil(0.005 K))
  double p_cap = 0.9;

  void validate() const;  // throws Error(invalid_argument)
};

std::uint32_t surplus_symbols(std::uint32_t k, const PlanParams& params);

// clamp(p_hat + z_var * sqrt(var_hat), 0, p_cap)
double planning_loss(const LossStats& stats, const PlanParams& params);

// Lower-tail arrivals out of m sends: m q - z sqrt(m p q), q = 1 - p.
double expected_arrivals_low(std::uint64_t m, double p, double z) noexcept;

// ceil(x^2) for x = (z sqrt(pq) + sqrt(z^2 pq + 4 q T)) / (2q), the positive
// root of x^2 q - z sqrt(pq) x = T. target must be >= 0 and p in [0, 1).
std::uint64_t closed_form_sends(double target, double p, double z);

// Smallest m >= floor with expected_arrivals_low(m, p, z) >= target: the
// closed form, then checked against the inequality to absorb rounding.
std::uint64_t min_sends(double target, double p, double z, std::uint64_t floor = 0);

// Initial symbol count for a block of k source symbols.
std::uint64_t plan_initial(std::uint32_t k, const LossStats& stats, const PlanParams& params);

// Additional symbols for a block that has `reported` symbols acknowledged and
// `in_flight` symbols sent or queued beyond the feedback horizon, so that
// reported + E-(in_flight + n) >= target. target defaults to K + c_extra.
std::uint64_t plan_topup(std::uint32_t k, std::uint64_t reported, std::uint64_t in_flight,
                         const LossStats& stats, const PlanParams& params,
                         std::optional<std::uint64_t> target = std::nullopt);

}  // namespace lq
