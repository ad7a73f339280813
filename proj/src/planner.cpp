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

#include "lq/planner.hpp"

#include <algorithm>
#include <cmath>

namespace lq {

void PlanParams::validate() const {
  if (!(z_var >= 0.0) || !(z_bin >= 0.0)) throw Error(Errc::invalid_argument, "z multipliers must be >= 0");
  if (!(p_cap >= 0.0 && p_cap < 1.0)) throw Error(Errc::invalid_argument, "p_cap must be in [0, 1)");
}

std::uint32_t surplus_symbols(std::uint32_t k, const PlanParams& params) {
  if (params.c_extra) return *params.c_extra;
  const auto proportional = static_cast<std::uint32_t>(std::ceil(0.005 * k));
  return std::max<std::uint32_t>(2, proportional);
}

double planning_loss(const LossStats& stats, const PlanParams& params) {
  const double p = stats.p_hat + params.z_var * std::sqrt(std::max(0.0, stats.var_hat));
  return std::clamp(p, 0.0, params.p_cap);
}

double expected_arrivals_low(std::uint64_t m, double p, double z) noexcept {
  const double q = 1.0 - p;
  const double md = static_cast<double>(m);
  return md * q - z * std::sqrt(md * p * q);
}

std::uint64_t closed_form_sends(double target, double p, double z) {
  if (!(p >= 0.0 && p < 1.0)) throw Error(Errc::invalid_argument, "loss must be in [0, 1)");
  const double q = 1.0 - p;
  const double b = z * std::sqrt(p * q);
  const double s = std::sqrt(b * b + 4.0 * q * std::max(target, 0.0));
  // x^2 expanded, so p = 0 gives exactly T instead of sqrt(T) squared.
  const double x2 = (b * b + 2.0 * q * std::max(target, 0.0) + b * s) / (2.0 * q * q);
  return static_cast<std::uint64_t>(std::ceil(x2));
}

std::uint64_t min_sends(double target, double p, double z, std::uint64_t floor) {
  if (target <= 0.0 && expected_arrivals_low(floor, p, z) >= target) return floor;
  std::uint64_t m = std::max(closed_form_sends(target, p, z), floor);
  while (m > floor && expected_arrivals_low(m - 1, p, z) >= target) --m;
  while (expected_arrivals_low(m, p, z) < target) ++m;
  return m;
}

std::uint64_t plan_initial(std::uint32_t k, const LossStats& stats, const PlanParams& params) {
  if (k == 0) throw Error(Errc::invalid_argument, "block needs at least one symbol");
  const double t = static_cast<double>(k) + surplus_symbols(k, params);
  return min_sends(t, planning_loss(stats, params), params.z_bin, static_cast<std::uint64_t>(t));
}

std::uint64_t plan_topup(std::uint32_t k, std::uint64_t reported, std::uint64_t in_flight,
                         const LossStats& stats, const PlanParams& params,
                         std::optional<std::uint64_t> target) {
  const std::uint64_t t = target ? *target : std::uint64_t{k} + surplus_symbols(k, params);
  if (reported >= t) return 0;
  const double deficit = static_cast<double>(t - reported);
  return min_sends(deficit, planning_loss(stats, params), params.z_bin, in_flight) - in_flight;
}

}  // namespace lq
