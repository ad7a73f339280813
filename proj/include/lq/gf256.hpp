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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace lq::gf {

// GF(2^8) with the reduction polynomial x^8 + x^4 + x^3 + x^2 + 1 (0x11D),
// generator 2. Same field as RaptorQ's octet arithmetic.
inline constexpr unsigned kPolynomial = 0x11D;

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<std::uint16_t, 256> log{};
};

constexpr Tables make_tables() {
  Tables t;
  unsigned x = 1;
  for (unsigned i = 0; i < 255; ++i) {
    t.exp[i] = static_cast<std::uint8_t>(x);
    t.log[x] = static_cast<std::uint16_t>(i);
    x <<= 1;
    if (x & 0x100) x ^= kPolynomial;
  }
  // Doubled so exp[log a + log b] never needs a modulo.
  for (unsigned i = 255; i < 512; ++i) t.exp[i] = t.exp[i - 255];
  return t;
}

inline constexpr Tables kTables = make_tables();

constexpr std::uint8_t mul(std::uint8_t a, std::uint8_t b) noexcept {
  if (a == 0 || b == 0) return 0;
  return kTables.exp[kTables.log[a] + kTables.log[b]];
}

// a must be nonzero.
constexpr std::uint8_t inv(std::uint8_t a) noexcept {
  return kTables.exp[255 - kTables.log[a]];
}

class Element {
 public:
  constexpr Element() = default;
  constexpr explicit Element(std::uint8_t v) : v_(v) {}

  constexpr std::uint8_t value() const noexcept { return v_; }
  constexpr bool is_zero() const noexcept { return v_ == 0; }

  // Throws lq::Error(invalid_argument) for zero.
  Element inverse() const;

  friend constexpr Element operator+(Element a, Element b) noexcept {
    return Element(static_cast<std::uint8_t>(a.v_ ^ b.v_));
  }
  friend constexpr Element operator-(Element a, Element b) noexcept { return a + b; }
  friend constexpr Element operator*(Element a, Element b) noexcept {
    return Element(mul(a.v_, b.v_));
  }
  friend Element operator/(Element a, Element b) { return a * b.inverse(); }
  friend constexpr bool operator==(Element, Element) = default;

 private:
  std::uint8_t v_ = 0;
};

// Bulk kernels. Lengths of dst and src must match.
void add_to(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src) noexcept;
// dst ^= c * src
void mul_add(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src, std::uint8_t c) noexcept;
// dst *= c
void scale(std::span<std::uint8_t> dst, std::uint8_t c) noexcept;

// Name of the kernel selected at startup ("avx2", "ssse3" or "scalar").
const char* kernel_name() noexcept;

}  // namespace lq::gf
