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

#include "lq/gf256.hpp"

#include <cstring>

#include "lq/error.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define LQ_GF_X86 1
#endif

namespace lq::gf {

Element Element::inverse() const {
  if (v_ == 0) throw Error(Errc::invalid_argument, "gf256: zero has no inverse");
  return Element(inv(v_));
}

namespace {

// Full 256x256 product table for the scalar kernel.
struct MulTable {
  std::array<std::array<std::uint8_t, 256>, 256> row{};
  MulTable() {
    for (unsigned a = 0; a < 256; ++a)
      for (unsigned b = 0; b < 256; ++b)
        row[a][b] = mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b));
  }
};

const MulTable& mul_table() {
  static const MulTable t;
  return t;
}

// Split-nibble tables: c*x = lo[x & 15] ^ hi[x >> 4].
struct NibbleTables {
  alignas(32) std::uint8_t lo[32];
  alignas(32) std::uint8_t hi[32];
};

NibbleTables nibble_tables(std::uint8_t c) {
  NibbleTables t;
  for (unsigned i = 0; i < 16; ++i) {
    t.lo[i] = t.lo[i + 16] = mul(c, static_cast<std::uint8_t>(i));
    t.hi[i] = t.hi[i + 16] = mul(c, static_cast<std::uint8_t>(i << 4));
  }
  return t;
}

void mul_add_scalar(std::uint8_t* dst, const std::uint8_t* src, std::size_t n, std::uint8_t c) {
  const auto& row = mul_table().row[c];
  for (std::size_t i = 0; i < n; ++i) dst[i] ^= row[src[i]];
}

void scale_scalar(std::uint8_t* dst, std::size_t n, std::uint8_t c) {
  const auto& row = mul_table().row[c];
  for (std::size_t i = 0; i < n; ++i) dst[i] = row[dst[i]];
}

#ifdef LQ_GF_X86
__attribute__((target("avx2"))) void mul_add_avx2(std::uint8_t* dst, const std::uint8_t* src,
                                                  std::size_t n, std::uint8_t c) {
  const NibbleTables t = nibble_tables(c);
  const __m256i lo = _mm256_load_si256(reinterpret_cast<const __m256i*>(t.lo));
  const __m256i hi = _mm256_load_si256(reinterpret_cast<const __m256i*>(t.hi));
  const __m256i mask = _mm256_set1_epi8(0x0f);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    __m256i l = _mm256_shuffle_epi8(lo, _mm256_and_si256(x, mask));
    __m256i h = _mm256_shuffle_epi8(hi, _mm256_and_si256(_mm256_srli_epi64(x, 4), mask));
    __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i),
                        _mm256_xor_si256(d, _mm256_xor_si256(l, h)));
  }
  if (i < n) mul_add_scalar(dst + i, src + i, n - i, c);
}

__attribute__((target("ssse3"))) void mul_add_ssse3(std::uint8_t* dst, const std::uint8_t* src,
                                                    std::size_t n, std::uint8_t c) {
  const NibbleTables t = nibble_tables(c);
  const __m128i lo = _mm_load_si128(reinterpret_cast<const __m128i*>(t.lo));
  const __m128i hi = _mm_load_si128(reinterpret_cast<const __m128i*>(t.hi));
  const __m128i mask = _mm_set1_epi8(0x0f);
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    __m128i x = _mm_loadu_si128(reinterpret_cast<const __m128i*>(src + i));
    __m128i l = _mm_shuffle_epi8(lo, _mm_and_si128(x, mask));
    __m128i h = _mm_shuffle_epi8(hi, _mm_and_si128(_mm_srli_epi64(x, 4), mask));
    __m128i d = _mm_loadu_si128(reinterpret_cast<const __m128i*>(dst + i));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(dst + i), _mm_xor_si128(d, _mm_xor_si128(l, h)));
  }
  if (i < n) mul_add_scalar(dst + i, src + i, n - i, c);
}
#endif

using MulAddFn = void (*)(std::uint8_t*, const std::uint8_t*, std::size_t, std::uint8_t);

struct Kernel {
  MulAddFn mul_add;
  const char* name;
};

Kernel select_kernel() {
#ifdef LQ_GF_X86
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return {mul_add_avx2, "avx2"};
  if (__builtin_cpu_supports("ssse3")) return {mul_add_ssse3, "ssse3"};
#endif
  return {mul_add_scalar, "scalar"};
}

const Kernel& kernel() {
  static const Kernel k = select_kernel();
  return k;
}

}  // namespace

void add_to(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src) noexcept {
  const std::size_t n = dst.size();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    std::uint64_t a, b;
    std::memcpy(&a, dst.data() + i, 8);
    std::memcpy(&b, src.data() + i, 8);
    a ^= b;
    std::memcpy(dst.data() + i, &a, 8);
  }
  for (; i < n; ++i) dst[i] ^= src[i];
}

void mul_add(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src, std::uint8_t c) noexcept {
  if (c == 0) return;
  if (c == 1) {
    add_to(dst, src);
    return;
  }
  kernel().mul_add(dst.data(), src.data(), dst.size(), c);
}

void scale(std::span<std::uint8_t> dst, std::uint8_t c) noexcept {
  if (c == 1) return;
  if (c == 0) {
    std::memset(dst.data(), 0, dst.size());
    return;
  }
  scale_scalar(dst.data(), dst.size(), c);
}

const char* kernel_name() noexcept { return kernel().name; }

}  // namespace lq::gf
