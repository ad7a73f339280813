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
#include <iosfwd>
#include <vector>

namespace lq {

struct CodecBenchOptions {
  std::vector<std::uint32_t> ks{16, 64, 256, 1024};
  std::uint16_t symbol_size = 1250;
  double loss = 0.10;  // fraction of source symbols replaced by repair symbols
  std::uint32_t repeats = 5;
  std::uint64_t seed = 1;
};

// Medians over the repeats. Throughput counts block bytes, not symbols sent.
struct CodecBenchRow {
  std::uint32_t k = 0;
  std::uint16_t symbol_size = 0;
  double loss = 0;
  std::uint32_t repair_symbols = 0;
  double encode_ms = 0;
  double decode_ms = 0;
  double encode_mbps = 0;
  double decode_mbps = 0;
};

// Throws Error(internal) if a decode does not reproduce the block.
std::vector<CodecBenchRow> run_codec_bench(const CodecBenchOptions& options);

// k,symbol_size,loss,repair_symbols,encode_ms,decode_ms,encode_mbps,decode_mbps
void write_codec_bench_csv(std::ostream& out, const std::vector<CodecBenchRow>& rows);

}  // namespace lq
