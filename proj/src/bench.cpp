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

#include "lq/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

#include "lq/codec.hpp"

namespace lq {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

std::vector<CodecBenchRow> run_codec_bench(const CodecBenchOptions& opt) {
  if (opt.ks.empty() || opt.repeats == 0 || opt.symbol_size == 0)
    throw Error(Errc::invalid_argument, "need at least one K, one repeat and a nonzero symbol size");
  if (!(opt.loss >= 0.0 && opt.loss < 1.0)) throw Error(Errc::invalid_argument, "loss must be in [0, 1)");
  using clock = std::chrono::steady_clock;
  const auto codec = make_codec(CodecKind::rlc);
  std::mt19937_64 rng(opt.seed);
  std::vector<CodecBenchRow> rows;

  for (std::uint32_t k : opt.ks) {
    if (k == 0) throw Error(Errc::invalid_argument, "K must be >= 1");
    const std::size_t bytes = std::size_t{k} * opt.symbol_size;
    const auto lost = static_cast<std::uint32_t>(std::llround(opt.loss * k));
    std::vector<double> enc_ms, dec_ms;
    for (std::uint32_t rep = 0; rep < opt.repeats; ++rep) {
      std::vector<std::uint8_t> data(bytes);
      for (auto& b : data) b = static_cast<std::uint8_t>(rng());
      std::vector<Esi> order(k);
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<Esi> esis(order.begin() + lost, order.end());
      for (std::uint32_t i = 0; i < lost + 2; ++i) esis.push_back(k + i);

      const BlockId id = rows.size() * opt.repeats + rep;
      std::vector<std::vector<std::uint8_t>> payloads(esis.size(), std::vector<std::uint8_t>(opt.symbol_size));
      const auto t0 = clock::now();
      auto enc = codec->make_encoder(id, static_cast<std::uint32_t>(bytes), data, opt.symbol_size);
      for (std::size_t i = 0; i < esis.size(); ++i) enc->encode(esis[i], payloads[i]);
      const auto t1 = clock::now();
      auto dec = codec->make_decoder(id, static_cast<std::uint32_t>(bytes), opt.symbol_size);
      std::optional<std::vector<std::uint8_t>> out;
      for (std::size_t i = 0; i < esis.size() && !dec->complete(); ++i) dec->add(esis[i], payloads[i]);
      out = dec->try_finish();
      const auto t2 = clock::now();
      if (!out || *out != data) throw Error(Errc::internal, "codec bench: decode mismatch at K=" + std::to_string(k));
      enc_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
      dec_ms.push_back(std::chrono::duration<double, std::milli>(t2 - t1).count());
    }
    CodecBenchRow row;
    row.k = k;
    row.symbol_size = opt.symbol_size;
    row.loss = opt.loss;
    row.repair_symbols = lost + 2;
    row.encode_ms = median(enc_ms);
    row.decode_ms = median(dec_ms);
    row.encode_mbps = static_cast<double>(bytes) * 8 / 1e3 / std::max(row.encode_ms, 1e-6);
    row.decode_mbps = static_cast<double>(bytes) * 8 / 1e3 / std::max(row.decode_ms, 1e-6);
    rows.push_back(row);
  }
  return rows;
}

void write_codec_bench_csv(std::ostream& out, const std::vector<CodecBenchRow>& rows) {
  out << "k,symbol_size,loss,repair_symbols,encode_ms,decode_ms,encode_mbps,decode_mbps\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%u,%u,%.6f,%u,%.6f,%.6f,%.3f,%.3f\n", r.k, r.symbol_size, r.loss,
                  r.repair_symbols, r.encode_ms, r.decode_ms, r.encode_mbps, r.decode_mbps);
    out << buf;
  }
}

}  // namespace lq
