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

#include "lq/codec.hpp"

#include <algorithm>
#include <cstring>

#include "lq/gf256.hpp"

namespace lq {

std::uint32_t symbol_count(std::uint64_t block_bytes, std::uint16_t symbol_size) {
  if (symbol_size == 0) throw Error(Errc::invalid_argument, "symbol size must be >= 1");
  const std::uint64_t k = (block_bytes + symbol_size - 1) / symbol_size;
  return static_cast<std::uint32_t>(std::max<std::uint64_t>(k, 1));
}

SourceBlock::SourceBlock(BlockId id, std::span<const std::uint8_t> data, std::uint16_t symbol_size)
    : id_(id),
      symbol_size_(symbol_size),
      k_(symbol_count(data.size(), symbol_size)),
      original_size_(data.size()),
      padded_(static_cast<std::size_t>(k_) * symbol_size, 0) {
  if (data.empty()) throw Error(Errc::invalid_argument, "source block must not be empty");
  std::memcpy(padded_.data(), data.data(), data.size());
}

std::span<const std::uint8_t> SourceBlock::symbol(std::uint32_t i) const {
  if (i >= k_) throw Error(Errc::invalid_argument, "source symbol index out of range");
  return {padded_.data() + static_cast<std::size_t>(i) * symbol_size_, symbol_size_};
}

namespace {

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void encode_into(const SourceBlock& block, Esi esi, std::span<std::uint8_t> out) {
  if (out.size() != block.symbol_size())
    throw Error(Errc::invalid_argument, "output span has wrong size");
  if (esi < block.k()) {
    auto src = block.symbol(esi);
    std::memcpy(out.data(), src.data(), src.size());
    return;
  }
  std::vector<std::uint8_t> coeffs(block.k());
  repair_coefficients(block.block_id(), esi, coeffs);
  std::memset(out.data(), 0, out.size());
  for (std::uint32_t j = 0; j < block.k(); ++j) gf::mul_add(out, block.symbol(j), coeffs[j]);
}

class RlcEncoder final : public BlockEncoder {
 public:
  RlcEncoder(BlockId id, std::span<const std::uint8_t> data, std::uint16_t symbol_size)
      : block_(id, data, symbol_size) {}

  std::uint32_t k() const noexcept override { return block_.k(); }
  std::uint16_t symbol_size() const noexcept override { return block_.symbol_size(); }
  void encode(Esi esi, std::span<std::uint8_t> out) const override { encode_into(block_, esi, out); }

 private:
  SourceBlock block_;
};

class IdealEncoder final : public BlockEncoder {
 public:
  IdealEncoder(std::uint32_t block_bytes, std::uint16_t symbol_size)
      : k_(symbol_count(block_bytes, symbol_size)), symbol_size_(symbol_size) {}

  std::uint32_t k() const noexcept override { return k_; }
  std::uint16_t symbol_size() const noexcept override { return symbol_size_; }
  void encode(Esi, std::span<std::uint8_t> out) const override {
    std::memset(out.data(), 0, out.size());
  }

 private:
  std::uint32_t k_;
  std::uint16_t symbol_size_;
};

class RlcCodec final : public Codec {
 public:
  CodecKind kind() const noexcept override { return CodecKind::rlc; }
  bool needs_data() const noexcept override { return true; }
  std::unique_ptr<BlockEncoder> make_encoder(BlockId id, std::uint32_t block_bytes,
                                             std::span<const std::uint8_t> data,
                                             std::uint16_t symbol_size) const override {
    if (data.size() != block_bytes)
      throw Error(Errc::invalid_argument, "rlc encoder needs the block bytes");
    return std::make_unique<RlcEncoder>(id, data, symbol_size);
  }
  std::unique_ptr<BlockDecoder> make_decoder(BlockId id, std::uint32_t block_bytes,
                                             std::uint16_t symbol_size) const override {
    return std::make_unique<RlcDecoder>(id, block_bytes, symbol_size);
  }
};

class IdealCodec final : public Codec {
 public:
  CodecKind kind() const noexcept override { return CodecKind::ideal; }
  bool needs_data() const noexcept override { return false; }
  std::unique_ptr<BlockEncoder> make_encoder(BlockId, std::uint32_t block_bytes,
                                             std::span<const std::uint8_t>,
                                             std::uint16_t symbol_size) const override {
    if (block_bytes == 0) throw Error(Errc::invalid_argument, "block must not be empty");
    return std::make_unique<IdealEncoder>(block_bytes, symbol_size);
  }
  std::unique_ptr<BlockDecoder> make_decoder(BlockId, std::uint32_t block_bytes,
                                             std::uint16_t symbol_size) const override {
    return std::make_unique<IdealDecoder>(symbol_count(block_bytes, symbol_size));
  }
};

}  // namespace

void repair_coefficients(BlockId block_id, Esi esi, std::span<std::uint8_t> out) {
  std::uint64_t state = block_id ^ (static_cast<std::uint64_t>(esi) * 0xD1B54A32D192ED03ULL);
  std::size_t i = 0;
  while (i < out.size()) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = splitmix64_mix(state);
    for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(1 + (z & 0xff) % 255);
      z >>= 8;
    }
  }
}

EncodedSymbol encode_symbol(const SourceBlock& block, Esi esi) {
  EncodedSymbol sym{block.block_id(), esi, std::vector<std::uint8_t>(block.symbol_size())};
  encode_into(block, esi, sym.payload);
  return sym;
}

std::string_view to_string(CodecKind kind) noexcept {
  return kind == CodecKind::rlc ? "rlc" : "ideal";
}

std::optional<CodecKind> codec_kind_from_string(std::string_view name) noexcept {
  if (name == "rlc") return CodecKind::rlc;
  if (name == "ideal") return CodecKind::ideal;
  return std::nullopt;
}

std::shared_ptr<const Codec> make_codec(CodecKind kind) {
  if (kind == CodecKind::rlc) return std::make_shared<RlcCodec>();
  return std::make_shared<IdealCodec>();
}

// ---------------------------------------------------------------------------
// RlcDecoder

RlcDecoder::RlcDecoder(BlockId id, std::uint32_t block_bytes, std::uint16_t symbol_size)
    : id_(id),
      block_bytes_(block_bytes),
      symbol_size_(symbol_size),
      k_(symbol_count(block_bytes, symbol_size)),
      pivot_row_(k_, -1),
      seen_(k_) {
  if (block_bytes == 0) throw Error(Errc::invalid_argument, "block must not be empty");
  rows_.reserve(k_);
}

bool EsiSet::insert(Esi esi) {
  if (esi < source_.size()) {
    if (source_[esi]) return false;
    source_[esi] = true;
    return true;
  }
  return repair_.insert(esi).second;
}

bool EsiSet::contains(Esi esi) const {
  return esi < source_.size() ? static_cast<bool>(source_[esi]) : repair_.count(esi) != 0;
}

AddResult RlcDecoder::add(const EncodedSymbol& sym) {
  if (sym.block_id != id_) throw Error(Errc::malformed_symbol, "symbol belongs to another block");
  return add(sym.esi, sym.payload);
}

AddResult RlcDecoder::add(Esi esi, std::span<const std::uint8_t> payload) {
  if (payload.size() != symbol_size_)
    throw Error(Errc::malformed_symbol, "symbol size mismatch");
  if (!seen_.insert(esi)) return AddResult::duplicate;
  ++received_;
  if (rank_ == k_) return AddResult::redundant;

  Row row;
  row.payload.assign(payload.begin(), payload.end());
  if (esi < k_) {
    row.coeffs.assign(k_, 0);
    row.coeffs[esi] = 1;
  } else {
    row.coeffs.resize(k_);
    repair_coefficients(id_, esi, row.coeffs);
  }

  // Reduce against existing pivots. Pivot rows are zero in every other pivot
  // column, so a single pass suffices.
  for (std::uint32_t c = 0; c < k_; ++c) {
    const std::uint8_t f = row.coeffs[c];
    if (f == 0 || pivot_row_[c] < 0) continue;
    const Row& p = rows_[static_cast<std::size_t>(pivot_row_[c])];
    if (p.unit) {
      row.coeffs[c] = 0;
    } else {
      gf::mul_add(row.coeffs, p.coeffs, f);
    }
    gf::mul_add(row.payload, p.payload, f);
  }

  std::uint32_t pivot = k_;
  for (std::uint32_t c = 0; c < k_; ++c) {
    if (row.coeffs[c] != 0) {
      pivot = c;
      break;
    }
  }
  if (pivot == k_) return AddResult::redundant;

  const std::uint8_t lead = row.coeffs[pivot];
  if (lead != 1) {
    const std::uint8_t s = gf::inv(lead);
    gf::scale(row.coeffs, s);
    gf::scale(row.payload, s);
  }
  bool unit = true;
  for (std::uint32_t c = 0; c < k_ && unit; ++c) {
    if (c != pivot && row.coeffs[c] != 0) unit = false;
  }

  // Clear the new pivot column from the other dense rows.
  for (std::size_t di = 0; di < dense_rows_.size();) {
    Row& other = rows_[dense_rows_[di]];
    const std::uint8_t f = other.coeffs[pivot];
    if (f != 0) {
      if (unit) {
        other.coeffs[pivot] = 0;
      } else {
        gf::mul_add(other.coeffs, row.coeffs, f);
      }
      gf::mul_add(other.payload, row.payload, f);
      bool still_dense = false;
      for (std::uint32_t c = 0; c < k_; ++c) {
        if (c != other.pivot && other.coeffs[c] != 0) {
          still_dense = true;
          break;
        }
      }
      if (!still_dense) {
        other.unit = true;
        other.coeffs.clear();
        other.coeffs.shrink_to_fit();
        dense_rows_[di] = dense_rows_.back();
        dense_rows_.pop_back();
        continue;
      }
    }
    ++di;
  }

  const auto index = static_cast<std::uint32_t>(rows_.size());
  row.unit = unit;
  row.pivot = pivot;
  if (unit) {
    row.coeffs.clear();
    row.coeffs.shrink_to_fit();
  } else {
    dense_rows_.push_back(index);
  }
  rows_.push_back(std::move(row));
  pivot_row_[pivot] = static_cast<std::int32_t>(index);
  ++rank_;
  return AddResult::innovative;
}

std::optional<std::vector<std::uint8_t>> RlcDecoder::try_finish() const {
  if (rank_ < k_) return std::nullopt;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(k_) * symbol_size_);
  for (std::uint32_t c = 0; c < k_; ++c) {
    const Row& r = rows_[static_cast<std::size_t>(pivot_row_[c])];
    std::memcpy(out.data() + static_cast<std::size_t>(c) * symbol_size_, r.payload.data(), symbol_size_);
  }
  out.resize(block_bytes_);
  return out;
}

// ---------------------------------------------------------------------------
// IdealDecoder

AddResult IdealDecoder::add(Esi esi, std::span<const std::uint8_t>) {
  if (!seen_.insert(esi)) return AddResult::duplicate;
  ++received_;
  return received_ <= k_ ? AddResult::innovative : AddResult::redundant;
}

std::optional<std::vector<std::uint8_t>> IdealDecoder::try_finish() const {
  if (received_ < k_) return std::nullopt;
  return std::vector<std::uint8_t>{};
}

}  // namespace lq
