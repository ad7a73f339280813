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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "lq/error.hpp"

namespace lq {

inline constexpr std::uint16_t kDefaultSymbolSize = 1250;

// ceil(block_bytes / symbol_size), never less than 1.
std::uint32_t symbol_count(std::uint64_t block_bytes, std::uint16_t symbol_size);

// A block split into K equal symbols, the last one zero-padded.
class SourceBlock {
 public:
  SourceBlock(BlockId id, std::span<const std::uint8_t> data, std::uint16_t symbol_size);

  BlockId block_id() const noexcept { return id_; }
  std::uint16_t symbol_size() const noexcept { return symbol_size_; }
  std::uint32_t k() const noexcept { return k_; }
  std::size_t original_size() const noexcept { return original_size_; }
  std::span<const std::uint8_t> symbol(std::uint32_t i) const;

 private:
  BlockId id_;
  std::uint16_t symbol_size_;
  std::uint32_t k_;
  std::size_t original_size_;
  std::vector<std::uint8_t> padded_;
};

struct EncodedSymbol {
  BlockId block_id = 0;
  Esi esi = 0;
  std::vector<std::uint8_t> payload;
};

// Coefficients of repair symbol `esi` (esi >= K) over the K source symbols.
// Every coefficient is nonzero. The derivation is fixed bit-for-bit (see
// docs/FORMAT.md) so independent encoders and decoders agree:
//   state = block_id XOR (esi * 0xD1B54A32D192ED03)            (mod 2^64)
//   repeat: state += 0x9E3779B97F4A7C15; z = splitmix64_mix(state)
//   the 8 bytes of z, least significant first, each map to 1 + (b mod 255)
void repair_coefficients(BlockId block_id, Esi esi, std::span<std::uint8_t> out);

// Systematic for esi < K, random-linear combination otherwise.
EncodedSymbol encode_symbol(const SourceBlock& block, Esi esi);

enum class AddResult { innovative, redundant, duplicate };

class BlockEncoder {
 public:
  virtual ~BlockEncoder() = default;
  virtual std::uint32_t k() const noexcept = 0;
  virtual std::uint16_t symbol_size() const noexcept = 0;
  // out.size() must equal symbol_size().
  virtual void encode(Esi esi, std::span<std::uint8_t> out) const = 0;
};

class BlockDecoder {
 public:
  virtual ~BlockDecoder() = default;
  virtual std::uint32_t k() const noexcept = 0;
  virtual std::uint32_t rank() const noexcept = 0;
  // Distinct symbols accepted so far (duplicates excluded).
  virtual std::uint32_t received() const noexcept = 0;
  bool complete() const noexcept { return rank() == k(); }
  // Throws Error(malformed_symbol) when the payload has the wrong size.
  virtual AddResult add(Esi esi, std::span<const std::uint8_t> payload) = 0;
  // The original bytes once rank == K, std::nullopt before that.
  virtual std::optional<std::vector<std::uint8_t>> try_finish() const = 0;
};

enum class CodecKind { rlc, ideal };

std::string_view to_string(CodecKind kind) noexcept;
std::optional<CodecKind> codec_kind_from_string(std::string_view name) noexcept;

// ESIs already received for one block. Source ESIs use a K-bit map, repair
// ESIs a hash set, so a hostile ESI cannot force a large allocation.
class EsiSet {
 public:
  explicit EsiSet(std::uint32_t k) : source_(k, false) {}
  // False if `esi` was already present.
  bool insert(Esi esi);
  bool contains(Esi esi) const;

 private:
  std::vector<bool> source_;
  std::unordered_set<Esi> repair_;
};

class Codec {
 public:
  virtual ~Codec() = default;
  virtual CodecKind kind() const noexcept = 0;
  // Whether make_encoder needs the block bytes.
  virtual bool needs_data() const noexcept = 0;
  // `data` may be empty when !needs_data(); block_bytes is then authoritative.
  virtual std::unique_ptr<BlockEncoder> make_encoder(BlockId id, std::uint32_t block_bytes,
                                                     std::span<const std::uint8_t> data,
                                                     std::uint16_t symbol_size) const = 0;
  virtual std::unique_ptr<BlockDecoder> make_decoder(BlockId id, std::uint32_t block_bytes,
                                                     std::uint16_t symbol_size) const = 0;
};

std::shared_ptr<const Codec> make_codec(CodecKind kind);

// Incremental Gauss-Jordan decoder for the GF(256) random-linear code. Every
// stored row is kept fully reduced against the other pivots, so finishing
// is a copy-out.
class RlcDecoder final : public BlockDecoder {
 public:
  RlcDecoder(BlockId id, std::uint32_t block_bytes, std::uint16_t symbol_size);

  std::uint32_t k() const noexcept override { return k_; }
  std::uint32_t rank() const noexcept override { return rank_; }
  std::uint32_t received() const noexcept override { return received_; }
  AddResult add(Esi esi, std::span<const std::uint8_t> payload) override;
  std::optional<std::vector<std::uint8_t>> try_finish() const override;

  BlockId block_id() const noexcept { return id_; }
  AddResult add(const EncodedSymbol& sym);

 private:
  struct Row {
    bool unit = false;                  // coefficients are e_pivot
    std::uint32_t pivot = 0;
    std::vector<std::uint8_t> coeffs;   // size K unless unit
    std::vector<std::uint8_t> payload;  // size symbol_size
  };

  BlockId id_;
  std::uint32_t block_bytes_;
  std::uint16_t symbol_size_;
  std::uint32_t k_;
  std::uint32_t rank_ = 0;
  std::uint32_t received_ = 0;
  std::vector<Row> rows_;
  std::vector<std::int32_t> pivot_row_;  // column -> index into rows_, -1 if free
  std::vector<std::uint32_t> dense_rows_;
  EsiSet seen_;
};

// Recovers exactly when K distinct ESIs have arrived; carries no data.
class IdealDecoder final : public BlockDecoder {
 public:
  explicit IdealDecoder(std::uint32_t k) : k_(k), seen_(k) {}

  std::uint32_t k() const noexcept override { return k_; }
  std::uint32_t rank() const noexcept override { return received_ < k_ ? received_ : k_; }
  std::uint32_t received() const noexcept override { return received_; }
  AddResult add(Esi esi, std::span<const std::uint8_t> payload) override;
  // Returns an empty vector once complete.
  std::optional<std::vector<std::uint8_t>> try_finish() const override;

 private:
  std::uint32_t k_;
  std::uint32_t received_ = 0;
  EsiSet seen_;
};

}  // namespace lq
