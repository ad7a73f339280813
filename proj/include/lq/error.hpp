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

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lq {

using BlockId = std::uint64_t;
using Esi = std::uint32_t;

// Engine time: nanoseconds since an arbitrary, caller-chosen epoch. The
// simulators drive it from a virtual clock, the UDP transport from
// std::chrono::steady_clock.
using Nanos = std::chrono::nanoseconds;

enum class Errc : int {
  ok = 0,
  invalid_argument,
  malformed_symbol,
  bad_magic,
  bad_version,
  truncated,
  wrong_type,
  malformed,
  stale_feedback,
  protocol_error,
  not_ready,
  scenario,
  io,
  bind,
  internal,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace lq
