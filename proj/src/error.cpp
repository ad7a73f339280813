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

#include "lq/error.hpp"

namespace lq {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::ok: return "ok";
    case Errc::invalid_argument: return "invalid argument";
    case Errc::malformed_symbol: return "malformed symbol";
    case Errc::bad_magic: return "bad magic";
    case Errc::bad_version: return "unknown version";
    case Errc::truncated: return "truncated packet";
    case Errc::wrong_type: return "packet type mismatch";
    case Errc::malformed: return "malformed packet";
    case Errc::stale_feedback: return "stale feedback";
    case Errc::protocol_error: return "protocol error";
    case Errc::not_ready: return "not ready";
    case Errc::scenario: return "invalid scenario";
    case Errc::io: return "i/o error";
    case Errc::bind: return "socket bind failure";
    case Errc::internal: return "internal error";
  }
  return "unknown error";
}

}  // namespace lq
