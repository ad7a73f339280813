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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lq/emulator.hpp"
#include "lq/simulator.hpp"

namespace lq::scenario {

enum class Mode { simulate, emurun };

// A validated scenario file. See docs/SCENARIOS.md for the schema.
struct Scenario {
  std::string name;
  std::string description;
  Mode mode = Mode::simulate;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  PlanParams plan;
  sim::SimConfig sim;  // mode == simulate; its seed, loss and estimator are filled in
  emu::EmuConfig emu;  // mode == emurun; likewise
};

// Throws Error(scenario) listing every problem found, one per line, each
// prefixed with the JSON path.
Scenario parse(std::string_view json_text, std::string_view origin = "<string>");
Scenario load(const std::filesystem::path& path);

void set_seed(Scenario& s, std::uint64_t seed);

// Effective configuration with defaults filled in, in the file schema.
std::string to_json(const Scenario& s);

// Directory of shipped scenarios: $LQ_SCENARIO_DIR, else the build-time path.
std::filesystem::path scenario_dir();
std::vector<std::filesystem::path> shipped();

struct Summary {
  std::uint64_t frames = 0;
  std::uint64_t delivered = 0;
  double p50_ms = 0, p95_ms = 0, p99_ms = 0, max_ms = 0;
  double mean_overhead = 0;  // mean of symbols sent / K over frames
  std::uint64_t duplicate_sends = 0;
};

struct RunOutput {
  Summary summary;
  std::optional<Summary> oracle;  // simulate mode
  std::vector<std::filesystem::path> files;
};

// Runs the scenario and writes its CSVs plus summary.json under `out_dir`.
RunOutput run(const Scenario& s, const std::filesystem::path& out_dir);

// "frames=.. delivered=.. p50_ms=.. p95_ms=.. p99_ms=.. max_ms=.. mean_overhead=.."
std::string summary_line(const Summary& s);

}  // namespace lq::scenario
