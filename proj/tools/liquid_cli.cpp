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

// Command-line front end over the C API.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "liquid.h"

namespace {

enum Exit : int {
  kOk = 0,
  kRuntime = 1,
  kUsage = 2,
  kScenarioInvalid = 3,
  kBind = 4,
  kIo = 5,
  kIncomplete = 6,
};

const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  runtime failure\n"
    "  2  usage error\n"
    "  3  scenario failed validation or has the wrong mode\n"
    "  4  could not bind the UDP port\n"
    "  5  file or socket I/O failure\n"
    "  6  ran to the end but not every frame was delivered\n";

int report(lq_status st) {
  std::fprintf(stderr, "error: %s\n", lq_last_error());
  switch (st) {
    case LQ_INVALID_ARGUMENT: return kUsage;
    case LQ_SCENARIO_INVALID: return kScenarioInvalid;
    case LQ_BIND_FAILED: return kBind;
    case LQ_IO_ERROR: return kIo;
    default: return kRuntime;
  }
}

void print_summary(const char* label, const lq_summary& s) {
  std::printf("%s frames=%" PRIu64 " delivered=%" PRIu64
              " p50_ms=%.6f p95_ms=%.6f p99_ms=%.6f max_ms=%.6f mean_overhead=%.6f\n",
              label, s.frames, s.delivered, s.p50_ms, s.p95_ms, s.p99_ms, s.max_ms, s.mean_overhead);
}

// Accepts a path or the name of a shipped scenario.
std::string resolve_scenario(const std::string& arg) {
  if (std::filesystem::exists(arg)) return arg;
  size_t len = 0;
  lq_scenario_list(nullptr, 0, &len);
  std::string text(len + 1, '\0');
  if (lq_scenario_list(text.data(), text.size(), &len) != LQ_OK) return arg;
  text.resize(len);
  size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    const auto line = text.substr(pos, end - pos);
    pos = end == std::string::npos ? text.size() : end + 1;
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    const auto t3 = line.find('\t', t2 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos || t3 == std::string::npos) continue;
    if (line.substr(0, t1) == arg) return line.substr(t2 + 1, t3 - t2 - 1);
  }
  return arg;
}

struct ScenarioArgs {
  std::string scenario;
  std::string out;
  std::int64_t seed = -1;
};

void add_scenario_flags(CLI::App* cmd, ScenarioArgs& a) {
  cmd->add_option("--scenario", a.scenario, "Scenario JSON file or shipped scenario name")->required();
  cmd->add_option("--seed", a.seed, "Override the scenario seed")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", a.out, "Output directory (default: the scenario's output_dir)");
}

int run_scenario(const ScenarioArgs& a, lq_mode mode) {
  lq_summary liquid{}, oracle{};
  const auto path = resolve_scenario(a.scenario);
  const auto st = lq_scenario_run(path.c_str(), mode, a.out.empty() ? nullptr : a.out.c_str(), a.seed, &liquid,
                                  mode == LQ_MODE_SIMULATE ? &oracle : nullptr);
  if (st != LQ_OK) return report(st);
  print_summary("liquid", liquid);
  if (mode == LQ_MODE_SIMULATE) print_summary("oracle", oracle);
  return liquid.delivered == liquid.frames ? kOk : kIncomplete;
}

struct LinkArgs {
  std::uint32_t feedback_every = 16;
  double feedback_interval_ms = 5;
  double loss = 0;
  std::uint64_t seed = 1;
};

void add_link_flags(CLI::App* cmd, LinkArgs& a, bool with_loss) {
  cmd->add_option("--feedback-every", a.feedback_every, "Send feedback after this many data packets")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--feedback-interval-ms", a.feedback_interval_ms,
                  "Also send feedback this long after the last one if data arrived")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  if (with_loss) {
    cmd->add_option("--loss", a.loss, "Drop this fraction of data packets before sending")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 0.99));
    cmd->add_option("--seed", a.seed, "Seed for induced loss")->capture_default_str();
  }
}

lq_link_options to_link(const LinkArgs& a) {
  lq_link_options o;
  lq_link_options_default(&o);
  o.feedback_every_packets = a.feedback_every;
  o.feedback_interval_ns = static_cast<std::int64_t>(a.feedback_interval_ms * 1e6);
  o.induced_loss = a.loss;
  o.seed = a.seed;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fountain-coded block delivery: experiments, UDP endpoints and benchmarks"};
  app.footer(kExitCodes);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lq_version()));

  ScenarioArgs sim_args, emu_args;
  auto* simulate = app.add_subcommand("simulate", "Paired slotted simulation against the retransmission oracle");
  add_scenario_flags(simulate, sim_args);
  auto* emurun = app.add_subcommand("emurun", "Emulated link run with a loss schedule");
  add_scenario_flags(emurun, emu_args);

  auto* scenario = app.add_subcommand("scenario", "Shipped scenario files");
  scenario->require_subcommand(1);
  auto* list = scenario->add_subcommand("list", "List shipped scenarios");

  // send
  std::string send_bind = "0.0.0.0:0", peer, send_csv;
  double fps = 30, duration_s = 10, rtt_ms = 40, in_flight_ms = -1, linger_s = 2;
  std::vector<std::uint32_t> frame_sizes{40000};
  std::uint16_t symbol_size = 1250;
  LinkArgs send_link;
  auto* send = app.add_subcommand("send", "Stream frames to a receiver over UDP");
  send->add_option("--peer", peer, "Receiver address host:port")->required();
  send->add_option("--bind", send_bind, "Local address host:port")->capture_default_str();
  send->add_option("--fps", fps, "Frames per second")->capture_default_str()->check(CLI::PositiveNumber);
  send->add_option("--frame-size", frame_sizes, "Frame sizes in bytes, repeated in order")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  send->add_option("--duration", duration_s, "Seconds of frames")->capture_default_str()->check(CLI::PositiveNumber);
  send->add_option("--symbol-size", symbol_size, "Payload bytes per packet")
      ->capture_default_str()
      ->check(CLI::Range(1, 65000));
  send->add_option("--rtt-ms", rtt_ms, "Expected round trip")->capture_default_str()->check(CLI::NonNegativeNumber);
  send->add_option("--in-flight-timeout-ms", in_flight_ms,
                   "Presume unacknowledged packets lost after this long (default: rtt + feedback interval + 2)");
  send->add_option("--linger", linger_s, "Seconds to keep serving after the last frame")->capture_default_str();
  send->add_option("--csv", send_csv, "Write frame_id,k,symbols_sent");
  add_link_flags(send, send_link, true);

  // recv
  std::string recv_bind, recv_csv;
  std::uint32_t expected = 0;
  double idle_s = 3;
  LinkArgs recv_link;
  auto* recv = app.add_subcommand("recv", "Receive frames over UDP and send feedback");
  recv->add_option("--bind", recv_bind, "Local address host:port")->required();
  recv->add_option("--expected", expected, "Stop after this many frames (0: stop when idle)")->capture_default_str();
  recv->add_option("--idle-timeout", idle_s, "Seconds of silence before stopping")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  recv->add_option("--csv", recv_csv, "Write frame_id,block_bytes,k,symbols_received,latency_ms");
  add_link_flags(recv, recv_link, false);

  // bench-codec
  std::vector<std::uint32_t> ks{16, 64, 256, 1024};
  std::uint16_t bench_symbol = 1250;
  double codec_loss = 0.10;
  std::uint32_t repeats = 5;
  std::uint64_t codec_seed = 1;
  std::string codec_csv = "bench_codec.csv";
  auto* bench_codec = app.add_subcommand("bench-codec", "Encode and decode throughput of the block code");
  bench_codec->add_option("--k", ks, "Source symbols per block")->capture_default_str()->check(CLI::PositiveNumber);
  bench_codec->add_option("--symbol-size", bench_symbol, "Bytes per symbol")
      ->capture_default_str()
      ->check(CLI::Range(1, 65000));
  bench_codec->add_option("--loss", codec_loss, "Fraction of source symbols replaced by repair symbols")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 0.99));
  bench_codec->add_option("--repeats", repeats, "Runs per K")->capture_default_str()->check(CLI::PositiveNumber);
  bench_codec->add_option("--seed", codec_seed)->capture_default_str();
  bench_codec->add_option("--csv", codec_csv, "Output CSV")->capture_default_str();

  // bench-loopback
  std::vector<std::uint32_t> bench_sizes{31250, 62500, 125000, 250000};
  double bench_fps = 60, bench_loss = 0.10;
  std::uint32_t bench_frames = 10000;
  std::uint64_t bench_seed = 1;
  std::string bench_csv = "bench_loopback.csv";
  auto* bench_loop =
      app.add_subcommand("bench-loopback", "Submit-to-recovery latency over loopback UDP with induced loss");
  bench_loop->add_option("--frame-size", bench_sizes, "Frame sizes in bytes, one run each")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench_loop->add_option("--fps", bench_fps)->capture_default_str()->check(CLI::PositiveNumber);
  bench_loop->add_option("--frames", bench_frames, "Frames per size")->capture_default_str()->check(CLI::PositiveNumber);
  bench_loop->add_option("--loss", bench_loss)->capture_default_str()->check(CLI::Range(0.0, 0.99));
  bench_loop->add_option("--seed", bench_seed)->capture_default_str();
  bench_loop->add_option("--csv", bench_csv, "Output CSV")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (*simulate) return run_scenario(sim_args, LQ_MODE_SIMULATE);
  if (*emurun) return run_scenario(emu_args, LQ_MODE_EMURUN);

  if (*list) {
    size_t len = 0;
    lq_scenario_list(nullptr, 0, &len);
    std::string text(len + 1, '\0');
    if (const auto st = lq_scenario_list(text.data(), text.size(), &len); st != LQ_OK) return report(st);
    text.resize(len);
    std::fputs(text.c_str(), stdout);
    return kOk;
  }

  if (*send) {
    lq_send_options o{};
    o.bind = send_bind.c_str();
    o.peer = peer.c_str();
    o.fps = fps;
    o.frame_sizes = frame_sizes.data();
    o.frame_size_count = frame_sizes.size();
    o.duration_s = duration_s;
    lq_sender_config_default(&o.sender);
    o.sender.symbol_size = symbol_size;
    o.sender.rtt_ns = static_cast<std::int64_t>(rtt_ms * 1e6);
    const double timeout_ms = in_flight_ms >= 0 ? in_flight_ms : rtt_ms + send_link.feedback_interval_ms + 2;
    o.sender.in_flight_timeout_ns = static_cast<std::int64_t>(timeout_ms * 1e6);
    o.link = to_link(send_link);
    o.linger_ns = static_cast<std::int64_t>(linger_s * 1e9);
    o.csv_path = send_csv.empty() ? nullptr : send_csv.c_str();
    lq_send_result r{};
    if (const auto st = lq_udp_send(&o, &r); st != LQ_OK) return report(st);
    std::printf("sent frames=%" PRIu64 " packets=%" PRIu64 " dropped=%" PRIu64 " feedback=%" PRIu64
                " completed=%d\n",
                r.frames, r.packets, r.dropped, r.feedback_packets, r.completed);
    return r.completed ? kOk : kIncomplete;
  }

  if (*recv) {
    lq_recv_options o{};
    o.bind = recv_bind.c_str();
    o.expected_frames = expected;
    o.idle_timeout_ns = static_cast<std::int64_t>(idle_s * 1e9);
    lq_receiver_config_default(&o.receiver);
    o.link = to_link(recv_link);
    o.csv_path = recv_csv.empty() ? nullptr : recv_csv.c_str();
    lq_summary s{};
    if (const auto st = lq_udp_recv(&o, &s); st != LQ_OK) return report(st);
    print_summary("received", s);
    return s.delivered == s.frames ? kOk : kIncomplete;
  }

  if (*bench_codec) {
    lq_codec_bench_options o{};
    o.ks = ks.data();
    o.k_count = ks.size();
    o.symbol_size = bench_symbol;
    o.loss = codec_loss;
    o.repeats = repeats;
    o.seed = codec_seed;
    o.csv_path = codec_csv.c_str();
    if (const auto st = lq_bench_codec(&o); st != LQ_OK) return report(st);
    std::printf("wrote %s\n", codec_csv.c_str());
    return kOk;
  }

  if (*bench_loop) {
    lq_loopback_bench_options o{};
    o.frame_sizes = bench_sizes.data();
    o.frame_size_count = bench_sizes.size();
    o.fps = bench_fps;
    o.frames = bench_frames;
    o.induced_loss = bench_loss;
    o.seed = bench_seed;
    o.csv_path = bench_csv.c_str();
    std::vector<lq_summary> sums(bench_sizes.size());
    if (const auto st = lq_bench_loopback(&o, sums.data()); st != LQ_OK) return report(st);
    bool all = true;
    for (size_t i = 0; i < sums.size(); ++i) {
      char label[48];
      std::snprintf(label, sizeof label, "frame_bytes=%u", bench_sizes[i]);
      print_summary(label, sums[i]);
      all = all && sums[i].delivered == sums[i].frames;
    }
    return all ? kOk : kIncomplete;
  }
  return kUsage;
}
