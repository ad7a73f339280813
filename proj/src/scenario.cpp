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

#include "lq/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lq/stats.hpp"

namespace lq::scenario {

namespace {

using nlohmann::json;

// Collects every schema problem instead of stopping at the first.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "expected an object");
    return false;
  }

  void keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
      if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
        fail(path + "." + it.key(), "unknown key");
  }

  template <class Fn>
  void with(const json& j, const std::string& key, const std::string& path, Fn fn) {
    if (auto it = j.find(key); it != j.end()) fn(*it, path + "." + key);
  }

  void number(const json& j, const std::string& key, const std::string& path, double& out, double lo, double hi,
              bool lo_open = false) {
    with(j, key, path, [&](const json& v, const std::string& p) {
      if (!v.is_number()) return fail(p, "expected a number");
      const double x = v.get<double>();
      if (!std::isfinite(x) || x < lo || x > hi || (lo_open && x == lo))
        return fail(p, "must be in " + std::string(lo_open ? "(" : "[") + fmt(lo) + ", " + fmt(hi) + "]");
      out = x;
    });
  }

  template <class T>
  void integer(const json& j, const std::string& key, const std::string& path, T& out, std::uint64_t lo,
               std::uint64_t hi) {
    with(j, key, path, [&](const json& v, const std::string& p) {
      if (!v.is_number_unsigned()) return fail(p, "expected a non-negative integer");
      const auto x = v.get<std::uint64_t>();
      if (x < lo || x > hi) return fail(p, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      out = static_cast<T>(x);
    });
  }

  void boolean(const json& j, const std::string& key, const std::string& path, bool& out) {
    with(j, key, path, [&](const json& v, const std::string& p) {
      if (!v.is_boolean()) return fail(p, "expected true or false");
      out = v.get<bool>();
    });
  }

  void string(const json& j, const std::string& key, const std::string& path, std::string& out) {
    with(j, key, path, [&](const json& v, const std::string& p) {
      if (!v.is_string()) return fail(p, "expected a string");
      out = v.get<std::string>();
    });
  }

  static std::string fmt(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
  }
};

constexpr double kBig = 1e12;
constexpr std::uint64_t kMaxU32 = 0xFFFFFFFFull;

std::optional<LossTrace> read_loss(Reader& r, const json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  const int forms = j.contains("points") + j.contains("constant") + j.contains("steps");
  if (forms != 1) {
    r.fail(path, "give exactly one of \"points\", \"constant\" or \"steps\"");
    return std::nullopt;
  }
  const std::size_t before = r.errors.size();
  if (j.contains("constant")) {
    r.keys(j, path, {"constant"});
    double rate = 0;
    r.number(j, "constant", path, rate, 0, 1);
    if (r.errors.size() != before) return std::nullopt;
    return LossTrace::constant(rate);
  }
  if (j.contains("steps")) {
    r.keys(j, path, {"steps", "segment_s"});
    std::vector<double> rates;
    const auto& s = j["steps"];
    if (!s.is_array() || s.empty()) r.fail(path + ".steps", "expected a non-empty array of rates");
    else
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s[i].is_number() || s[i].get<double>() < 0 || s[i].get<double>() > 1)
          r.fail(path + ".steps[" + std::to_string(i) + "]", "must be a number in [0, 1]");
        else
          rates.push_back(s[i].get<double>());
      }
    double seg = 0;
    if (!j.contains("segment_s")) r.fail(path + ".segment_s", "required with \"steps\"");
    r.number(j, "segment_s", path, seg, 0, kBig, true);
    if (r.errors.size() != before) return std::nullopt;
    return LossTrace::stepped(rates, seg);
  }
  r.keys(j, path, {"points", "interpolation"});
  Interpolation mode = Interpolation::linear;
  r.with(j, "interpolation", path, [&](const json& v, const std::string& p) {
    if (!v.is_string() || (v != "linear" && v != "step")) return r.fail(p, "must be \"linear\" or \"step\"");
    mode = interpolation_from_string(v.get<std::string>());
  });
  std::vector<Breakpoint> points;
  const auto& pts = j["points"];
  if (!pts.is_array() || pts.empty()) {
    r.fail(path + ".points", "expected a non-empty array of [time_s, rate] pairs");
  } else {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& p = pts[i];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        r.fail(path + ".points[" + std::to_string(i) + "]", "expected [time_s, rate]");
        continue;
      }
      points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  }
  if (r.errors.size() != before) return std::nullopt;
  try {
    return LossTrace(points, mode);
  } catch (const Error& e) {
    r.fail(path + ".points", e.what());
    return std::nullopt;
  }
}

json loss_to_json(const LossTrace& t) {
  json pts = json::array();
  for (const auto& p : t.points()) pts.push_back({p.time_s, p.rate});
  return {{"interpolation", std::string(to_string(t.mode()))}, {"points", pts}};
}

void read_plan(Reader& r, const json& j, const std::string& path, PlanParams& p) {
  if (!r.object(j, path)) return;
  r.keys(j, path, {"z_var", "z_bin", "c_extra", "p_cap"});
  r.number(j, "z_var", path, p.z_var, 0, 100);
  r.number(j, "z_bin", path, p.z_bin, 0, 100);
  r.number(j, "p_cap", path, p.p_cap, 0, 0.999);
  r.with(j, "c_extra", path, [&](const json& v, const std::string& pp) {
    if (v.is_null()) return p.c_extra.reset();
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() > (1u << 20))
      return r.fail(pp, "expected null or an integer in [0, 1048576]");
    p.c_extra = v.get<std::uint32_t>();
  });
}

void read_estimator(Reader& r, const json& j, const std::string& path, EstimatorConfig& e) {
  if (!r.object(j, path)) return;
  r.keys(j, path, {"alpha", "min_sample_packets", "subtract_sampling_noise"});
  r.number(j, "alpha", path, e.alpha, 0, 1, true);
  r.integer(j, "min_sample_packets", path, e.min_sample_packets, 1, 1u << 30);
  r.boolean(j, "subtract_sampling_noise", path, e.subtract_sampling_noise);
}

void read_simulate(Reader& r, const json& j, const std::string& path, sim::SimConfig& c) {
  if (!r.object(j, path)) return;
  r.keys(j, path,
         {"frames", "packets_per_frame", "slots_per_frame", "one_way_delay_slots", "frame_interval_ms",
          "feedback_every_slots", "payload_bits", "warmup_s", "drain_slots"});
  r.integer(j, "frames", path, c.frames, 1, 1u << 24);
  r.integer(j, "packets_per_frame", path, c.packets_per_frame, 1, 1u << 24);
  r.integer(j, "slots_per_frame", path, c.slots_per_frame, 1, 1u << 26);
  r.integer(j, "one_way_delay_slots", path, c.one_way_delay_slots, 0, 1u << 26);
  r.number(j, "frame_interval_ms", path, c.frame_interval_ms, 0, kBig, true);
  r.integer(j, "feedback_every_slots", path, c.feedback_every_slots, 1, 1u << 26);
  r.number(j, "payload_bits", path, c.payload_bits, 0, kBig, true);
  r.number(j, "warmup_s", path, c.warmup_s, 0, kBig);
  r.integer(j, "drain_slots", path, c.drain_slots, 0, 1ull << 40);
}

void read_emurun(Reader& r, const json& j, const std::string& path, emu::EmuConfig& c) {
  if (!r.object(j, path)) return;
  r.keys(j, path, {"stream", "impairment", "transport"});
  r.with(j, "stream", path, [&](const json& s, const std::string& p) {
    if (!r.object(s, p)) return;
    r.keys(s, p, {"fps", "frame_sizes", "duration_s"});
    r.number(s, "fps", p, c.stream.fps, 0, 1e6, true);
    r.number(s, "duration_s", p, c.stream.duration_s, 0, 1e7, true);
    r.with(s, "frame_sizes", p, [&](const json& v, const std::string& pp) {
      if (!v.is_array() || v.empty()) return r.fail(pp, "expected a non-empty array of byte counts");
      c.stream.frame_sizes.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number_unsigned() || v[i].get<std::uint64_t>() == 0 || v[i].get<std::uint64_t>() > kMaxU32)
          r.fail(pp + "[" + std::to_string(i) + "]", "must be an integer in [1, 4294967295]");
        else
          c.stream.frame_sizes.push_back(v[i].get<std::uint32_t>());
      }
    });
  });
  r.with(j, "impairment", path, [&](const json& s, const std::string& p) {
    if (!r.object(s, p)) return;
    r.keys(s, p, {"forward_delay_ms", "reverse_delay_ms", "reverse_loss", "rate_cap_mbps"});
    r.number(s, "forward_delay_ms", p, c.impairment.forward_delay_ms, 0, 1e6);
    r.number(s, "reverse_delay_ms", p, c.impairment.reverse_delay_ms, 0, 1e6);
    r.number(s, "reverse_loss", p, c.impairment.reverse_loss, 0, 1);
    r.number(s, "rate_cap_mbps", p, c.impairment.rate_cap_mbps, 0, 1e7);
  });
  r.with(j, "transport", path, [&](const json& s, const std::string& p) {
    if (!r.object(s, p)) return;
    r.keys(s, p,
           {"codec", "symbol_size", "feedback_every_packets", "feedback_interval_ms", "in_flight_timeout_ms",
            "drain_s", "real_time"});
    r.with(s, "codec", p, [&](const json& v, const std::string& pp) {
      if (v == "rlc") c.codec = CodecKind::rlc;
      else if (v == "ideal") c.codec = CodecKind::ideal;
      else r.fail(pp, "must be \"rlc\" or \"ideal\"");
    });
    r.integer(s, "symbol_size", p, c.symbol_size, 1, 65000);
    r.integer(s, "feedback_every_packets", p, c.feedback_every_packets, 1, 1u << 20);
    r.number(s, "feedback_interval_ms", p, c.feedback_interval_ms, 0, 1e6, true);
    r.number(s, "in_flight_timeout_ms", p, c.in_flight_timeout_ms, 0, 1e6);
    r.number(s, "drain_s", p, c.drain_s, 0, 1e6);
    r.boolean(s, "real_time", p, c.real_time);
  });
}

Summary summarize_rows(std::uint64_t frames, std::vector<double> latencies, double overhead_sum,
                       std::uint64_t duplicates) {
  Summary s;
  s.frames = frames;
  s.delivered = latencies.size();
  if (!latencies.empty()) {
    const auto l = lq::summarize(latencies);
    s.p50_ms = l.p50;
    s.p95_ms = l.p95;
    s.p99_ms = l.p99;
    s.max_ms = l.max;
  }
  s.mean_overhead = frames ? overhead_sum / static_cast<double>(frames) : 0.0;
  s.duplicate_sends = duplicates;
  return s;
}

// Latencies as written to CSV, so summaries match recomputation from files.
double csv_round(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return std::strtod(buf, nullptr);
}

json summary_json(const Summary& s) {
  return {{"frames", s.frames},          {"delivered", s.delivered},       {"p50_ms", s.p50_ms},
          {"p95_ms", s.p95_ms},          {"p99_ms", s.p99_ms},             {"max_ms", s.max_ms},
          {"mean_overhead", s.mean_overhead}, {"duplicate_sends", s.duplicate_sends}};
}

}  // namespace

Scenario parse(std::string_view text, std::string_view origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::scenario, std::string(origin) + ": invalid JSON: " + e.what());
  }
  Reader r;
  Scenario s;
  const std::string root = "$";
  if (!r.object(j, root)) throw Error(Errc::scenario, std::string(origin) + ": " + r.errors.front());
  r.keys(j, root,
         {"name", "description", "mode", "seed", "output_dir", "plan", "estimator", "loss", "simulate", "emurun"});
  r.string(j, "name", root, s.name);
  r.string(j, "description", root, s.description);
  r.string(j, "output_dir", root, s.output_dir);
  r.integer(j, "seed", root, s.seed, 0, ~0ull);

  if (!j.contains("mode")) {
    r.fail("$.mode", "required (\"simulate\" or \"emurun\")");
  } else if (j["mode"] == "simulate") {
    s.mode = Mode::simulate;
  } else if (j["mode"] == "emurun") {
    s.mode = Mode::emurun;
  } else {
    r.fail("$.mode", "must be \"simulate\" or \"emurun\"");
  }
  const bool sim_mode = s.mode == Mode::simulate;
  if (j.contains("mode")) {
    const char* want = sim_mode ? "simulate" : "emurun";
    const char* other = sim_mode ? "emurun" : "simulate";
    if (!j.contains(want)) r.fail(std::string("$.") + want, "required for this mode");
    if (j.contains(other)) r.fail(std::string("$.") + other, "not allowed in this mode");
  }

  EstimatorConfig est;
  r.with(j, "plan", root, [&](const json& v, const std::string& p) { read_plan(r, v, p, s.plan); });
  r.with(j, "estimator", root, [&](const json& v, const std::string& p) { read_estimator(r, v, p, est); });
  std::optional<LossTrace> loss;
  if (!j.contains("loss")) r.fail("$.loss", "required");
  r.with(j, "loss", root, [&](const json& v, const std::string& p) { loss = read_loss(r, v, p); });
  r.with(j, "simulate", root, [&](const json& v, const std::string& p) { read_simulate(r, v, p, s.sim); });
  r.with(j, "emurun", root, [&](const json& v, const std::string& p) { read_emurun(r, v, p, s.emu); });

  if (r.errors.empty()) {
    try {
      s.plan.validate();
      if (sim_mode) {
        s.sim.estimator = est;
        s.sim.loss = *loss;
        s.sim.validate();
      } else {
        s.emu.estimator = est;
        s.emu.plan = s.plan;
        s.emu.impairment.loss = *loss;
        s.emu.validate();
      }
    } catch (const Error& e) {
      r.fail(sim_mode ? "$.simulate" : "$.emurun", e.what());
    }
  }
  if (!r.errors.empty()) {
    std::string msg = std::string(origin) + ": invalid scenario";
    for (const auto& e : r.errors) msg += "\n  " + e;
    throw Error(Errc::scenario, msg);
  }
  set_seed(s, s.seed);
  return s;
}

Scenario load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::scenario, path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

void set_seed(Scenario& s, std::uint64_t seed) {
  s.seed = seed;
  s.sim.seed = seed;
  s.emu.impairment.seed = seed;
}

std::string to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["description"] = s.description;
  j["mode"] = s.mode == Mode::simulate ? "simulate" : "emurun";
  j["seed"] = s.seed;
  j["output_dir"] = s.output_dir;
  j["plan"] = {{"z_var", s.plan.z_var}, {"z_bin", s.plan.z_bin}, {"p_cap", s.plan.p_cap}};
  j["plan"]["c_extra"] = s.plan.c_extra ? json(*s.plan.c_extra) : json(nullptr);
  const auto& est = s.mode == Mode::simulate ? s.sim.estimator : s.emu.estimator;
  j["estimator"] = {{"alpha", est.alpha},
                    {"min_sample_packets", est.min_sample_packets},
                    {"subtract_sampling_noise", est.subtract_sampling_noise}};
  if (s.mode == Mode::simulate) {
    const auto& c = s.sim;
    j["loss"] = loss_to_json(c.loss);
    j["simulate"] = {{"frames", c.frames},
                     {"packets_per_frame", c.packets_per_frame},
                     {"slots_per_frame", c.slots_per_frame},
                     {"one_way_delay_slots", c.one_way_delay_slots},
                     {"frame_interval_ms", c.frame_interval_ms},
                     {"feedback_every_slots", c.feedback_every_slots},
                     {"payload_bits", c.payload_bits},
                     {"warmup_s", c.warmup_s},
                     {"drain_slots", c.drain_slots}};
  } else {
    const auto& c = s.emu;
    j["loss"] = loss_to_json(c.impairment.loss);
    j["emurun"] = {
        {"stream", {{"fps", c.stream.fps}, {"frame_sizes", c.stream.frame_sizes}, {"duration_s", c.stream.duration_s}}},
        {"impairment",
         {{"forward_delay_ms", c.impairment.forward_delay_ms},
          {"reverse_delay_ms", c.impairment.reverse_delay_ms},
          {"reverse_loss", c.impairment.reverse_loss},
          {"rate_cap_mbps", c.impairment.rate_cap_mbps}}},
        {"transport",
         {{"codec", c.codec == CodecKind::rlc ? "rlc" : "ideal"},
          {"symbol_size", c.symbol_size},
          {"feedback_every_packets", c.feedback_every_packets},
          {"feedback_interval_ms", c.feedback_interval_ms},
          {"in_flight_timeout_ms", c.in_flight_timeout_ms},
          {"drain_s", c.drain_s},
          {"real_time", c.real_time}}}};
  }
  return j.dump(2);
}

std::filesystem::path scenario_dir() {
  if (const char* env = std::getenv("LQ_SCENARIO_DIR"); env && *env) return env;
#ifdef LQ_SCENARIO_DIR
  return LQ_SCENARIO_DIR;
#else
  return "scenarios";
#endif
}

std::vector<std::filesystem::path> shipped() {
  std::vector<std::filesystem::path> out;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(scenario_dir(), ec))
    if (e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

RunOutput run(const Scenario& s, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  RunOutput out;
  auto open = [&](const char* name) {
    const auto p = out_dir / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(Errc::io, p.string() + ": cannot write");
    out.files.push_back(p);
    return f;
  };
  json meta;
  meta["scenario"] = json::parse(to_json(s));

  if (s.mode == Mode::simulate) {
    const auto r = sim::paired_run(s.sim, s.plan);
    {
      auto f = open("frames.csv");
      sim::write_frames_csv(f, r);
    }
    {
      auto f = open("bandwidth.csv");
      sim::write_bandwidth_csv(f, r, s.sim);
    }
    auto sum = [&](const sim::RunResult& run) {
      std::vector<double> lat;
      double ratio = 0;
      for (const auto& f : run.frames) {
        if (f.delivered()) lat.push_back(csv_round(f.latency_ms));
        ratio += static_cast<double>(f.packets_sent) / s.sim.packets_per_frame;
      }
      return summarize_rows(run.frames.size(), std::move(lat), ratio, run.duplicate_sends);
    };
    out.summary = sum(r.liquid);
    out.oracle = sum(r.oracle);
    meta["liquid"] = summary_json(out.summary);
    meta["oracle"] = summary_json(*out.oracle);
  } else {
    const auto r = emu::run_emulated(s.emu);
    {
      auto f = open("frames.csv");
      emu::write_frames_csv(f, r);
    }
    {
      auto f = open("segments.csv");
      f << "t_begin_s,t_end_s,scheduled_rate,packets,dropped,realized_rate\n";
      for (const auto& g : r.segments) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.6f,%s,%.6f,%llu,%llu,%.6f\n", g.t_begin_s,
                      std::isinf(g.t_end_s) ? "inf" : std::to_string(g.t_end_s).c_str(), g.scheduled_rate,
                      static_cast<unsigned long long>(g.packets), static_cast<unsigned long long>(g.dropped),
                      g.realized());
        f << buf;
      }
    }
    std::vector<double> lat;
    double ratio = 0;
    for (const auto& f : r.frames) {
      if (f.delivered()) lat.push_back(csv_round(f.latency_ms));
      ratio += f.sent_ratio();
    }
    out.summary = summarize_rows(r.frames.size(), std::move(lat), ratio, r.duplicate_sends);
    meta["liquid"] = summary_json(out.summary);
    meta["link"] = {{"forward_packets", r.forward_packets}, {"forward_bytes", r.forward_bytes},
                    {"forward_losses", r.forward_losses},   {"feedback_packets", r.feedback_packets},
                    {"feedback_bytes", r.feedback_bytes},   {"feedback_losses", r.feedback_losses},
                    {"corrupt_blocks", r.corrupt_blocks},   {"topup_symbols", r.topup_symbols}};
  }
  {
    auto f = open("summary.json");
    f << meta.dump(2) << '\n';
  }
  return out;
}

std::string summary_line(const Summary& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "frames=%llu delivered=%llu p50_ms=%.6f p95_ms=%.6f p99_ms=%.6f max_ms=%.6f mean_overhead=%.6f",
                static_cast<unsigned long long>(s.frames), static_cast<unsigned long long>(s.delivered), s.p50_ms,
                s.p95_ms, s.p99_ms, s.max_ms, s.mean_overhead);
  return buf;
}

}  // namespace lq::scenario
