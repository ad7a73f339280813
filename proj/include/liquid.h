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

/* Block delivery over UDP with fountain-coded symbols and receiver feedback.
 *
 * All handles are opaque. Every function returns an lq_status; on failure a
 * message for the calling thread is available from lq_last_error() until the
 * next failing call on that thread. Timestamps are caller-supplied
 * nanoseconds on any monotonic clock. A handle must not be used from two
 * threads at once.
 */
#ifndef LIQUID_H
#define LIQUID_H

#include <stddef.h>
#include <stdint.h>

#if defined(LQ_BUILDING_LIBRARY)
#define LQ_API __attribute__((visibility("default")))
#else
#define LQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lq_status {
  LQ_OK = 0,
  LQ_INVALID_ARGUMENT = 1,
  LQ_MALFORMED = 2,        /* datagram failed to parse */
  LQ_PROTOCOL_ERROR = 3,   /* well-formed but inconsistent with earlier packets */
  LQ_NOT_READY = 4,        /* nothing to return yet */
  LQ_BUFFER_TOO_SMALL = 5, /* the required size is reported through the length out-parameter */
  LQ_SCENARIO_INVALID = 6,
  LQ_IO_ERROR = 7,
  LQ_BIND_FAILED = 8,
  LQ_INTERNAL = 9
} lq_status;

typedef enum lq_codec { LQ_CODEC_RLC = 0, LQ_CODEC_IDEAL = 1 } lq_codec;

LQ_API const char* lq_status_str(lq_status status);
LQ_API const char* lq_last_error(void);
LQ_API const char* lq_version(void);

/* ---- sender ---------------------------------------------------------- */

typedef struct lq_sender lq_sender;

typedef struct lq_sender_config {
  lq_codec codec;
  uint16_t symbol_size;          /* payload bytes per packet */
  double z_var;                  /* loss-rate headroom in standard deviations */
  double z_bin;                  /* binomial tail multiplier */
  double p_cap;                  /* planning loss never exceeds this */
  int32_t c_extra;               /* surplus symbols; -1 picks max(2, ceil(0.005 K)) */
  double alpha;                  /* EWMA weight */
  uint64_t min_sample_packets;   /* feedback span per loss sample */
  int subtract_sampling_noise;   /* boolean */
  int round_robin;               /* boolean; oldest-first otherwise */
  uint32_t max_packets_per_interval; /* 0 disables pacing */
  int64_t pacing_interval_ns;
  int64_t rtt_ns;
  int64_t in_flight_timeout_ns;  /* 0 disables */
  int64_t block_timeout_ns;      /* 0 keeps blocks until confirmed */
} lq_sender_config;

typedef struct lq_sender_stats {
  uint64_t packets_sent;
  uint64_t feedback_received;
  uint64_t stale_feedback;
  uint64_t topup_symbols;
  uint64_t blocks_submitted;
  uint64_t blocks_completed;
  uint64_t blocks_abandoned;
  uint64_t active_blocks;
  double loss_estimate;
  double loss_variance;
} lq_sender_stats;

LQ_API void lq_sender_config_default(lq_sender_config* config);
LQ_API lq_status lq_sender_new(const lq_sender_config* config, lq_sender** out);
LQ_API void lq_sender_free(lq_sender* sender);
LQ_API lq_status lq_sender_submit(lq_sender* sender, const uint8_t* data, size_t len, int64_t now_ns,
                                  uint64_t* block_id);
LQ_API lq_status lq_sender_on_feedback(lq_sender* sender, const uint8_t* datagram, size_t len, int64_t now_ns);
LQ_API lq_status lq_sender_tick(lq_sender* sender, int64_t now_ns);
/* Writes the next datagram. LQ_NOT_READY when idle or paced out. */
LQ_API lq_status lq_sender_next_datagram(lq_sender* sender, int64_t now_ns, uint8_t* buf, size_t cap,
                                         size_t* len);
LQ_API size_t lq_sender_max_datagram(const lq_sender* sender);
LQ_API lq_status lq_sender_stats_get(const lq_sender* sender, lq_sender_stats* out);

/* ---- receiver -------------------------------------------------------- */

typedef struct lq_receiver lq_receiver;

typedef struct lq_receiver_config {
  lq_codec codec;
  uint32_t max_active_blocks;
  int64_t active_timeout_ns; /* 0 disables */
} lq_receiver_config;

typedef struct lq_receiver_stats {
  uint64_t packets;
  uint64_t duplicates;
  uint64_t late_symbols;
  uint64_t malformed;
  uint64_t protocol_errors;
  uint64_t overflow;
  uint64_t expired;
  uint64_t delivered;
  uint64_t active_blocks;
} lq_receiver_stats;

LQ_API void lq_receiver_config_default(lq_receiver_config* config);
LQ_API lq_status lq_receiver_new(const lq_receiver_config* config, lq_receiver** out);
LQ_API void lq_receiver_free(lq_receiver* receiver);
/* Recovered blocks are queued for lq_receiver_poll_block. *delivered (may be
 * NULL) is set to 1 when this datagram completed a block. Malformed input is
 * reported through the status and counted; the receiver stays usable. */
LQ_API lq_status lq_receiver_on_datagram(lq_receiver* receiver, const uint8_t* datagram, size_t len,
                                         int64_t now_ns, int* delivered);
/* Oldest recovered block. On LQ_BUFFER_TOO_SMALL *len holds the size needed
 * and the block stays queued. */
LQ_API lq_status lq_receiver_poll_block(lq_receiver* receiver, uint64_t* block_id, uint8_t* buf, size_t cap,
                                        size_t* len);
LQ_API lq_status lq_receiver_feedback(const lq_receiver* receiver, uint8_t* buf, size_t cap, size_t* len);
LQ_API lq_status lq_receiver_tick(lq_receiver* receiver, int64_t now_ns);
LQ_API lq_status lq_receiver_stats_get(const lq_receiver* receiver, lq_receiver_stats* out);

/* ---- experiments ----------------------------------------------------- */

typedef struct lq_summary {
  uint64_t frames;
  uint64_t delivered;
  double p50_ms;
  double p95_ms;
  double p99_ms;
  double max_ms;
  double mean_overhead; /* mean over frames of symbols sent / K */
  uint64_t duplicate_sends;
} lq_summary;

typedef enum lq_mode { LQ_MODE_ANY = 0, LQ_MODE_SIMULATE = 1, LQ_MODE_EMURUN = 2 } lq_mode;

/* Validates without running. */
LQ_API lq_status lq_scenario_check(const char* path, lq_mode* mode);
/* Runs a scenario file. LQ_SCENARIO_INVALID when it fails validation or its
 * mode differs from `expect`. out_dir NULL uses the file's output_dir;
 * seed < 0 keeps the file's seed. oracle may be NULL and is only filled in
 * simulate mode. */
LQ_API lq_status lq_scenario_run(const char* path, lq_mode expect, const char* out_dir, int64_t seed,
                                 lq_summary* liquid, lq_summary* oracle);
/* Newline-separated "name<TAB>mode<TAB>path<TAB>description" for each
 * shipped scenario. On LQ_BUFFER_TOO_SMALL *len holds the size needed. */
LQ_API lq_status lq_scenario_list(char* buf, size_t cap, size_t* len);

typedef struct lq_link_options {
  uint32_t feedback_every_packets;
  int64_t feedback_interval_ns;
  double induced_loss; /* forward datagrams dropped before sending */
  uint64_t seed;
} lq_link_options;

LQ_API void lq_link_options_default(lq_link_options* options);

typedef struct lq_send_options {
  const char* bind;            /* "host:port" */
  const char* peer;            /* "host:port" */
  double fps;
  const uint32_t* frame_sizes; /* repeating pattern */
  size_t frame_size_count;
  double duration_s;
  lq_sender_config sender;
  lq_link_options link;
  int64_t linger_ns;
  const char* csv_path;        /* frame_id,k,symbols_sent; may be NULL */
} lq_send_options;

typedef struct lq_send_result {
  uint64_t frames;
  uint64_t packets;
  uint64_t dropped;
  uint64_t feedback_packets;
  int completed; /* every block confirmed before the linger ran out */
} lq_send_result;

LQ_API lq_status lq_udp_send(const lq_send_options* options, lq_send_result* result);

typedef struct lq_recv_options {
  const char* bind;
  uint32_t expected_frames; /* 0 waits for idle_timeout */
  int64_t idle_timeout_ns;
  lq_receiver_config receiver;
  lq_link_options link;
  const char* csv_path; /* frame_id,block_bytes,k,symbols_received,latency_ms; may be NULL */
} lq_recv_options;

/* Latencies come from the stamp in each frame, so they are meaningful only
 * when sender and receiver clocks agree. mean_overhead here is symbols
 * received / K, and frames is max(expected_frames, delivered). */
LQ_API lq_status lq_udp_recv(const lq_recv_options* options, lq_summary* summary);

typedef struct lq_codec_bench_options {
  const uint32_t* ks;
  size_t k_count;
  uint16_t symbol_size;
  double loss;
  uint32_t repeats;
  uint64_t seed;
  const char* csv_path;
} lq_codec_bench_options;

LQ_API lq_status lq_bench_codec(const lq_codec_bench_options* options);

typedef struct lq_loopback_bench_options {
  const uint32_t* frame_sizes;
  size_t frame_size_count;
  double fps;
  uint32_t frames;
  double induced_loss;
  uint64_t seed;
  const char* csv_path; /* frame_bytes,frame_id,latency_us; may be NULL */
} lq_loopback_bench_options;

/* One summary per frame size, in order; `summaries` holds frame_size_count.
 * Latency is submit to recovery. mean_overhead is left at 0. */
LQ_API lq_status lq_bench_loopback(const lq_loopback_bench_options* options, lq_summary* summaries);

#ifdef __cplusplus
}
#endif

#endif /* LIQUID_H */
