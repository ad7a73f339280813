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

#include "lq/udp.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <exception>
#include <future>
#include <map>
#include <ostream>
#include <random>
#include <thread>

#include "lq/wire.hpp"

namespace lq::udp {

namespace {

using Clock = std::chrono::steady_clock;

Nanos steady_now() { return std::chrono::duration_cast<Nanos>(Clock::now().time_since_epoch()); }

std::int64_t system_ns() {
  return std::chrono::duration_cast<Nanos>(std::chrono::system_clock::now().time_since_epoch()).count();
}

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

struct Address {
  sockaddr_storage storage{};
  socklen_t len = 0;
  int family() const noexcept { return storage.ss_family; }
};

Address resolve(const Endpoint& ep, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_DGRAM;
  hints.ai_flags = AI_NUMERICSERV | (passive ? AI_PASSIVE : 0);
  addrinfo* res = nullptr;
  const std::string port = std::to_string(ep.port);
  if (int rc = getaddrinfo(ep.host.empty() ? nullptr : ep.host.c_str(), port.c_str(), &hints, &res); rc != 0)
    throw Error(Errc::invalid_argument, "cannot resolve " + ep.host + ": " + gai_strerror(rc));
  Address a;
  std::memcpy(&a.storage, res->ai_addr, res->ai_addrlen);
  a.len = static_cast<socklen_t>(res->ai_addrlen);
  freeaddrinfo(res);
  return a;
}

class Socket {
 public:
  explicit Socket(const Address& bind_addr) {
    fd_ = ::socket(bind_addr.family(), SOCK_DGRAM, 0);
    if (fd_ < 0) throw Error(Errc::io, errno_text("socket"));
    int buf = 8 << 20;
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVBUF, &buf, sizeof buf);
    ::setsockopt(fd_, SOL_SOCKET, SO_SNDBUF, &buf, sizeof buf);
    if (::bind(fd_, reinterpret_cast<const sockaddr*>(&bind_addr.storage), bind_addr.len) != 0) {
      const auto msg = errno_text("bind");
      ::close(fd_);
      throw Error(Errc::bind, msg);
    }
    ::fcntl(fd_, F_SETFL, ::fcntl(fd_, F_GETFL) | O_NONBLOCK);
  }
  ~Socket() { ::close(fd_); }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  std::uint16_t local_port() const {
    sockaddr_storage s{};
    socklen_t len = sizeof s;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&s), &len);
    if (s.ss_family == AF_INET6) return ntohs(reinterpret_cast<const sockaddr_in6*>(&s)->sin6_port);
    return ntohs(reinterpret_cast<const sockaddr_in*>(&s)->sin_port);
  }

  // False when the kernel kept refusing for ~100 ms.
  bool send_to(std::span<const std::uint8_t> bytes, const Address& to) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      if (::sendto(fd_, bytes.data(), bytes.size(), 0, reinterpret_cast<const sockaddr*>(&to.storage), to.len) >= 0)
        return true;
      if (errno != EAGAIN && errno != EWOULDBLOCK && errno != ENOBUFS && errno != EINTR)
        throw Error(Errc::io, errno_text("sendto"));
      wait(POLLOUT, std::chrono::milliseconds(1));
    }
    return false;
  }

  // Size of the datagram read, or -1 when nothing is queued.
  long recv(std::vector<std::uint8_t>& buf, Address* from) {
    Address tmp;
    Address& a = from ? *from : tmp;
    a.len = sizeof a.storage;
    const auto n = ::recvfrom(fd_, buf.data(), buf.size(), 0, reinterpret_cast<sockaddr*>(&a.storage), &a.len);
    if (n >= 0) return static_cast<long>(n);
    if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR || errno == ECONNREFUSED) return -1;
    throw Error(Errc::io, errno_text("recvfrom"));
  }

  void wait(short events, Nanos timeout) {
    if (timeout.count() < 0) timeout = Nanos{0};
    pollfd p{fd_, events, 0};
    timespec ts{static_cast<time_t>(timeout.count() / 1'000'000'000),
                static_cast<long>(timeout.count() % 1'000'000'000)};
    ::ppoll(&p, 1, &ts, nullptr);
  }

 private:
  int fd_ = -1;
};

void put_be64(std::uint8_t* out, std::uint64_t v, std::size_t limit) {
  for (std::size_t i = 0; i < 8 && i < limit; ++i) out[i] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
}

std::uint64_t get_be64(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in[i];
  return v;
}

std::vector<std::uint8_t> make_frame(std::uint64_t seed, std::uint64_t id, std::uint32_t size) {
  std::vector<std::uint8_t> out(size);
  std::uint64_t x = seed ^ (id * 0x9E3779B97F4A7C15ull);
  for (std::size_t i = 0; i < size; i += 8) {
    // splitmix64
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    std::memcpy(out.data() + i, &z, std::min<std::size_t>(8, size - i));
  }
  put_be64(out.data(), id, size);
  return out;
}

}  // namespace

Endpoint parse_endpoint(std::string_view text) {
  Endpoint ep;
  std::string_view host, port;
  if (!text.empty() && text.front() == '[') {
    const auto close = text.find(']');
    if (close == std::string_view::npos || close + 1 >= text.size() || text[close + 1] != ':')
      throw Error(Errc::invalid_argument, "expected [addr]:port, got '" + std::string(text) + "'");
    host = text.substr(1, close - 1);
    port = text.substr(close + 2);
  } else {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos)
      throw Error(Errc::invalid_argument, "expected host:port, got '" + std::string(text) + "'");
    host = text.substr(0, colon);
    port = text.substr(colon + 1);
  }
  unsigned long v = 0;
  if (port.empty() || port.size() > 5 || !std::all_of(port.begin(), port.end(), ::isdigit) ||
      (v = std::stoul(std::string(port))) > 65535)
    throw Error(Errc::invalid_argument, "bad port in '" + std::string(text) + "'");
  ep.host = std::string(host);
  ep.port = static_cast<std::uint16_t>(v);
  return ep;
}

SendReport run_sender(const SendOptions& opt, const std::atomic<bool>* stop) {
  opt.stream.validate();
  if (!(opt.link.induced_loss >= 0.0 && opt.link.induced_loss <= 1.0))
    throw Error(Errc::invalid_argument, "induced_loss must be in [0, 1]");
  const Address peer = resolve(opt.peer, false);
  Endpoint bind_ep = opt.bind;
  if (bind_ep.host == "0.0.0.0" && peer.family() == AF_INET6) bind_ep.host = "::";
  Socket sock(resolve(bind_ep, true));
  SenderEngine tx(opt.sender);
  std::mt19937_64 rng(opt.link.seed);

  SendReport rep;
  const std::uint32_t n_frames = opt.stream.frames();
  rep.frames.resize(n_frames);
  std::vector<EsiSet> esis;
  std::vector<std::uint8_t> buf(65536);
  const Nanos start = steady_now();
  auto frame_time = [&](std::uint32_t f) {
    return start + Nanos(static_cast<std::int64_t>(std::llround(f * 1e9 / opt.stream.fps)));
  };
  std::uint32_t next_frame = 0;

  while (!(stop && stop->load())) {
    Nanos now = steady_now();
    while (next_frame < n_frames && frame_time(next_frame) <= now) {
      auto data = make_frame(opt.link.seed, next_frame, opt.stream.frame_size(next_frame));
      now = steady_now();
      if (data.size() >= kStampBytes) put_be64(data.data() + 8, static_cast<std::uint64_t>(system_ns()), 8);
      const BlockId id = tx.submit(data, now);
      rep.frames[id] = {id, tx.block(id, now)->k, 0, now};
      esis.emplace_back(rep.frames[id].k);
      ++next_frame;
    }

    Address from;
    for (long n; (n = sock.recv(buf, &from)) >= 0;) {
      wire::FeedbackPacket fb;
      if (wire::parse_feedback({buf.data(), static_cast<std::size_t>(n)}, fb) != Errc::ok) continue;
      ++rep.feedback_packets;
      rep.feedback_bytes += static_cast<std::uint64_t>(n);
      tx.on_feedback(fb, steady_now());
    }
    now = steady_now();
    tx.tick(now);

    while (auto pkt = tx.next_packet(now)) {
      const auto& h = pkt->header;
      ++rep.frames[h.block_id].symbols_sent;
      if (!esis[h.block_id].insert(h.esi)) ++rep.duplicate_sends;
      const auto bytes = pkt->serialize();
      ++rep.packets;
      rep.bytes += bytes.size();
      if (opt.link.induced_loss > 0.0 && static_cast<double>(rng() >> 11) * 0x1.0p-53 < opt.link.induced_loss) {
        ++rep.dropped;
        continue;
      }
      if (!sock.send_to(bytes, peer)) ++rep.dropped;
    }

    if (next_frame == n_frames) {
      if (tx.active_blocks() == 0) {
        rep.completed = true;
        break;
      }
      if (now > frame_time(n_frames - 1) + opt.linger) break;
    }
    Nanos wake = next_frame < n_frames ? frame_time(next_frame) : now + std::chrono::milliseconds(1);
    if (tx.active_blocks() > 0) wake = std::min(wake, now + std::chrono::microseconds(200));
    sock.wait(POLLIN, wake - steady_now());
  }
  return rep;
}

RecvReport run_receiver(const RecvOptions& opt, const std::atomic<bool>* stop,
                        const std::function<void(std::uint16_t)>& on_bound) {
  Socket sock(resolve(opt.bind, true));
  if (on_bound) on_bound(sock.local_port());
  ReceiverEngine rx(opt.receiver);
  RecvReport rep;
  std::vector<std::uint8_t> buf(65536);
  Address peer;
  bool have_peer = false;
  std::uint32_t since_feedback = 0;
  Nanos last_feedback = steady_now();
  Nanos last_packet = steady_now();
  Nanos last_gc = steady_now();

  auto send_feedback = [&](Nanos now) {
    since_feedback = 0;
    last_feedback = now;
    if (have_peer) sock.send_to(wire::encode_feedback(rx.make_feedback()), peer);
  };

  while (!(stop && stop->load())) {
    sock.wait(POLLIN, std::chrono::milliseconds(1));
    Address from;
    for (long n; (n = sock.recv(buf, &from)) >= 0;) {
      const Nanos now = steady_now();
      last_packet = now;
      ++rep.packets;
      rep.bytes += static_cast<std::uint64_t>(n);
      const std::span<const std::uint8_t> bytes(buf.data(), static_cast<std::size_t>(n));
      const auto rejected = rx.metrics().malformed + rx.metrics().protocol_errors;
      auto got = rx.on_datagram(bytes, now);
      // Feedback goes to whoever last sent a well-formed data packet.
      if (rx.metrics().malformed + rx.metrics().protocol_errors == rejected) {
        peer = from;
        have_peer = true;
      } else {
        continue;
      }
      if (got) {
        RecvFrame f{got->block_id, got->k, got->block_bytes, got->symbols_received, now, -1.0};
        if (got->data.size() >= kStampBytes)
          f.stamp_latency_ms =
              static_cast<double>(system_ns() - static_cast<std::int64_t>(get_be64(got->data.data() + 8))) / 1e6;
        rep.frames.push_back(f);
      }
      if (++since_feedback >= opt.link.feedback_every_packets) send_feedback(now);
    }
    const Nanos now = steady_now();
    if (since_feedback > 0 && now - last_feedback >= opt.link.feedback_interval) send_feedback(now);
    rx.tick(now);
    if (now - last_gc >= std::chrono::milliseconds(100)) {
      rx.gc_delivered(now, std::chrono::seconds(2));
      last_gc = now;
    }
    if (opt.expected_frames > 0 && rep.frames.size() >= opt.expected_frames && since_feedback == 0) break;
    if (opt.idle_timeout.count() > 0 && rep.packets > 0 && now - last_packet > opt.idle_timeout) break;
  }
  rep.metrics = rx.metrics();
  return rep;
}

emu::EmuResult run_udp(const LoopbackOptions& opt) {
  std::atomic<bool> stop{false};
  std::promise<std::uint16_t> bound;
  auto port = bound.get_future();
  RecvReport rrep;
  std::exception_ptr rx_error;
  std::thread rx_thread([&] {
    try {
      RecvOptions ro;
      ro.bind = {opt.host, 0};
      ro.receiver = opt.receiver;
      ro.link = opt.link;
      ro.idle_timeout = Nanos{0};
      rrep = run_receiver(ro, &stop, [&](std::uint16_t p) { bound.set_value(p); });
    } catch (...) {
      rx_error = std::current_exception();
      try {
        bound.set_exception(std::current_exception());
      } catch (const std::future_error&) {
      }
    }
  });

  SendReport srep;
  try {
    SendOptions so;
    so.bind = {opt.host, 0};
    so.peer = {opt.host, port.get()};
    so.stream = opt.stream;
    so.sender = opt.sender;
    so.link = opt.link;
    srep = run_sender(so);
  } catch (...) {
    stop = true;
    rx_thread.join();
    throw;
  }
  stop = true;
  rx_thread.join();
  if (rx_error) std::rethrow_exception(rx_error);

  emu::EmuResult r;
  r.frames.resize(srep.frames.size());
  for (std::size_t i = 0; i < srep.frames.size(); ++i) {
    const auto& s = srep.frames[i];
    auto& row = r.frames[i];
    row.frame_id = s.frame_id;
    row.k_symbols = s.k;
    row.symbols_sent = s.symbols_sent;
    row.t_avail_ms = static_cast<double>((s.submitted_at - srep.frames[0].submitted_at).count()) / 1e6;
    row.loss_rate_scheduled = opt.link.induced_loss;
  }
  for (const auto& f : rrep.frames) {
    if (f.frame_id >= r.frames.size()) continue;
    auto& row = r.frames[f.frame_id];
    row.symbols_received = f.symbols_received;
    row.t_deliver_ms = static_cast<double>((f.delivered_at - srep.frames[0].submitted_at).count()) / 1e6;
    row.latency_ms = row.t_deliver_ms - row.t_avail_ms;
  }
  r.forward_packets = srep.packets;
  r.forward_bytes = srep.bytes;
  r.forward_losses = srep.dropped;
  r.feedback_packets = srep.feedback_packets;
  r.feedback_bytes = srep.feedback_bytes;
  r.duplicate_sends = srep.duplicate_sends;
  r.topup_symbols = 0;
  return r;
}

std::vector<BenchSample> loopback_bench(const BenchOptions& opt,
                                        const std::function<void(std::uint32_t, const emu::EmuResult&)>& progress) {
  if (opt.frames == 0) throw Error(Errc::invalid_argument, "frames must be >= 1");
  std::vector<BenchSample> out;
  for (std::uint32_t size : opt.frame_sizes) {
    LoopbackOptions lo;
    lo.stream.fps = opt.fps;
    lo.stream.frame_sizes = {size};
    lo.stream.duration_s = opt.frames / opt.fps;
    lo.sender.rtt = std::chrono::milliseconds(1);
    lo.sender.in_flight_timeout = std::chrono::milliseconds(3);
    lo.link.induced_loss = opt.induced_loss;
    lo.link.seed = opt.seed;
    lo.link.feedback_interval = std::chrono::milliseconds(1);
    const auto r = run_udp(lo);
    for (const auto& f : r.frames)
      out.push_back({size, f.frame_id, f.delivered() ? f.latency_ms * 1000.0 : -1.0});
    if (progress) progress(size, r);
  }
  return out;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchSample>& samples) {
  out << "frame_bytes,frame_id,latency_us\n";
  char buf[64];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.3f", s.latency_us);
    out << s.frame_bytes << ',' << s.frame_id << ',' << (s.latency_us < 0 ? "-1" : buf) << '\n';
  }
}

}  // namespace lq::udp
