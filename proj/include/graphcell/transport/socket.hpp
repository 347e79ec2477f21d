// Copyright 2026 The Graphcell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Socket backend: one OS process per rank, a full mesh of loopback TCP
// connections, and length-prefixed frames (see docs/wire-format.md).

#pragma once

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstring>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "graphcell/transport/types.hpp"

namespace graphcell::transport::socket {

inline constexpr std::size_t header_size = 16;
inline constexpr Rank control_dest = 0xFFFFFFFFu;

enum Control : Tag { hello = 1, bye = 2, abort_group = 3 };

struct Header {
  Rank source = 0;
  Rank dest = 0;
  Tag tag = 0;
  std::uint32_t length = 0;
};

inline void put_u32(std::byte* out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) {
    out[i] = static_cast<std::byte>(v & 0xffu);
    v >>= 8;
  }
}

inline std::uint32_t get_u32(const std::byte* in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | std::to_integer<std::uint32_t>(in[i]);
  return v;
}

inline std::array<std::byte, header_size> encode_header(const Header& h) {
  std::array<std::byte, header_size> out;
  put_u32(out.data(), h.source);
  put_u32(out.data() + 4, h.dest);
  put_u32(out.data() + 8, h.tag);
  put_u32(out.data() + 12, h.length);
  return out;
}

inline Header decode_header(const std::byte* in) {
  return {get_u32(in), get_u32(in + 4), get_u32(in + 8), get_u32(in + 12)};
}

inline std::string errno_text(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

/// Writes everything or returns false (peer gone).
inline bool write_all(int fd, const std::byte* data, std::size_t n) {
  while (n > 0) {
    ssize_t w = ::send(fd, data, n, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
  return true;
}

inline bool write_frame(int fd, const Header& h, const std::byte* payload) {
  auto head = encode_header(h);
  if (!write_all(fd, head.data(), head.size())) return false;
  return h.length == 0 || write_all(fd, payload, h.length);
}

using Clock = std::chrono::steady_clock;

inline int remaining_ms(Clock::time_point deadline) {
  auto left = std::chrono::duration_cast<Millis>(deadline - Clock::now()).count();
  return left < 0 ? 0 : static_cast<int>(left);
}

/// Blocking read of exactly n bytes, bounded by `deadline`.
inline bool read_exact(int fd, std::byte* out, std::size_t n, Clock::time_point deadline) {
  while (n > 0) {
    pollfd p{fd, POLLIN, 0};
    int rc = ::poll(&p, 1, remaining_ms(deadline));
    if (rc < 0 && errno == EINTR) continue;
    if (rc <= 0) return false;
    ssize_t r = ::recv(fd, out, n, 0);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) return false;
    out += r;
    n -= static_cast<std::size_t>(r);
  }
  return true;
}

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  std::string str() const { return host + ":" + std::to_string(port); }
};

inline std::vector<Endpoint> parse_endpoints(const std::string& text) {
  std::vector<Endpoint> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(start, end - start);
    auto colon = item.rfind(':');
    if (colon == std::string::npos) fail(Errc::spawn_failure, "bad endpoint '" + item + "'");
    out.push_back({item.substr(0, colon),
                   static_cast<std::uint16_t>(std::stoul(item.substr(colon + 1)))});
    start = end + 1;
  }
  return out;
}

inline std::string format_endpoints(const std::vector<Endpoint>& eps) {
  std::string s;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (i) s += ',';
    s += eps[i].str();
  }
  return s;
}

inline sockaddr_in to_addr(const Endpoint& ep) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  if (::inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) != 1) {
    fail(Errc::spawn_failure, "bad host '" + ep.host + "'");
  }
  return addr;
}

/// Bound, listening socket on `ep` (port 0 picks a free port). Returns fd
/// and updates ep.port.
inline int listen_on(Endpoint& ep) {
  int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) fail(Errc::spawn_failure, errno_text("socket"));
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr = to_addr(ep);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd, 64) < 0) {
    std::string msg = errno_text(("bind " + ep.str()).c_str());
    ::close(fd);
    fail(Errc::spawn_failure, msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ep.port = ntohs(addr.sin_port);
  return fd;
}

inline void tune(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

struct Mesh {
  std::vector<int> fds;                // by rank; -1 for self
  std::vector<std::uint64_t> digests;  // peer digests from the hello exchange
};

inline bool send_hello(int fd, Rank me, std::uint64_t digest) {
  std::array<std::byte, 8> d;
  put_u32(d.data(), static_cast<std::uint32_t>(digest >> 32));
  put_u32(d.data() + 4, static_cast<std::uint32_t>(digest));
  return write_frame(fd, {me, control_dest, hello, 8}, d.data());
}

inline std::optional<std::pair<Rank, std::uint64_t>> read_hello(int fd, Clock::time_point deadline) {
  std::array<std::byte, header_size + 8> raw;
  if (!read_exact(fd, raw.data(), raw.size(), deadline)) return std::nullopt;
  Header h = decode_header(raw.data());
  if (h.dest != control_dest || h.tag != hello || h.length != 8) return std::nullopt;
  std::uint64_t d = (std::uint64_t{get_u32(raw.data() + 16)} << 32) | get_u32(raw.data() + 20);
  return std::pair{h.source, d};
}

/// Connects rank `me` to every peer: lower ranks are dialled, higher ranks
/// are accepted on `listen_fd` (which is closed afterwards).
inline Mesh establish(Rank me, const std::vector<Endpoint>& eps, int listen_fd,
                      std::uint64_t digest, Millis timeout) {
  const auto n = static_cast<Rank>(eps.size());
  const auto deadline = Clock::now() + timeout;
  Mesh mesh{std::vector<int>(n, -1), std::vector<std::uint64_t>(n, digest)};
  auto cleanup = [&] {
    for (int fd : mesh.fds) {
      if (fd >= 0) ::close(fd);
    }
    if (listen_fd >= 0) ::close(listen_fd);
  };

  for (Rank q = 0; q < me; ++q) {
    sockaddr_in addr = to_addr(eps[q]);
    int fd = -1;
    for (;;) {
      fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
      if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) break;
      ::close(fd);
      fd = -1;
      if (Clock::now() >= deadline) break;
      std::this_thread::sleep_for(Millis(10));
    }
    if (fd < 0) {
      cleanup();
      fail(Errc::spawn_failure, "rank " + std::to_string(me) + " could not reach rank " +
                                    std::to_string(q) + " at " + eps[q].str());
    }
    tune(fd);
    mesh.fds[q] = fd;
    std::optional<std::pair<Rank, std::uint64_t>> reply;
    if (send_hello(fd, me, digest)) reply = read_hello(fd, deadline);
    if (!reply || reply->first != q) {
      cleanup();
      fail(Errc::spawn_failure, "handshake with rank " + std::to_string(q) + " failed");
    }
    mesh.digests[q] = reply->second;
  }

  for (Rank accepted = 0; accepted + me + 1 < n; ++accepted) {
    pollfd p{listen_fd, POLLIN, 0};
    int rc = 0;
    do {
      rc = ::poll(&p, 1, remaining_ms(deadline));
    } while (rc < 0 && errno == EINTR);
    int fd = rc > 0 ? ::accept4(listen_fd, nullptr, nullptr, SOCK_CLOEXEC) : -1;
    if (fd < 0) {
      cleanup();
      fail(Errc::spawn_failure, "rank " + std::to_string(me) + " timed out waiting for peers");
    }
    tune(fd);
    auto hello_msg = read_hello(fd, deadline);
    if (!hello_msg || hello_msg->first <= me || hello_msg->first >= n ||
        mesh.fds[hello_msg->first] >= 0 || !send_hello(fd, me, digest)) {
      ::close(fd);
      cleanup();
      fail(Errc::spawn_failure, "bad handshake on rank " + std::to_string(me));
    }
    mesh.fds[hello_msg->first] = fd;
    mesh.digests[hello_msg->first] = hello_msg->second;
  }
  if (listen_fd >= 0) ::close(listen_fd);
  return mesh;
}

class SocketTransport final : public Transport {
 public:
  SocketTransport(Rank me, Mesh mesh, std::optional<Millis> timeout, Millis teardown_timeout)
      : me_(me),
        n_(static_cast<Rank>(mesh.fds.size())),
        fds_(std::move(mesh.fds)),
        peer_digests_(std::move(mesh.digests)),
        timeout_(timeout),
        teardown_timeout_(teardown_timeout),
        write_mu_(n_),
        bye_(n_, false),
        closed_(n_, false) {
    if (::pipe2(wake_, O_CLOEXEC) < 0) fail(Errc::spawn_failure, errno_text("pipe"));
    reader_ = std::thread([this] { read_loop(); });
  }

  ~SocketTransport() override { close(true); }

  Rank nprocs() const noexcept override { return n_; }
  Rank myid() const noexcept override { return me_; }

  SendHandle post(Rank dest, Tag tag, std::vector<std::byte> payload) override {
    check_dest(dest, me_, n_);
    if (payload.size() > 0xFFFFFFFFu) fail(Errc::malformed_container, "frame exceeds 4 GiB");
    bool ok = false;
    {
      std::lock_guard lk(write_mu_[dest]);
      ok = fds_[dest] >= 0 &&
           write_frame(fds_[dest], {me_, dest, tag, static_cast<std::uint32_t>(payload.size())},
                       payload.data());
    }
    if (!ok) fail(Errc::group_shutdown, "connection to rank " + std::to_string(dest) + " lost");
    ++stats.messages_sent;
    stats.bytes_sent += payload.size();
    auto h = std::make_shared<SendState>();
    h->done.store(true);
    return h;
  }

  void wait(const SendHandle&) override {}

  Envelope receive(Rank source, Tag tag) override {
    check_source(source, me_, n_);
    std::unique_lock lk(mu_);
    const auto deadline = timeout_ ? std::optional(Clock::now() + *timeout_) : std::nullopt;
    for (;;) {
      for (auto it = inbox_.begin(); it != inbox_.end(); ++it) {
        if (matches(*it, source, tag)) {
          Envelope e = std::move(*it);
          inbox_.erase(it);
          ++stats.messages_received;
          stats.bytes_received += e.payload.size();
          return e;
        }
      }
      if (aborted_) fail(Errc::group_shutdown, abort_reason_);
      if (!sender_alive(source)) {
        fail(Errc::group_shutdown, "no live peer can send a matching message");
      }
      if (deadline) {
        if (cv_.wait_until(lk, *deadline) == std::cv_status::timeout &&
            Clock::now() >= *deadline) {
          fail(Errc::group_shutdown, "receive timed out");
        }
      } else {
        cv_.wait(lk);
      }
    }
  }

  void check_digest(std::uint64_t digest) override {
    for (Rank r = 0; r < n_; ++r) {
      if (r != me_ && peer_digests_[r] != digest) {
        fail(Errc::digest_mismatch,
             "rank " + std::to_string(r) + " registry digest differs from rank " +
                 std::to_string(me_));
      }
    }
  }

  void close(bool ok) noexcept override {
    if (closed_down_) return;
    closed_down_ = true;
    const Header h{me_, control_dest, ok ? Tag{bye} : Tag{abort_group}, 0};
    for (Rank r = 0; r < n_; ++r) {
      if (fds_[r] < 0) continue;
      std::lock_guard lk(write_mu_[r]);
      write_frame(fds_[r], h, nullptr);
    }
    if (ok) {
      // Linger until every peer has said goodbye, so nothing in flight is cut off.
      std::unique_lock lk(mu_);
      cv_.wait_for(lk, teardown_timeout_, [&] {
        if (aborted_) return true;
        for (Rank r = 0; r < n_; ++r) {
          if (r != me_ && !bye_[r] && !closed_[r]) return false;
        }
        return true;
      });
    }
    char c = 0;
    [[maybe_unused]] auto w = ::write(wake_[1], &c, 1);
    if (reader_.joinable()) reader_.join();
    for (int& fd : fds_) {
      if (fd >= 0) ::close(fd);
      fd = -1;
    }
    ::close(wake_[0]);
    ::close(wake_[1]);
  }

 private:
  bool sender_alive(Rank source) const {
    auto alive = [&](Rank r) { return !bye_[r] && !closed_[r]; };
    if (source != ANY_SOURCE) return alive(source);
    for (Rank r = 0; r < n_; ++r) {
      if (r != me_ && alive(r)) return true;
    }
    return false;
  }

  void mark_abort(const std::string& why) {
    if (!aborted_) {
      aborted_ = true;
      abort_reason_ = why;
    }
  }

  void read_loop() {
    std::vector<std::vector<std::byte>> pending(n_);
    std::vector<std::byte> chunk(1 << 16);
    for (;;) {
      std::vector<pollfd> pfds{{wake_[0], POLLIN, 0}};
      std::vector<Rank> who{ANY_SOURCE};
      for (Rank r = 0; r < n_; ++r) {
        if (fds_[r] >= 0 && !closed_[r]) {
          pfds.push_back({fds_[r], POLLIN, 0});
          who.push_back(r);
        }
      }
      int rc = ::poll(pfds.data(), pfds.size(), -1);
      if (rc < 0) {
        if (errno == EINTR) continue;
        return;
      }
      if (pfds[0].revents != 0) return;
      for (std::size_t i = 1; i < pfds.size(); ++i) {
        if (pfds[i].revents == 0) continue;
        const Rank r = who[i];
        ssize_t got = ::recv(pfds[i].fd, chunk.data(), chunk.size(), 0);
        if (got < 0 && errno == EINTR) continue;
        std::lock_guard lk(mu_);
        if (got <= 0) {
          closed_[r] = true;
          if (!bye_[r]) mark_abort("rank " + std::to_string(r) + " disconnected");
          cv_.notify_all();
          continue;
        }
        auto& buf = pending[r];
        buf.insert(buf.end(), chunk.begin(), chunk.begin() + got);
        std::size_t off = 0;
        while (buf.size() - off >= header_size) {
          Header h = decode_header(buf.data() + off);
          if (buf.size() - off - header_size < h.length) break;
          const std::byte* body = buf.data() + off + header_size;
          if (h.dest == control_dest) {
            if (h.tag == bye) bye_[r] = true;
            if (h.tag == abort_group) mark_abort("rank " + std::to_string(r) + " aborted");
          } else {
            inbox_.push_back({h.source, h.dest, h.tag, std::vector<std::byte>(body, body + h.length)});
          }
          off += header_size + h.length;
        }
        buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(off));
        cv_.notify_all();
      }
    }
  }

  const Rank me_;
  const Rank n_;
  std::vector<int> fds_;
  std::vector<std::uint64_t> peer_digests_;
  const std::optional<Millis> timeout_;
  const Millis teardown_timeout_;
  std::vector<std::mutex> write_mu_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Envelope> inbox_;
  std::vector<bool> bye_;
  std::vector<bool> closed_;
  bool aborted_ = false;
  std::string abort_reason_;

  int wake_[2] = {-1, -1};
  std::thread reader_;
  bool closed_down_ = false;
};

}  // namespace graphcell::transport::socket
