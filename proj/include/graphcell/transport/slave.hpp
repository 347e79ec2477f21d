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

// Master-slave dispatch. Rank 0 owns a SlavePool; ranks >= 1 run
// slave_loop. A request is [u32 handler][u32 seq][args...]; a reply is
// [u32 seq][u8 status][reply bytes], or an error message when status != 0.
// Replies are matched to requests by (slave rank, per-slave sequence).

#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "graphcell/transport/handlers.hpp"
#include "graphcell/transport/msgbuf.hpp"

namespace graphcell::transport {

inline constexpr Tag SLAVE_REQUEST_TAG = 0xFFFFFF00u;
inline constexpr Tag SLAVE_REPLY_TAG = 0xFFFFFF01u;
inline constexpr Rank AUTO_SLAVE = ANY_SOURCE;

struct Reply {
  Rank slave = 0;
  std::uint32_t seq = 0;
  bool ok = true;
  std::string error;
  codec::Buffer payload;
};

/// Serves requests from rank 0 until told to shut down.
inline void slave_loop(Group& g, const HandlerRegistry& handlers = HandlerRegistry::global()) {
  MsgBuf m(g);
  for (;;) {
    m.get(0, SLAVE_REQUEST_TAG);
    std::uint32_t id = 0, seq = 0;
    m >> id >> seq;
    if (id == SHUTDOWN_HANDLER) return;
    codec::Buffer reply;
    try {
      // The handler consumes the rest of the request and leaves its reply.
      const Handler& h = handlers.at(id);
      codec::Buffer args(std::vector<std::byte>(m.data().begin() + static_cast<std::ptrdiff_t>(m.cursor()),
                                                m.data().end()));
      m.assign(args.release());
      h(m);
      reply << seq << std::uint8_t{0};
      reply.append(m.bytes());
    } catch (const Error& e) {
      if (e.code() == Errc::group_shutdown) throw;
      reply.reset() << seq << std::uint8_t{1} << std::string(e.what());
    } catch (const std::exception& e) {
      reply.reset() << seq << std::uint8_t{1} << std::string(e.what());
    }
    m.assign(reply.release());
    m.send_to(0, SLAVE_REPLY_TAG);
  }
}

class SlavePool {
 public:
  explicit SlavePool(Group& g) : group_(&g), outstanding_(g.nprocs(), 0), next_seq_(g.nprocs(), 0),
                                 expect_seq_(g.nprocs(), 0) {
    if (!g.is_master()) fail(Errc::invalid_rank, "SlavePool lives on rank 0");
  }
  SlavePool(const SlavePool&) = delete;
  SlavePool& operator=(const SlavePool&) = delete;

  /// Drains outstanding replies, then shuts every slave down.
  ~SlavePool() {
    try {
      shutdown();
    } catch (...) {
    }
  }

  Rank slaves() const noexcept { return group_->nprocs() - 1; }

  /// Dispatches `args` to handler `h` on `slave`, or on an idle slave when
  /// slave == AUTO_SLAVE. With every slave busy, auto mode takes one reply
  /// off the wire (kept for get_returnv) and reuses that slave.
  Rank exec(Rank slave, HandlerId h, const codec::Buffer& args) {
    if (slaves() == 0) fail(Errc::invalid_rank, "group has no slaves");
    if (slave == AUTO_SLAVE) {
      slave = pick_idle();
    } else if (slave == 0 || slave >= group_->nprocs()) {
      fail(Errc::invalid_rank, "slave rank " + std::to_string(slave));
    }
    MsgBuf m(*group_);
    m << h << next_seq_[slave]++;
    m.append(args.bytes());
    m.send_to(slave, SLAVE_REQUEST_TAG);
    ++outstanding_[slave];
    ++dispatched_;
    return slave;
  }

  Rank exec(HandlerId h, const codec::Buffer& args) { return exec(AUTO_SLAVE, h, args); }

  /// One completed reply; its slave becomes idle unless more jobs are queued
  /// on it.
  Reply get_returnv() {
    if (!stash_.empty()) {
      Reply r = std::move(stash_.front());
      stash_.pop_front();
      ++collected_;
      return r;
    }
    if (in_flight() == 0) fail(Errc::no_jobs_outstanding, "no job is outstanding");
    ++collected_;
    return receive();
  }

  /// True when no slave is busy: nothing in flight and no uncollected reply.
  bool all_idle() const noexcept { return in_flight() == 0 && stash_.empty(); }

  bool busy(Rank slave) const {
    for (const auto& r : stash_) {
      if (r.slave == slave) return true;
    }
    return outstanding_.at(slave) > 0;
  }

  std::uint64_t dispatched() const noexcept { return dispatched_; }
  std::uint64_t collected() const noexcept { return collected_; }

  void shutdown() {
    if (shut_) return;
    shut_ = true;
    while (in_flight() > 0) receive();
    stash_.clear();
    for (Rank s = 1; s < group_->nprocs(); ++s) {
      MsgBuf m(*group_);
      m << SHUTDOWN_HANDLER << next_seq_[s]++;
      m.send_to(s, SLAVE_REQUEST_TAG);
    }
  }

 private:
  std::size_t in_flight() const noexcept {
    std::size_t n = 0;
    for (auto c : outstanding_) n += c;
    return n;
  }

  Rank pick_idle() {
    for (Rank s = 1; s < group_->nprocs(); ++s) {
      if (!busy(s)) return s;
    }
    Reply r = receive();
    Rank s = r.slave;
    stash_.push_back(std::move(r));
    return s;
  }

  Reply receive() {
    MsgBuf m(*group_);
    m.get(ANY_SOURCE, SLAVE_REPLY_TAG);
    Reply r;
    r.slave = m.last_source();
    std::uint8_t status = 0;
    m >> r.seq >> status;
    if (outstanding_.at(r.slave) == 0 || r.seq != expect_seq_[r.slave]) {
      fail(Errc::protocol_violation, "unexpected reply seq " + std::to_string(r.seq) +
                                         " from rank " + std::to_string(r.slave));
    }
    ++expect_seq_[r.slave];
    --outstanding_[r.slave];
    r.ok = status == 0;
    if (r.ok) {
      r.payload.append(m.bytes().subspan(m.cursor()));
    } else {
      m >> r.error;
    }
    return r;
  }

  Group* group_;
  std::vector<std::uint32_t> outstanding_;
  std::vector<std::uint32_t> next_seq_;
  std::vector<std::uint32_t> expect_seq_;
  std::deque<Reply> stash_;
  std::uint64_t dispatched_ = 0;
  std::uint64_t collected_ = 0;
  bool shut_ = false;
};

/// Rank 0 runs master(pool); every other rank serves until shutdown.
template <class Master>
void run_master_slave(Group& g, Master&& master) {
  if (g.is_master()) {
    SlavePool pool(g);
    master(pool);
    pool.shutdown();
  } else {
    slave_loop(g);
  }
}

}  // namespace graphcell::transport
