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

// In-process backend: every rank is a thread of the calling process.

#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "graphcell/transport/types.hpp"

namespace graphcell::transport {

/// Shared delivery state for all ranks of one in-process group.
///
/// Each (source, dest) channel is a FIFO. A channel admits a message while
/// its admitted bytes stay within `capacity` (an empty channel always
/// admits); a send completes when its message is admitted. Unadmitted
/// messages are still visible to the receiver, so selective receives never
/// stall behind flow control.
class Fabric {
 public:
  Fabric(Rank nprocs, std::size_t capacity, std::optional<Millis> timeout)
      : nprocs_(nprocs),
        capacity_(capacity),
        timeout_(timeout),
        channels_(std::size_t{nprocs} * nprocs),
        finished_(nprocs, false),
        digests_(nprocs, 0) {}

  Rank nprocs() const noexcept { return nprocs_; }

  SendHandle post(Rank src, Rank dest, Tag tag, std::vector<std::byte> payload) {
    auto h = std::make_shared<SendState>();
    std::lock_guard lk(mu_);
    if (aborted_) fail(Errc::group_shutdown, "group aborted");
    Channel& c = channel(src, dest);
    Slot slot{Envelope{src, dest, tag, std::move(payload)}, h, next_seq_++, false};
    if (c.slots.empty() || (c.admitted_through == c.slots.size() &&
                            c.bytes + slot.env.payload.size() <= capacity_)) {
      admit(c, slot);
    }
    c.slots.push_back(std::move(slot));
    if (c.slots.back().admitted) c.admitted_through = c.slots.size();
    cv_.notify_all();
    return h;
  }

  void wait(const SendHandle& h) {
    std::unique_lock lk(mu_);
    cv_.wait(lk, [&] { return h->done.load() || aborted_; });
    if (!h->done.load()) fail(Errc::group_shutdown, "group aborted during send");
  }

  Envelope receive(Rank me, Rank source, Tag tag) {
    std::unique_lock lk(mu_);
    const auto deadline = timeout_ ? std::optional(std::chrono::steady_clock::now() + *timeout_)
                                   : std::nullopt;
    for (;;) {
      if (auto e = take(me, source, tag)) {
        cv_.notify_all();
        return std::move(*e);
      }
      if (aborted_) fail(Errc::group_shutdown, "group aborted while receiving");
      if (!sender_alive(me, source)) {
        fail(Errc::group_shutdown, "no live peer can send a matching message");
      }
      if (deadline) {
        if (cv_.wait_until(lk, *deadline) == std::cv_status::timeout &&
            std::chrono::steady_clock::now() >= *deadline) {
          if (auto e = take(me, source, tag)) return std::move(*e);
          fail(Errc::group_shutdown, "receive timed out");
        }
      } else {
        cv_.wait(lk);
      }
    }
  }

  /// Barrier that also compares every rank's digest.
  void check_digest(Rank me, std::uint64_t digest) {
    std::unique_lock lk(mu_);
    digests_[me] = digest;
    const std::uint64_t gen = barrier_gen_;
    if (++arrived_ == nprocs_) {
      arrived_ = 0;
      ++barrier_gen_;
      cv_.notify_all();
    } else {
      cv_.wait(lk, [&] { return barrier_gen_ != gen || aborted_; });
      if (barrier_gen_ == gen) fail(Errc::group_shutdown, "group aborted during startup");
    }
    for (Rank r = 0; r < nprocs_; ++r) {
      if (digests_[r] != digests_[0]) {
        fail(Errc::digest_mismatch, "rank " + std::to_string(r) + " registry digest differs from rank 0");
      }
    }
  }

  void finish(Rank me) noexcept {
    std::lock_guard lk(mu_);
    finished_[me] = true;
    cv_.notify_all();
  }

  void abort() noexcept {
    std::lock_guard lk(mu_);
    aborted_ = true;
    cv_.notify_all();
  }

  bool aborted() const {
    std::lock_guard lk(mu_);
    return aborted_;
  }

 private:
  struct Slot {
    Envelope env;
    SendHandle handle;
    std::uint64_t seq = 0;
    bool admitted = false;
  };
  struct Channel {
    std::deque<Slot> slots;
    std::size_t admitted_through = 0;  // slots [0, admitted_through) are admitted
    std::size_t bytes = 0;
  };

  Channel& channel(Rank src, Rank dest) { return channels_[std::size_t{src} * nprocs_ + dest]; }

  void admit(Channel& c, Slot& s) {
    s.admitted = true;
    c.bytes += s.env.payload.size();
    s.handle->done.store(true);
  }

  std::optional<Envelope> take(Rank me, Rank source, Tag tag) {
    Channel* best = nullptr;
    std::size_t best_idx = 0;
    for (Rank src = 0; src < nprocs_; ++src) {
      if (src == me || (source != ANY_SOURCE && source != src)) continue;
      Channel& c = channel(src, me);
      for (std::size_t i = 0; i < c.slots.size(); ++i) {
        if (!matches(c.slots[i].env, source, tag)) continue;
        if (best == nullptr || c.slots[i].seq < best->slots[best_idx].seq) {
          best = &c;
          best_idx = i;
        }
        break;
      }
    }
    if (best == nullptr) return std::nullopt;

    Slot slot = std::move(best->slots[best_idx]);
    best->slots.erase(best->slots.begin() + static_cast<std::ptrdiff_t>(best_idx));
    if (slot.admitted) {
      best->bytes -= slot.env.payload.size();
      --best->admitted_through;
    } else {
      slot.handle->done.store(true);
    }
    // Admit waiting messages in order while they fit.
    while (best->admitted_through < best->slots.size()) {
      Slot& next = best->slots[best->admitted_through];
      if (next.admitted) {
        ++best->admitted_through;
        continue;
      }
      if (best->bytes != 0 && best->bytes + next.env.payload.size() > capacity_) break;
      admit(*best, next);
      ++best->admitted_through;
    }
    return std::move(slot.env);
  }

  bool sender_alive(Rank me, Rank source) const {
    if (source != ANY_SOURCE) return !finished_[source];
    for (Rank r = 0; r < nprocs_; ++r) {
      if (r != me && !finished_[r]) return true;
    }
    return false;
  }

  const Rank nprocs_;
  const std::size_t capacity_;
  const std::optional<Millis> timeout_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<Channel> channels_;
  std::vector<bool> finished_;
  std::vector<std::uint64_t> digests_;
  std::uint64_t next_seq_ = 0;
  Rank arrived_ = 0;
  std::uint64_t barrier_gen_ = 0;
  bool aborted_ = false;
};

class InprocTransport final : public Transport {
 public:
  InprocTransport(std::shared_ptr<Fabric> fabric, Rank me) : fabric_(std::move(fabric)), me_(me) {}

  Rank nprocs() const noexcept override { return fabric_->nprocs(); }
  Rank myid() const noexcept override { return me_; }

  SendHandle post(Rank dest, Tag tag, std::vector<std::byte> payload) override {
    check_dest(dest, me_, nprocs());
    ++stats.messages_sent;
    stats.bytes_sent += payload.size();
    return fabric_->post(me_, dest, tag, std::move(payload));
  }

  void wait(const SendHandle& h) override {
    if (!h->done.load()) fabric_->wait(h);
  }

  Envelope receive(Rank source, Tag tag) override {
    check_source(source, me_, nprocs());
    Envelope e = fabric_->receive(me_, source, tag);
    ++stats.messages_received;
    stats.bytes_received += e.payload.size();
    return e;
  }

  void check_digest(std::uint64_t digest) override { fabric_->check_digest(me_, digest); }

  void close(bool ok) noexcept override {
    if (!ok) fabric_->abort();
    fabric_->finish(me_);
  }

  Fabric& fabric() noexcept { return *fabric_; }

 private:
  std::shared_ptr<Fabric> fabric_;
  Rank me_;
};

}  // namespace graphcell::transport
