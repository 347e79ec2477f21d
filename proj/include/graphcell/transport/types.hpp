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

// Ranks, tags, envelopes and the per-rank delivery interface shared by the
// in-process and socket backends.

#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "graphcell/error.hpp"

namespace graphcell::transport {

using Rank = std::uint32_t;
using Tag = std::uint32_t;

inline constexpr Rank ANY_SOURCE = 0xFFFFFFFFu;
inline constexpr Tag ANY_TAG = 0xFFFFFFFFu;

/// First tag handed out by Group::next_collective_tag. User code should stay
/// below it.
inline constexpr Tag COLLECTIVE_TAG_BASE = 0x80000000u;

using Millis = std::chrono::milliseconds;

struct Envelope {
  Rank source = 0;
  Rank dest = 0;
  Tag tag = 0;
  std::vector<std::byte> payload;
};

inline bool matches(const Envelope& e, Rank source, Tag tag) noexcept {
  return (source == ANY_SOURCE || e.source == source) && (tag == ANY_TAG || e.tag == tag);
}

/// Completion flag of one send.
struct SendState {
  std::atomic<bool> done{false};
};
using SendHandle = std::shared_ptr<SendState>;

struct Stats {
  std::uint64_t messages_sent = 0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t messages_received = 0;
  std::uint64_t bytes_received = 0;

  Stats& operator+=(const Stats& o) {
    messages_sent += o.messages_sent;
    bytes_sent += o.bytes_sent;
    messages_received += o.messages_received;
    bytes_received += o.bytes_received;
    return *this;
  }
};

/// One rank's view of the delivery substrate.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual Rank nprocs() const noexcept = 0;
  virtual Rank myid() const noexcept = 0;

  /// Queues `payload` for `dest`. The handle completes once the payload is
  /// safely queued on the receiving side.
  virtual SendHandle post(Rank dest, Tag tag, std::vector<std::byte> payload) = 0;
  virtual void wait(const SendHandle& h) = 0;

  /// Blocks until a matching envelope arrives. Throws GroupShutdown on abort,
  /// on timeout, or when no live peer could still send a match.
  virtual Envelope receive(Rank source, Tag tag) = 0;

  /// Startup agreement: every rank contributes a digest; all must match.
  virtual void check_digest(std::uint64_t digest) = 0;

  /// Teardown. `ok` is false when the rank is unwinding from an error, in
  /// which case peers are told to abort.
  virtual void close(bool ok) noexcept = 0;

  Stats stats;
};

inline void check_dest(Rank dest, Rank myid, Rank nprocs) {
  if (dest >= nprocs) {
    fail(Errc::invalid_rank,
         "rank " + std::to_string(dest) + " outside group of " + std::to_string(nprocs));
  }
  if (dest == myid) fail(Errc::invalid_rank, "send to self (rank " + std::to_string(dest) + ")");
}

inline void check_source(Rank source, Rank myid, Rank nprocs) {
  if (source == ANY_SOURCE) return;
  if (source >= nprocs) {
    fail(Errc::invalid_rank,
         "rank " + std::to_string(source) + " outside group of " + std::to_string(nprocs));
  }
  if (source == myid) fail(Errc::invalid_rank, "receive from self");
}

}  // namespace graphcell::transport
