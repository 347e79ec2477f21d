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

#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphcell/transport/types.hpp"

namespace graphcell::transport {

enum class Backend { inproc, socket };

constexpr std::string_view backend_name(Backend b) noexcept {
  return b == Backend::inproc ? "inproc" : "socket";
}

inline std::optional<Backend> parse_backend(std::string_view s) {
  if (s == "inproc") return Backend::inproc;
  if (s == "socket") return Backend::socket;
  return std::nullopt;
}

/// Filled in by run_group / run_job, also when they throw.
struct RunReport {
  std::vector<Stats> stats;    // per rank; socket runs only know rank 0
  std::vector<int> exit_codes;  // socket runs: exit status of ranks >= 1
  std::size_t teardowns = 0;    // ranks whose Group was torn down in this process
};

struct GroupOptions {
  Backend backend = Backend::inproc;
  /// Blocking-receive bound. Unset means none for inproc and 30 s for socket.
  std::optional<Millis> recv_timeout;
  /// Per-channel flow-control bound of the in-process backend.
  std::size_t channel_capacity = std::size_t{16} << 20;
  /// XORed into rank r's startup digest; lets tests provoke DigestMismatch.
  std::vector<std::uint64_t> digest_salt;
  std::vector<std::string> job_args;
  Millis startup_timeout{10000};
  Millis teardown_timeout{10000};
  RunReport* report = nullptr;
};

inline constexpr Millis default_socket_timeout{30000};

/// The scoped per-rank runtime. Its destructor is the group teardown: a
/// normal exit says goodbye to the peers, exit by exception aborts them.
class Group {
 public:
  Group(std::unique_ptr<Transport> transport, Backend backend, std::vector<std::string> args)
      : transport_(std::move(transport)),
        backend_(backend),
        args_(std::move(args)),
        uncaught_(std::uncaught_exceptions()) {}

  Group(const Group&) = delete;
  Group& operator=(const Group&) = delete;

  ~Group() { teardown(std::uncaught_exceptions() == uncaught_); }

  Rank nprocs() const noexcept { return transport_->nprocs(); }
  Rank myid() const noexcept { return transport_->myid(); }
  bool is_master() const noexcept { return myid() == 0; }
  Backend backend() const noexcept { return backend_; }
  const std::vector<std::string>& job_args() const noexcept { return args_; }

  Transport& transport() noexcept { return *transport_; }
  const Stats& stats() const noexcept { return transport_->stats; }
  void reset_stats() noexcept { transport_->stats = {}; }

  /// Fresh tag for one collective operation; ranks call it in the same order.
  Tag next_collective_tag() noexcept { return next_tag_++; }

  void start(std::uint64_t digest) { transport_->check_digest(digest); }

  /// Called once with the final stats when the group is torn down.
  void on_teardown(std::function<void(const Stats&)> fn) { on_teardown_ = std::move(fn); }

  void teardown(bool ok) noexcept {
    if (torn_down_) return;
    torn_down_ = true;
    transport_->close(ok);
    if (on_teardown_) on_teardown_(transport_->stats);
  }

 private:
  std::unique_ptr<Transport> transport_;
  Backend backend_;
  std::vector<std::string> args_;
  int uncaught_;
  Tag next_tag_ = COLLECTIVE_TAG_BASE;
  bool torn_down_ = false;
  std::function<void(const Stats&)> on_teardown_;
};

}  // namespace graphcell::transport
