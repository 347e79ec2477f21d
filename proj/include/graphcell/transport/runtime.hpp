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

// Starting groups: in-process threads (run_group) and named jobs that can
// also run one process per rank (run_job). Programs that use the socket
// backend call maybe_run_worker(argc, argv) at the top of main, after their
// type and handler registration.

#pragma once

#include <signal.h>
#include <spawn.h>
#include <sys/prctl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include "graphcell/transport/group.hpp"
#include "graphcell/transport/handlers.hpp"
#include "graphcell/transport/inproc.hpp"
#include "graphcell/transport/socket.hpp"

extern char** environ;

namespace graphcell::transport {

namespace detail {

inline std::uint64_t salt_for(const GroupOptions& opts, Rank r) {
  return r < opts.digest_salt.size() ? opts.digest_salt[r] : 0;
}

inline Errc errc_of(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const Error& err) {
    return err.code();
  } catch (...) {
    return Errc::config_error;
  }
}

/// The error worth reporting: the first that is not a knock-on shutdown.
inline std::exception_ptr root_cause(const std::vector<std::exception_ptr>& errors) {
  std::exception_ptr first;
  for (const auto& e : errors) {
    if (!e) continue;
    if (!first) first = e;
    try {
      std::rethrow_exception(e);
    } catch (const Error& err) {
      if (err.code() != Errc::group_shutdown) return e;
    } catch (...) {
      return e;
    }
  }
  return first;
}

inline constexpr int exit_code_base = 10;

inline int exit_code_for(Errc c) { return exit_code_base + static_cast<int>(c); }

}  // namespace detail

/// Runs fn(group) on `nprocs` in-process ranks; the calling thread is rank 0.
/// Returns after every rank has torn down; rethrows the root-cause error.
template <class Fn>
void run_group(Rank nprocs, Fn&& fn, GroupOptions opts = {}) {
  if (nprocs < 1) fail(Errc::config_error, "nprocs must be at least 1");
  if (opts.backend != Backend::inproc) {
    fail(Errc::config_error, "run_group is in-process only; use run_job for sockets");
  }
  auto fabric = std::make_shared<Fabric>(nprocs, opts.channel_capacity, opts.recv_timeout);
  const std::uint64_t digest = startup_digest();
  std::vector<std::exception_ptr> errors(nprocs);
  std::vector<Stats> stats(nprocs);
  std::atomic<std::size_t> teardowns{0};

  auto body = [&](Rank r) {
    try {
      Group g(std::make_unique<InprocTransport>(fabric, r), Backend::inproc, opts.job_args);
      g.on_teardown([&, r](const Stats& s) {
        stats[r] = s;
        ++teardowns;
      });
      g.start(digest ^ detail::salt_for(opts, r));
      fn(g);
    } catch (...) {
      errors[r] = std::current_exception();
      fabric->abort();
    }
  };

  std::vector<std::thread> threads;
  try {
    for (Rank r = 1; r < nprocs; ++r) threads.emplace_back(body, r);
  } catch (const std::system_error& e) {
    fabric->abort();
    for (auto& t : threads) t.join();
    fail(Errc::spawn_failure, e.what());
  }
  body(0);
  for (auto& t : threads) t.join();

  if (opts.report) {
    opts.report->stats = stats;
    opts.report->exit_codes.clear();
    opts.report->teardowns = teardowns.load();
  }
  if (auto e = detail::root_cause(errors)) std::rethrow_exception(e);
}

using JobFn = std::function<void(Group&)>;

inline std::map<std::string, JobFn>& job_table() {
  static std::map<std::string, JobFn> jobs;
  return jobs;
}

/// Names a rank body so worker processes can find it. Returns true so it can
/// initialise a namespace-scope constant.
inline bool register_job(const std::string& name, JobFn fn) {
  job_table()[name] = std::move(fn);
  return true;
}

inline const JobFn& find_job(const std::string& name) {
  auto it = job_table().find(name);
  if (it == job_table().end()) fail(Errc::config_error, "unknown job '" + name + "'");
  return it->second;
}

namespace detail {

inline std::string self_exe() {
  std::vector<char> buf(4096);
  ssize_t n = ::readlink("/proc/self/exe", buf.data(), buf.size() - 1);
  if (n <= 0) fail(Errc::spawn_failure, "cannot resolve /proc/self/exe");
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

inline pid_t spawn(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  pid_t pid = -1;
  int rc = ::posix_spawn(&pid, args[0].c_str(), nullptr, nullptr, argv.data(), environ);
  if (rc != 0) fail(Errc::spawn_failure, "posix_spawn: " + std::string(std::strerror(rc)));
  return pid;
}

/// Waits for the children until `deadline`, then kills the stragglers.
inline std::vector<int> reap(const std::vector<pid_t>& pids, socket::Clock::time_point deadline) {
  std::vector<int> codes(pids.size(), -1);
  std::vector<bool> done(pids.size(), false);
  auto decode = [](int status) {
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  };
  for (;;) {
    bool all = true;
    for (std::size_t i = 0; i < pids.size(); ++i) {
      if (done[i]) continue;
      int status = 0;
      pid_t rc = ::waitpid(pids[i], &status, WNOHANG);
      if (rc == pids[i] || rc < 0) {
        done[i] = true;
        codes[i] = rc < 0 ? -1 : decode(status);
      } else {
        all = false;
      }
    }
    if (all) return codes;
    if (socket::Clock::now() >= deadline) break;
    std::this_thread::sleep_for(Millis(5));
  }
  for (std::size_t i = 0; i < pids.size(); ++i) {
    if (done[i]) continue;
    ::kill(pids[i], SIGKILL);
    int status = 0;
    ::waitpid(pids[i], &status, 0);
    codes[i] = decode(status);
  }
  return codes;
}

inline void run_socket_job(const std::string& name, Rank nprocs, const GroupOptions& opts) {
  const JobFn& fn = find_job(name);
  const std::uint64_t digest = startup_digest();
  const Millis timeout = opts.recv_timeout.value_or(default_socket_timeout);

  std::vector<socket::Endpoint> eps(nprocs);
  int listen0 = socket::listen_on(eps[0]);
  for (Rank r = 1; r < nprocs; ++r) {
    // Reserve a free port for the worker; it rebinds with SO_REUSEADDR.
    int fd = socket::listen_on(eps[r]);
    ::close(fd);
  }

  const std::string exe = self_exe();
  std::vector<pid_t> pids;
  std::exception_ptr err;
  try {
    for (Rank r = 1; r < nprocs; ++r) {
      std::vector<std::string> args = {exe,
                                       "--graphcell-worker",
                                       "--rank", std::to_string(r),
                                       "--nprocs", std::to_string(nprocs),
                                       "--endpoints", socket::format_endpoints(eps),
                                       "--job", name,
                                       "--timeout-ms", std::to_string(timeout.count()),
                                       "--startup-ms", std::to_string(opts.startup_timeout.count()),
                                       "--teardown-ms", std::to_string(opts.teardown_timeout.count()),
                                       "--digest-salt", std::to_string(salt_for(opts, r)),
                                       "--"};
      args.insert(args.end(), opts.job_args.begin(), opts.job_args.end());
      pids.push_back(spawn(args));
    }
  } catch (...) {
    err = std::current_exception();
  }

  Stats stats;
  std::size_t teardowns = 0;
  if (!err) {
    try {
      socket::Mesh mesh =
          socket::establish(0, eps, listen0, digest ^ salt_for(opts, 0), opts.startup_timeout);
      listen0 = -1;
      Group g(std::make_unique<socket::SocketTransport>(0, std::move(mesh), timeout,
                                                        opts.teardown_timeout),
              Backend::socket, opts.job_args);
      g.on_teardown([&](const Stats& s) {
        stats = s;
        ++teardowns;
      });
      g.start(digest ^ salt_for(opts, 0));
      fn(g);
    } catch (...) {
      err = std::current_exception();
    }
  }
  if (listen0 >= 0) ::close(listen0);

  auto codes = reap(pids, socket::Clock::now() + opts.teardown_timeout + Millis(2000));
  if (opts.report) {
    opts.report->stats = {stats};
    opts.report->exit_codes = codes;
    opts.report->teardowns = teardowns;
  }

  // Prefer a worker's own failure over rank 0's knock-on shutdown.
  const bool rank0_knock_on =
      err && (errc_of(err) == Errc::group_shutdown || errc_of(err) == Errc::spawn_failure);
  if (!err || rank0_knock_on) {
    for (std::size_t i = 0; i < codes.size(); ++i) {
      const int c = codes[i];
      if (c == 0) continue;
      const auto rank = std::to_string(i + 1);
      const int idx = c - exit_code_base;
      if (idx >= 0 && idx <= static_cast<int>(Errc::config_error)) {
        const auto code = static_cast<Errc>(idx);
        if (code == Errc::group_shutdown && err) continue;
        fail(code, "rank " + rank + " failed (exit " + std::to_string(c) + ")");
      }
      if (!err) fail(Errc::spawn_failure, "rank " + rank + " exited with status " + std::to_string(c));
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace detail

/// Runs the registered job `name` on `nprocs` ranks of the chosen backend.
inline void run_job(const std::string& name, Rank nprocs, GroupOptions opts = {}) {
  if (nprocs < 1) fail(Errc::config_error, "nprocs must be at least 1");
  if (opts.backend == Backend::inproc) {
    const JobFn& fn = find_job(name);
    run_group(nprocs, fn, std::move(opts));
  } else {
    detail::run_socket_job(name, nprocs, opts);
  }
}

/// If argv marks this process as a spawned worker, runs its rank and exits.
inline void maybe_run_worker(int argc, char** argv) {
  bool worker = false;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--graphcell-worker") worker = true;
  }
  if (!worker) return;

  ::prctl(PR_SET_PDEATHSIG, SIGKILL);
  Rank rank = 0;
  Rank nprocs = 0;
  std::string endpoints, job;
  Millis timeout = default_socket_timeout, startup{10000}, teardown{10000};
  std::uint64_t salt = 0;
  std::vector<std::string> job_args;
  int code = 0;
  try {
    int i = 1;
    auto value = [&](const char* flag) -> std::string {
      if (i + 1 >= argc) fail(Errc::config_error, std::string("missing value for ") + flag);
      return argv[++i];
    };
    for (; i < argc; ++i) {
      std::string a = argv[i];
      if (a == "--graphcell-worker") continue;
      if (a == "--rank") rank = static_cast<Rank>(std::stoul(value("--rank")));
      else if (a == "--nprocs") nprocs = static_cast<Rank>(std::stoul(value("--nprocs")));
      else if (a == "--endpoints") endpoints = value("--endpoints");
      else if (a == "--job") job = value("--job");
      else if (a == "--timeout-ms") timeout = Millis(std::stoll(value("--timeout-ms")));
      else if (a == "--startup-ms") startup = Millis(std::stoll(value("--startup-ms")));
      else if (a == "--teardown-ms") teardown = Millis(std::stoll(value("--teardown-ms")));
      else if (a == "--digest-salt") salt = std::stoull(value("--digest-salt"));
      else if (a == "--") {
        job_args.assign(argv + i + 1, argv + argc);
        break;
      }
    }
    auto eps = socket::parse_endpoints(endpoints);
    if (nprocs < 2 || rank == 0 || rank >= nprocs || eps.size() != nprocs) {
      fail(Errc::config_error, "inconsistent worker flags");
    }
    const JobFn& fn = find_job(job);
    const std::uint64_t digest = startup_digest() ^ salt;
    int lfd = socket::listen_on(eps[rank]);
    socket::Mesh mesh = socket::establish(rank, eps, lfd, digest, startup);
    Group g(std::make_unique<socket::SocketTransport>(rank, std::move(mesh), timeout, teardown),
            Backend::socket, std::move(job_args));
    g.start(digest);
    fn(g);
  } catch (const Error& e) {
    std::fprintf(stderr, "graphcell worker %u: %s\n", rank, e.what());
    code = detail::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "graphcell worker %u: %s\n", rank, e.what());
    code = 1;
  }
  std::fflush(nullptr);
  std::_Exit(code);
}

/// Worker count from GRAPHCELL_WORKERS, else `fallback`.
inline Rank default_workers(Rank fallback = 1) {
  if (const char* env = std::getenv("GRAPHCELL_WORKERS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<Rank>(v);
  }
  return fallback;
}

}  // namespace graphcell::transport
