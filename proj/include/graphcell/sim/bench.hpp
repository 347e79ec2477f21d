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

// Benchmark harness: runs a demo on a worker group and records per-step
// timing, partition metrics and message counts.

#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "graphcell/error.hpp"
#include "graphcell/graph/graph.hpp"
#include "graphcell/registry/type_table.hpp"
#include "graphcell/sim/pic.hpp"
#include "graphcell/sim/stencil.hpp"
#include "graphcell/transport/runtime.hpp"

namespace graphcell::sim {

struct BenchConfig {
  std::string demo = "stencil";  // stencil | pic
  int nx = 32;
  int ny = 32;
  int steps = 10;
  int workers = 1;
  transport::Backend backend = transport::Backend::inproc;
  std::string partitioner = "greedy";  // greedy | none
  /// 0: partition once before the first step (greedy only).
  int repartition_every = 0;
  std::uint64_t seed = 1;
  std::size_t agents = 1000;
  /// pic: "quadrant" puts every agent in the lower-left quadrant.
  std::string layout = "quadrant";

  void validate() const {
    auto bad = [](const std::string& field, const std::string& why) {
      fail(Errc::config_error, field + ": " + why);
    };
    if (demo != "stencil" && demo != "pic") bad("demo", "expected stencil or pic, got '" + demo + "'");
    if (nx < 1) bad("nx", "must be positive");
    if (ny < 1) bad("ny", "must be positive");
    if (steps < 0) bad("steps", "must not be negative");
    if (workers < 1) bad("workers", "must be at least 1");
    if (workers > nx * ny) bad("workers", "more workers than cells");
    if (partitioner != "greedy" && partitioner != "none") {
      bad("partitioner", "expected greedy or none, got '" + partitioner + "'");
    }
    if (repartition_every < 0) bad("repartition-every", "must not be negative");
    if (repartition_every > 0 && partitioner == "none") {
      bad("repartition-every", "needs --partitioner greedy");
    }
    if (layout != "quadrant" && layout != "uniform") {
      bad("layout", "expected quadrant or uniform, got '" + layout + "'");
    }
  }

  std::vector<std::string> to_args() const {
    return {"demo=" + demo,
            "nx=" + std::to_string(nx),
            "ny=" + std::to_string(ny),
            "steps=" + std::to_string(steps),
            "workers=" + std::to_string(workers),
            "backend=" + std::string(transport::backend_name(backend)),
            "partitioner=" + partitioner,
            "repartition-every=" + std::to_string(repartition_every),
            "seed=" + std::to_string(seed),
            "agents=" + std::to_string(agents),
            "layout=" + layout};
  }

  static BenchConfig from_args(const std::vector<std::string>& args) {
    BenchConfig c;
    for (const auto& a : args) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) fail(Errc::config_error, "malformed bench argument '" + a + "'");
      const std::string key = a.substr(0, eq), value = a.substr(eq + 1);
      try {
        if (key == "demo") c.demo = value;
        else if (key == "nx") c.nx = std::stoi(value);
        else if (key == "ny") c.ny = std::stoi(value);
        else if (key == "steps") c.steps = std::stoi(value);
        else if (key == "workers") c.workers = std::stoi(value);
        else if (key == "backend") {
          auto b = transport::parse_backend(value);
          if (!b) fail(Errc::config_error, "backend: unknown '" + value + "'");
          c.backend = *b;
        } else if (key == "partitioner") c.partitioner = value;
        else if (key == "repartition-every") c.repartition_every = std::stoi(value);
        else if (key == "seed") c.seed = std::stoull(value);
        else if (key == "agents") c.agents = std::stoull(value);
        else if (key == "layout") c.layout = value;
        else fail(Errc::config_error, "unknown bench argument '" + key + "'");
      } catch (const std::logic_error&) {
        fail(Errc::config_error, key + ": not a number: '" + value + "'");
      }
    }
    return c;
  }
};

struct BenchRecord {
  std::uint64_t step = 0;
  std::uint32_t nworkers = 1;
  double wall_seconds = 0;  // this step on rank 0, repartitioning included
  graph::Weight edge_cut = 0;
  graph::Weight max_part_weight = 0;
  double avg_part_weight = 0;
  std::uint64_t messages_sent = 0;  // all ranks, this step, metrics traffic excluded

  double imbalance() const {
    return avg_part_weight == 0 ? 1.0 : static_cast<double>(max_part_weight) / avg_part_weight;
  }
};

struct BenchResult {
  std::vector<BenchRecord> records;
  std::uint64_t collisions = 0;
  /// FNV-1a over the packed payloads of every cell in id order, after the
  /// last step; equal digests mean identical final states.
  std::uint64_t final_digest = 0;
};

inline constexpr const char* csv_header =
    "step,nworkers,wall_seconds,edge_cut,max_part_weight,avg_part_weight,messages_sent";

inline std::string csv_row(const BenchRecord& r) {
  std::ostringstream os;
  os << r.step << ',' << r.nworkers << ',' << std::setprecision(9) << r.wall_seconds << ','
     << r.edge_cut << ',' << r.max_part_weight << ',' << std::setprecision(12)
     << r.avg_part_weight << ',' << r.messages_sent;
  return os.str();
}

inline void write_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << csv_header << '\n';
  for (const auto& r : records) os << csv_row(r) << '\n';
}

namespace detail {

/// Sum of one value per rank, known on rank 0.
inline std::uint64_t reduce_sum(transport::Group& g, std::uint64_t value) {
  const transport::Tag tag = g.next_collective_tag();
  transport::MsgBuf b(g);
  if (!g.is_master()) {
    b << value;
    b.send_to(0, tag);
    return 0;
  }
  std::uint64_t total = value;
  for (transport::Rank i = 1; i < g.nprocs(); ++i) {
    std::uint64_t v = 0;
    b.get(transport::ANY_SOURCE, tag) >> v;
    total += v;
  }
  return total;
}

inline PicParams pic_params(const BenchConfig& c) {
  PicParams p;
  p.nx = c.nx;
  p.ny = c.ny;
  p.seed = c.seed;
  p.validate();
  return p;
}

}  // namespace detail

/// Runs the configured demo on this rank; the result is filled on rank 0.
inline BenchResult bench_rank(transport::Group& g, const BenchConfig& c) {
  c.validate();
  if (static_cast<int>(g.nprocs()) != c.workers) {
    fail(Errc::config_error, "workers: config says " + std::to_string(c.workers) +
                                 ", group has " + std::to_string(g.nprocs()));
  }
  using Clock = std::chrono::steady_clock;
  const bool pic = c.demo == "pic";
  const PicParams base = pic ? detail::pic_params(c) : PicParams{};

  graph::Graph front(g);
  if (g.is_master()) {
    if (pic) {
      build_pic(front, c.nx, c.ny);
      const double w = c.nx * base.cell_size, h = c.ny * base.cell_size;
      const Vec2 hi = c.layout == "quadrant" ? Vec2{0.5 * w, 0.5 * h} : Vec2{w, h};
      seed_agents(front, base, c.agents, {0.0, 0.0}, hi, c.seed);
    } else {
      build_stencil(front, c.nx, c.ny, true);
      randomise_stencil(front, c.seed);
    }
    // naive start: horizontal strips of rows
    front.objects().for_each([&](graph::ObjRef& r) {
      const auto row = static_cast<std::int64_t>(r.id() / static_cast<graph::GraphId>(c.nx));
      r.set_proc(static_cast<transport::Rank>(row * c.workers / c.ny));
    });
  }
  front.distribute_objects();
  const bool greedy = c.partitioner == "greedy";
  if (greedy && c.repartition_every == 0) front.partition_objects();
  graph::Graph back = front;

  BenchResult result;
  std::uint64_t collisions = 0;
  for (int s = 1; s <= c.steps; ++s) {
    const auto t0 = Clock::now();
    const auto sent0 = g.stats().messages_sent;
    if (greedy && c.repartition_every > 0 && s % c.repartition_every == 0) {
      front.partition_objects();
      back = front;
    }
    if (pic) {
      PicParams p = base;
      p.step = static_cast<std::uint64_t>(s);
      p.attractor = attractor_at(p, p.step);
      collisions += pic_step(front, back, p);
    } else {
      stencil_step(front, back);
    }
    swap(front, back);
    const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
    const auto sent = g.stats().messages_sent - sent0;

    const auto m = front.metrics();
    const auto total_sent = detail::reduce_sum(g, sent);
    if (g.is_master()) {
      BenchRecord r;
      r.step = static_cast<std::uint64_t>(s);
      r.nworkers = g.nprocs();
      r.wall_seconds = wall;
      r.edge_cut = m.edge_cut;
      r.max_part_weight = m.max_part_weight();
      r.avg_part_weight = m.avg_part_weight();
      r.messages_sent = total_sent;
      result.records.push_back(r);
    }
  }
  result.collisions = detail::reduce_sum(g, collisions);
  front.gather();
  if (g.is_master()) {
    codec::Buffer all;
    front.objects().for_each([&](const graph::ObjRef& r) {
      if (!r.nullref()) r->pack(all);
    });
    result.final_digest = registry::fnv1a64(
        std::string_view(reinterpret_cast<const char*>(all.data().data()), all.size()));
  }
  return result;
}

inline std::optional<BenchResult>& bench_sink() {
  static std::optional<BenchResult> sink;
  return sink;
}

inline constexpr const char* bench_job = "graphcell.bench";

/// Registers the sim node types in the global type table and the bench
/// job. Call at the top of main, before transport::maybe_run_worker.
inline void register_all() {
  auto& t = registry::TypeTable::global();
  t.register_type<StencilCell>("graphcell.StencilCell");
  t.register_type<PicCell>("graphcell.PicCell");
  transport::register_job(bench_job, [](transport::Group& g) {
    auto r = bench_rank(g, BenchConfig::from_args(g.job_args()));
    if (g.is_master()) bench_sink() = std::move(r);
  });
}

/// Runs the benchmark on its own group and returns rank 0's result.
inline BenchResult run_bench(const BenchConfig& c, transport::GroupOptions opts = {}) {
  c.validate();
  register_all();
  opts.backend = c.backend;
  opts.job_args = c.to_args();
  bench_sink().reset();
  transport::run_job(bench_job, static_cast<transport::Rank>(c.workers), std::move(opts));
  if (!bench_sink()) fail(Errc::config_error, "bench produced no result");
  return std::move(*bench_sink());
}

}  // namespace graphcell::sim
