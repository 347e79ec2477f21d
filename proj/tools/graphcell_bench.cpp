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

// graphcell-bench: runs the stencil or particle-in-cell benchmark and writes
// one CSV row per step.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "graphcell/sim/bench.hpp"
#include "graphcell/transport/runtime.hpp"

namespace {

constexpr int exit_config = 2;

}  // namespace

int main(int argc, char** argv) {
  graphcell::sim::register_all();
  graphcell::transport::maybe_run_worker(argc, argv);

  graphcell::sim::BenchConfig cfg;
  cfg.workers = static_cast<int>(graphcell::transport::default_workers(1));
  std::string backend = "inproc";
  std::string csv_path;

  CLI::App app{"Run the stencil or particle-in-cell benchmark"};
  app.add_option("demo", cfg.demo, "stencil or pic")->required();
  app.add_option("--nx", cfg.nx, "cells along x")->capture_default_str();
  app.add_option("--ny", cfg.ny, "cells along y")->capture_default_str();
  app.add_option("--steps", cfg.steps, "time steps")->capture_default_str();
  app.add_option("--workers", cfg.workers, "worker count (default: GRAPHCELL_WORKERS or 1)");
  app.add_option("--backend", backend, "inproc or socket")->capture_default_str();
  app.add_option("--partitioner", cfg.partitioner, "greedy or none")->capture_default_str();
  app.add_option("--repartition-every", cfg.repartition_every,
                 "repartition period in steps; 0 partitions once up front")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app.add_option("--agents", cfg.agents, "pic: agent count")->capture_default_str();
  app.add_option("--layout", cfg.layout, "pic: quadrant or uniform")->capture_default_str();
  app.add_option("--csv", csv_path, "write rows here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }

  try {
    auto b = graphcell::transport::parse_backend(backend);
    if (!b) graphcell::fail(graphcell::Errc::config_error, "backend: expected inproc or socket");
    cfg.backend = *b;
    const auto result = graphcell::sim::run_bench(cfg);

    if (csv_path.empty()) {
      graphcell::sim::write_csv(std::cout, result.records);
    } else {
      std::ofstream out(csv_path);
      if (!out) graphcell::fail(graphcell::Errc::config_error, "csv: cannot open " + csv_path);
      graphcell::sim::write_csv(out, result.records);
    }
    std::cerr << "digest " << std::hex << result.final_digest << std::dec;
    if (cfg.demo == "pic") std::cerr << " collisions " << result.collisions;
    std::cerr << "\n";
  } catch (const graphcell::Error& e) {
    std::cerr << "graphcell-bench: " << e.what() << "\n";
    return e.code() == graphcell::Errc::config_error ? exit_config : 1;
  }
  return 0;
}
