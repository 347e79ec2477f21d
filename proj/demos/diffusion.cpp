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

// Heat diffusion on a ring with random chords. Rank 0 builds the graph, the
// partitioner spreads it over the workers, and each step averages a node
// with its neighbours into a back buffer.
//
//   diffusion [nodes] [steps]        (workers: GRAPHCELL_WORKERS, default 4)

#include <cstdio>
#include <cstdlib>
#include <random>

#include "graphcell/graph/graph.hpp"
#include "graphcell/transport/runtime.hpp"

namespace gc = graphcell;
using gc::graph::GraphId;
using gc::graph::ObjRef;

struct Town : gc::registry::Polymorphic<Town, gc::graph::Node> {
  double heat = 0;

  template <class Self, class V>
  static void fields(Self& s, V& v) {
    gc::graph::Node::fields(s, v);
    v("heat", s.heat);
  }
};

int main(int argc, char** argv) {
  gc::registry::TypeTable::global().register_type<Town>("demo.Town");
  gc::transport::maybe_run_worker(argc, argv);

  const GraphId n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 240;
  const int steps = argc > 2 ? std::atoi(argv[2]) : 60;
  const auto workers = gc::transport::default_workers(4);

  gc::transport::run_group(workers, [&](gc::transport::Group& group) {
    gc::graph::Graph front(group);
    if (group.is_master()) {
      std::mt19937_64 rng(7);
      for (GraphId i = 0; i < n; ++i) front.add_object<Town>(i).as<Town>().heat = i < n / 8 ? 100.0 : 0.0;
      for (GraphId i = 0; i < n; ++i) {
        front.add_edge(i, (i + 1) % n);
        front.add_edge((i + 1) % n, i);
      }
      for (GraphId c = 0; c < n / 20; ++c) {
        const GraphId a = rng() % n, b = rng() % n;
        if (a == b) continue;
        front.add_edge(a, b);
        front.add_edge(b, a);
      }
    }
    front.distribute_objects();
    front.partition_objects();

    const auto m = front.metrics();
    if (group.is_master()) {
      std::printf("%u workers: edge cut %llu, imbalance %.3f\n", static_cast<unsigned>(workers),
                  static_cast<unsigned long long>(m.edge_cut), m.imbalance());
    }

    gc::graph::Graph back = front;
    for (int s = 0; s < steps; ++s) {
      front.prepare_neighbours();
      for (ObjRef& p : front) {
        const auto& t = p.as<Town>();
        double sum = t.heat;
        for (GraphId nb : t.neighbours()) sum += front[nb].as<Town>().heat;
        back[p.id()].as<Town>().heat = sum / static_cast<double>(t.neighbours().size() + 1);
      }
      swap(front, back);
    }

    front.gather();
    if (group.is_master()) {
      double lo = 1e300, hi = -1e300;
      front.objects().for_each([&](ObjRef& r) {
        const double h = r.as<Town>().heat;
        lo = h < lo ? h : lo;
        hi = h > hi ? h : hi;
      });
      std::printf("after %d steps: heat in [%.4f, %.4f]\n", steps, lo, hi);
    }
  });
  return 0;
}
