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

// Two-component 5-point stencil on a graph of cells.

#pragma once

#include <cstdint>
#include <random>

#include "graphcell/graph/graph.hpp"
#include "graphcell/registry/object.hpp"

namespace graphcell::sim {

struct StencilCell : registry::Polymorphic<StencilCell, graph::Node> {
  double u = 0;
  double v = 0;

  template <class Self, class V>
  static void fields(Self& s, V& v) {
    graph::Node::fields(s, v);
    v("u", s.u);
    v("v", s.v);
  }
};

/// Id of cell (i, j) on an nx*ny grid; BAD_ID off the grid unless periodic.
inline graph::GraphId grid_id(int i, int j, int nx, int ny, bool periodic) {
  if (periodic) {
    i = ((i % nx) + nx) % nx;
    j = ((j % ny) + ny) % ny;
  } else if (i < 0 || j < 0 || i >= nx || j >= ny) {
    return graph::BAD_ID;
  }
  return static_cast<graph::GraphId>(j) * static_cast<graph::GraphId>(nx) +
         static_cast<graph::GraphId>(i);
}

/// Adds nx*ny StencilCells with neighbours left, right, down, up. Missing
/// neighbours of a non-periodic grid are refused BAD_ID edges.
template <class G>
void build_stencil(G& g, int nx, int ny, bool periodic = true) {
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) g.template add_object<StencilCell>(grid_id(i, j, nx, ny, periodic));
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      auto& o = g[grid_id(i, j, nx, ny, periodic)];
      g.add_edge(o, grid_id(i - 1, j, nx, ny, periodic));
      g.add_edge(o, grid_id(i + 1, j, nx, ny, periodic));
      g.add_edge(o, grid_id(i, j - 1, nx, ny, periodic));
      g.add_edge(o, grid_id(i, j + 1, nx, ny, periodic));
    }
  }
}

/// Fills u and v with uniform values in [-1, 1) drawn in id order.
template <class G>
void randomise_stencil(G& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  g.objects().for_each([&](graph::ObjRef& r) {
    if (r.nullref()) return;
    auto& c = r.template as<StencilCell>();
    c.u = d(rng);
    c.v = d(rng);
  });
}

/// One synchronous update into `back`:
///   u' = v - sum(0.25 * neighbour v),  v' = u - sum(0.25 * neighbour u),
/// subtracting term by term in neighbour-list order. `back` must have the
/// same topology and distribution as `front`; swap them afterwards.
template <class G>
void stencil_step(G& front, G& back) {
  front.prepare_neighbours();
  for (graph::ObjRef& p : front) {
    const auto& c = p.as<StencilCell>();
    auto& b = back[p.id()].template as<StencilCell>();
    b.u = c.v;
    b.v = c.u;
    for (graph::GraphId n : c.neighbours()) {
      const auto& nc = front[n].template as<StencilCell>();
      b.u -= 0.25 * nc.v;
      b.v -= 0.25 * nc.u;
    }
  }
}

}  // namespace graphcell::sim
