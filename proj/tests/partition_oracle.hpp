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

// Independent checks for the partitioner: exhaustive search, a
// single-move local minimality test, and an enumeration of connected
// graphs up to isomorphism.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include "graphcell/graph/partition.hpp"

namespace graphcell::testing::oracle {

using graph::Part;
using graph::Topology;
using graph::Weight;

inline double bound_of(const Topology& t, Part k, double eps) {
  Weight total = 0, wmax = 0;
  for (Weight w : t.weights) {
    total += w;
    wmax = std::max(wmax, w);
  }
  const double avg = static_cast<double>(total) / k;
  return std::max((1.0 + eps) * avg, avg + (1.0 - 1.0 / k) * static_cast<double>(wmax));
}

inline Weight cut_of(const Topology& t, const std::vector<Part>& part) {
  Weight cut = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (auto [j, w] : t.adj[i]) {
      if (i < j && part[i] != part[j]) cut += w;
    }
  }
  return cut;
}

inline std::vector<Weight> weights_of(const Topology& t, const std::vector<Part>& part, Part k) {
  std::vector<Weight> pw(k, 0);
  for (std::size_t i = 0; i < t.size(); ++i) pw[part[i]] += t.weights[i];
  return pw;
}

inline bool balanced(const Topology& t, const std::vector<Part>& part, Part k, double bound) {
  for (Weight w : weights_of(t, part, k)) {
    if (static_cast<double>(w) > bound + 1e-9) return false;
  }
  return true;
}

/// Smallest cut over every labelling within the bound (k^n labellings).
inline Weight brute_force_cut(const Topology& t, Part k, double eps = 0.1) {
  const double bound = bound_of(t, k, eps);
  const std::size_t n = t.size();
  std::vector<Part> part(n, 0);
  Weight best = std::numeric_limits<Weight>::max();
  while (true) {
    if (balanced(t, part, k, bound)) best = std::min(best, cut_of(t, part));
    std::size_t i = 0;
    while (i < n && ++part[i] == k) part[i++] = 0;
    if (i == n) break;
  }
  return best;
}

/// No single relabel both lowers the cut and keeps every part in bound.
inline bool locally_minimal(const Topology& t, const std::vector<Part>& part, Part k,
                            double bound) {
  const Weight cut = cut_of(t, part);
  std::vector<Part> trial = part;
  for (std::size_t v = 0; v < t.size(); ++v) {
    for (Part q = 0; q < k; ++q) {
      if (q == part[v]) continue;
      trial[v] = q;
      if (balanced(t, trial, k, bound) && cut_of(t, trial) < cut) return false;
    }
    trial[v] = part[v];
  }
  return true;
}

// ---------------------------------------------------------------------------
// Small graphs as adjacency bitmasks: bit (i*8 + j) set for edge {i,j}.

struct SmallGraph {
  int n = 0;
  std::uint64_t bits = 0;

  bool edge(int i, int j) const { return (bits >> (i * 8 + j)) & 1u; }
  void set(int i, int j) {
    bits |= std::uint64_t{1} << (i * 8 + j);
    bits |= std::uint64_t{1} << (j * 8 + i);
  }
  int degree(int i) const {
    int d = 0;
    for (int j = 0; j < n; ++j) d += edge(i, j);
    return d;
  }
  bool connected() const {
    if (n == 0) return true;
    unsigned seen = 1, frontier = 1;
    while (frontier != 0) {
      unsigned next = 0;
      for (int i = 0; i < n; ++i) {
        if (!((frontier >> i) & 1u)) continue;
        for (int j = 0; j < n; ++j) {
          if (edge(i, j) && !((seen >> j) & 1u)) next |= 1u << j;
        }
      }
      seen |= next;
      frontier = next;
    }
    return seen == (1u << n) - 1;
  }
  Topology topology() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (edge(i, j)) edges.emplace_back(i, j);
      }
    }
    return Topology::unit(static_cast<std::size_t>(n), edges);
  }
};

/// Smallest relabelled bitmask over the vertex orders that keep vertices
/// sorted by (degree, sorted neighbour degrees).
inline std::uint64_t canonical(const SmallGraph& g) {
  const int n = g.n;
  std::vector<std::pair<std::vector<int>, int>> key(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> k{g.degree(i)};
    std::vector<int> nd;
    for (int j = 0; j < n; ++j) {
      if (g.edge(i, j)) nd.push_back(g.degree(j));
    }
    std::sort(nd.begin(), nd.end());
    k.insert(k.end(), nd.begin(), nd.end());
    key[i] = {k, i};
  }
  std::sort(key.begin(), key.end());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = key[i].second;
  std::vector<std::pair<int, int>> cells;  // [begin, end) of equal keys
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && key[j].first == key[i].first) ++j;
    cells.emplace_back(i, j);
    i = j;
  }
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  std::function<void(std::size_t)> go = [&](std::size_t c) {
    if (c == cells.size()) {
      std::uint64_t code = 0;
      for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
          code = (code << 1) | static_cast<std::uint64_t>(g.edge(order[a], order[b]));
        }
      }
      best = std::min(best, code);
      return;
    }
    auto [b, e] = cells[c];
    std::sort(order.begin() + b, order.begin() + e);
    do {
      go(c + 1);
    } while (std::next_permutation(order.begin() + b, order.begin() + e));
  };
  go(0);
  return best;
}

/// Every graph on n vertices up to isomorphism, built by adding a vertex
/// with every neighbour set to each graph on n-1 vertices.
inline std::vector<std::vector<SmallGraph>> all_graphs(int max_n) {
  std::vector<std::vector<SmallGraph>> by_n(max_n + 1);
  by_n[0].push_back(SmallGraph{});
  for (int n = 1; n <= max_n; ++n) {
    std::set<std::uint64_t> seen;
    for (const SmallGraph& base : by_n[n - 1]) {
      for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
        SmallGraph g = base;
        g.n = n;
        for (int j = 0; j < n - 1; ++j) {
          if ((mask >> j) & 1u) g.set(n - 1, j);
        }
        if (seen.insert(canonical(g)).second) by_n[n].push_back(g);
      }
    }
  }
  return by_n;
}

inline std::vector<SmallGraph> connected_graphs(int max_n) {
  std::vector<SmallGraph> out;
  auto all = all_graphs(max_n);
  for (int n = 1; n <= max_n; ++n) {
    for (const auto& g : all[n]) {
      if (g.connected()) out.push_back(g);
    }
  }
  return out;
}

}  // namespace graphcell::testing::oracle
