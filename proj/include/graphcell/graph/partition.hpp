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

// Weighted graph partitioning: greedy region growing followed by
// boundary refinement. Pure functions over an explicit topology.

#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "graphcell/graph/node.hpp"

namespace graphcell::graph {

using Part = std::uint32_t;

/// Undirected weighted view of a graph. Node i has id ids[i]; adj[i] holds
/// (neighbour index, edge weight) sorted by index, without self loops.
struct Topology {
  std::vector<GraphId> ids;
  std::vector<Weight> weights;
  std::vector<std::vector<std::pair<std::uint32_t, Weight>>> adj;

  std::size_t size() const noexcept { return ids.size(); }

  struct Arc {
    std::uint32_t from;
    std::uint32_t to;
    Weight weight;
  };

  /// Symmetrises directed arcs: parallel arcs add up per direction, and the
  /// undirected weight is the larger of the two directions.
  static Topology from_arcs(std::vector<GraphId> ids, std::vector<Weight> weights,
                            const std::vector<Arc>& arcs) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, Weight> dir;
    for (const Arc& a : arcs) {
      if (a.from == a.to) continue;
      dir[{a.from, a.to}] += a.weight;
    }
    Topology t;
    t.ids = std::move(ids);
    t.weights = std::move(weights);
    t.adj.resize(t.ids.size());
    for (const auto& [key, w] : dir) {
      auto [i, j] = key;
      auto back = dir.find({j, i});
      const Weight rev = back == dir.end() ? 0 : back->second;
      if (rev > w || (rev == w && j < i)) continue;  // the other direction records it
      const Weight sym = std::max(w, rev);
      t.adj[i].push_back({j, sym});
      t.adj[j].push_back({i, sym});
    }
    for (auto& a : t.adj) std::sort(a.begin(), a.end());
    return t;
  }

  /// Unit-weight topology from an undirected edge list over nodes 0..n-1.
  static Topology unit(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    std::vector<GraphId> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    std::vector<Arc> arcs;
    for (auto [a, b] : edges) {
      arcs.push_back({a, b, 1});
      arcs.push_back({b, a, 1});
    }
    return from_arcs(std::move(ids), std::vector<Weight>(n, 1), arcs);
  }
};

struct PartitionOptions {
  double epsilon = 0.1;
  int max_passes = 10;
  int trials = 16;
  std::uint64_t seed = 1;
};

struct PartitionAssignment {
  Part nparts = 1;
  std::vector<GraphId> ids;
  std::vector<Part> part;  // parallel to ids
  std::vector<Weight> part_weight;
  Weight edge_cut = 0;
  double bound = 0;
  /// A single node outweighs (1+epsilon) times the average part weight.
  bool infeasible = false;

  Weight max_part_weight() const {
    return part_weight.empty() ? 0 : *std::max_element(part_weight.begin(), part_weight.end());
  }
  double avg_part_weight() const {
    Weight total = 0;
    for (Weight w : part_weight) total += w;
    return nparts == 0 ? 0.0 : static_cast<double>(total) / nparts;
  }
  std::map<GraphId, Part> labels() const {
    std::map<GraphId, Part> out;
    for (std::size_t i = 0; i < ids.size(); ++i) out.emplace(ids[i], part[i]);
    return out;
  }
  double imbalance() const {
    const double avg = avg_part_weight();
    return avg == 0 ? 1.0 : static_cast<double>(max_part_weight()) / avg;
  }
};

/// Largest part weight the partitioner accepts: (1+eps)*avg, relaxed to the
/// list-scheduling bound avg + (1 - 1/k)*w_max when that is larger, so a
/// balanced assignment always exists.
inline double balance_bound(Weight total, Weight wmax, Part k, double epsilon) {
  const double avg = static_cast<double>(total) / k;
  const double strict = (1.0 + epsilon) * avg;
  const double graham = avg + (1.0 - 1.0 / k) * static_cast<double>(wmax);
  return std::max(strict, graham);
}

inline bool within(Weight w, double bound) { return static_cast<double>(w) <= bound + 1e-9; }

/// Part weights, cut and bound for a given labelling.
inline PartitionAssignment evaluate(const Topology& t, std::vector<Part> part, Part k,
                                    double epsilon = 0.1) {
  PartitionAssignment a;
  a.nparts = k;
  a.ids = t.ids;
  a.part = std::move(part);
  a.part_weight.assign(k, 0);
  Weight total = 0, wmax = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    a.part_weight.at(a.part[i]) += t.weights[i];
    total += t.weights[i];
    wmax = std::max(wmax, t.weights[i]);
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (auto [j, w] : t.adj[i]) {
      if (i < j && a.part[i] != a.part[j]) a.edge_cut += w;
    }
  }
  a.bound = k == 0 ? 0 : balance_bound(total, wmax, k, epsilon);
  a.infeasible = k > 0 && static_cast<double>(wmax) > (1.0 + epsilon) * static_cast<double>(total) / k + 1e-9;
  return a;
}

using Partitioner = std::function<PartitionAssignment(const Topology&, Part, const PartitionOptions&)>;

namespace detail {

class Grower {
 public:
  Grower(const Topology& t, Part k, double bound) : t_(t), k_(k), bound_(bound) {}

  /// `seeds` may name fewer than k nodes; the rest are picked farthest
  /// from the seeds so far.
  std::vector<Part> run(std::vector<std::uint32_t> seeds) {
    const std::size_t n = t_.size();
    part_.assign(n, unassigned);
    pw_.assign(k_, 0);
    frontier_.assign(k_, {});
    std::size_t assigned = 0;

    while (seeds.size() < std::min<std::size_t>(k_, n)) seeds.push_back(farthest(seeds));
    for (Part p = 0; p < seeds.size(); ++p) {
      assign(seeds[p], p);
      ++assigned;
    }

    while (assigned < n) {
      Part grow = unassigned;
      for (Part p = 0; p < k_; ++p) {
        if (frontier_[p].empty()) continue;
        if (grow == unassigned || pw_[p] < pw_[grow]) grow = p;
      }
      std::uint32_t pick = 0;
      if (grow == unassigned) {
        // disconnected remainder: heaviest unassigned node to the lightest part
        grow = static_cast<Part>(std::min_element(pw_.begin(), pw_.end()) - pw_.begin());
        bool found = false;
        for (std::uint32_t v = 0; v < n; ++v) {
          if (part_[v] != unassigned) continue;
          if (!found || t_.weights[v] > t_.weights[pick]) pick = v;
          found = true;
        }
      } else {
        Weight best = 0;
        bool found = false;
        for (auto [v, c] : frontier_[grow]) {
          if (!found || c > best) {
            best = c;
            pick = v;
            found = true;
          }
        }
      }
      assign(pick, grow);
      ++assigned;
    }
    return part_;
  }

 private:
  static constexpr Part unassigned = std::numeric_limits<Part>::max();

  void assign(std::uint32_t v, Part p) {
    part_[v] = p;
    pw_[p] += t_.weights[v];
    for (auto& f : frontier_) f.erase(v);
    for (auto [u, w] : t_.adj[v]) {
      if (part_[u] == unassigned) frontier_[p][u] += w;
    }
  }

  std::uint32_t farthest(const std::vector<std::uint32_t>& seeds) const {
    const std::size_t n = t_.size();
    constexpr std::size_t inf = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> dist(n, inf);
    std::deque<std::uint32_t> q;
    for (auto s : seeds) {
      dist[s] = 0;
      q.push_back(s);
    }
    while (!q.empty()) {
      auto v = q.front();
      q.pop_front();
      for (auto [u, w] : t_.adj[v]) {
        if (dist[u] == inf) {
          dist[u] = dist[v] + 1;
          q.push_back(u);
        }
      }
    }
    std::uint32_t best = 0;
    bool found = false;
    for (std::uint32_t v = 0; v < n; ++v) {
      if (dist[v] == 0) continue;
      if (!found || dist[v] > dist[best] ||
          (dist[v] == dist[best] && t_.weights[v] > t_.weights[best])) {
        best = v;
        found = true;
      }
    }
    return best;
  }

  const Topology& t_;
  Part k_;
  double bound_;
  std::vector<Part> part_;
  std::vector<Weight> pw_;
  std::vector<std::map<std::uint32_t, Weight>> frontier_;
};

class Refiner {
 public:
  Refiner(const Topology& t, Part k, double bound, std::vector<Part> part)
      : t_(t), k_(k), bound_(bound), part_(std::move(part)), pw_(k, 0) {
    for (std::size_t i = 0; i < t_.size(); ++i) pw_[part_[i]] += t_.weights[i];
  }

  const std::vector<Part>& part() const noexcept { return part_; }

  /// Moves nodes out of overweight parts, cheapest cut increase first.
  void repair() {
    for (std::size_t guard = 0; guard < t_.size() * k_ + 1; ++guard) {
      const Part h = static_cast<Part>(std::max_element(pw_.begin(), pw_.end()) - pw_.begin());
      if (within(pw_[h], bound_)) return;
      bool found = false;
      std::uint32_t bv = 0;
      Part bq = 0;
      long long best_delta = 0;
      bool best_fits = false;
      for (std::uint32_t v = 0; v < t_.size(); ++v) {
        if (part_[v] != h) continue;
        auto conn = connectivity(v);
        for (Part q = 0; q < k_; ++q) {
          if (q == h || pw_[q] + t_.weights[v] >= pw_[h]) continue;
          const bool fits = within(pw_[q] + t_.weights[v], bound_);
          const long long delta = static_cast<long long>(conn[h]) - static_cast<long long>(conn[q]);
          if (!found || (fits && !best_fits) || (fits == best_fits && delta < best_delta)) {
            found = true;
            bv = v;
            bq = q;
            best_delta = delta;
            best_fits = fits;
          }
        }
      }
      if (!found) return;
      move(bv, bq);
    }
  }

  /// Greedy single-node moves and pair swaps that cut fewer edge weight
  /// while keeping every part within the bound.
  void refine(int max_passes) {
    for (int pass = 0; pass < max_passes; ++pass) {
      bool improved = false;
      for (std::uint32_t v = 0; v < t_.size(); ++v) {
        const Part p = part_[v];
        auto conn = connectivity(v);
        Part best = p;
        long long best_gain = 0;
        for (Part q = 0; q < k_; ++q) {
          if (q == p || !within(pw_[q] + t_.weights[v], bound_)) continue;
          const long long gain = static_cast<long long>(conn[q]) - static_cast<long long>(conn[p]);
          if (gain > best_gain) {
            best_gain = gain;
            best = q;
          }
        }
        if (best != p) {
          move(v, best);
          improved = true;
        }
      }
      for (std::uint32_t u = 0; u < t_.size(); ++u) {
        for (auto [v, w] : t_.adj[u]) {
          const Part p = part_[u], q = part_[v];
          if (p == q) continue;
          const Weight wu = t_.weights[u], wv = t_.weights[v];
          if (!within(pw_[p] - wu + wv, bound_) || !within(pw_[q] - wv + wu, bound_)) continue;
          auto cu = connectivity(u);
          auto cv = connectivity(v);
          const long long gain = static_cast<long long>(cu[q]) - static_cast<long long>(cu[p]) +
                                 static_cast<long long>(cv[p]) - static_cast<long long>(cv[q]) -
                                 2 * static_cast<long long>(w);
          if (gain > 0) {
            move(u, q);
            move(v, p);
            improved = true;
          }
        }
      }
      if (!improved) return;
    }
  }

 private:
  std::vector<Weight> connectivity(std::uint32_t v) const {
    std::vector<Weight> conn(k_, 0);
    for (auto [u, w] : t_.adj[v]) conn[part_[u]] += w;
    return conn;
  }

  void move(std::uint32_t v, Part q) {
    pw_[part_[v]] -= t_.weights[v];
    pw_[q] += t_.weights[v];
    part_[v] = q;
  }

  const Topology& t_;
  Part k_;
  double bound_;
  std::vector<Part> part_;
  std::vector<Weight> pw_;
};

}  // namespace detail

/// The built-in partitioner. Deterministic for fixed options.
inline PartitionAssignment greedy_partition(const Topology& t, Part k,
                                            const PartitionOptions& opts = {}) {
  if (k == 0) fail(Errc::config_error, "nparts must be at least 1");
  const std::size_t n = t.size();
  if (k == 1 || n == 0) return evaluate(t, std::vector<Part>(n, 0), k, opts.epsilon);

  Weight total = 0, wmax = 0;
  for (Weight w : t.weights) {
    total += w;
    wmax = std::max(wmax, w);
  }
  const double bound = balance_bound(total, wmax, k, opts.epsilon);

  // First seeds: the heaviest node, then the others in a seeded shuffle.
  std::uint32_t heaviest = 0;
  for (std::uint32_t v = 1; v < n; ++v) {
    if (t.weights[v] > t.weights[heaviest]) heaviest = v;
  }
  std::vector<std::uint32_t> firsts(n);
  for (std::uint32_t v = 0; v < n; ++v) firsts[v] = v;
  std::swap(firsts[0], firsts[heaviest]);
  std::mt19937_64 rng(opts.seed);
  std::shuffle(firsts.begin() + 1, firsts.end(), rng);

  std::optional<PartitionAssignment> best;
  // Trials up to n start from one seed each; later ones draw every seed
  // at random.
  const int trials = std::max(1, opts.trials);
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<std::uint32_t> seeds;
    if (static_cast<std::size_t>(trial) < n) {
      seeds.push_back(firsts[static_cast<std::size_t>(trial)]);
    } else {
      std::vector<std::uint32_t> pool = firsts;
      std::shuffle(pool.begin(), pool.end(), rng);
      seeds.assign(pool.begin(), pool.begin() + std::min<std::size_t>(k, n));
    }
    detail::Grower grower(t, k, bound);
    detail::Refiner refiner(t, k, bound, grower.run(std::move(seeds)));
    refiner.repair();
    refiner.refine(opts.max_passes);
    auto a = evaluate(t, refiner.part(), k, opts.epsilon);
    const bool ok = within(a.max_part_weight(), bound);
    const bool best_ok = best && within(best->max_part_weight(), bound);
    if (!best || (ok && !best_ok) ||
        (ok == best_ok && (a.edge_cut < best->edge_cut ||
                           (a.edge_cut == best->edge_cut &&
                            a.max_part_weight() < best->max_part_weight())))) {
      best = std::move(a);
    }
  }
  return *best;
}

/// Renames parts so each lands, as far as possible, on the rank that
/// already holds most of its weight. `owner[i]` is node i's current rank.
inline std::vector<Part> relabel_to_owners(const Topology& t, const std::vector<Part>& part,
                                           const std::vector<Part>& owner, Part k) {
  std::vector<std::vector<Weight>> overlap(k, std::vector<Weight>(k, 0));
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (owner[i] < k) overlap[part[i]][owner[i]] += t.weights[i];
  }
  std::vector<Part> rename(k, k);
  std::vector<bool> taken(k, false);
  for (Part round = 0; round < k; ++round) {
    Part bp = k, br = k;
    Weight bw = 0;
    for (Part p = 0; p < k; ++p) {
      if (rename[p] != k) continue;
      for (Part r = 0; r < k; ++r) {
        if (taken[r]) continue;
        if (bp == k || overlap[p][r] > bw) {
          bp = p;
          br = r;
          bw = overlap[p][r];
        }
      }
    }
    rename[bp] = br;
    taken[br] = true;
  }
  std::vector<Part> out(part.size());
  for (std::size_t i = 0; i < part.size(); ++i) out[i] = rename[part[i]];
  return out;
}

}  // namespace graphcell::graph
