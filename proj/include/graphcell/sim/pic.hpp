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

// Particle-in-cell agents on a grid of cells. Agents are discs that move
// with their velocity plus a drift toward a moving attractor, bounce off
// the domain walls and collide elastically with agents in neighbouring
// cells.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "graphcell/error.hpp"
#include "graphcell/graph/graph.hpp"
#include "graphcell/registry/object.hpp"

namespace graphcell::sim {

using Vec2 = std::array<double, 2>;

struct Agent {
  Vec2 position{};  // cell-local, each component in [0, cell_size)
  Vec2 velocity{};
  std::uint64_t id = 0;

  template <class Self, class V>
  static void fields(Self& s, V& v) {
    v("position", s.position);
    v("velocity", s.velocity);
    v("id", s.id);
  }
  friend bool operator==(const Agent&, const Agent&) = default;
};

/// An agent leaving its cell, addressed to the neighbouring cell (ix, iy).
struct Emigrant {
  std::int32_t ix = 0;
  std::int32_t iy = 0;
  Agent agent;

  template <class Self, class V>
  static void fields(Self& s, V& v) {
    v("ix", s.ix);
    v("iy", s.iy);
    v("agent", s.agent);
  }
};

struct PicCell : registry::Polymorphic<PicCell, graph::Node> {
  std::int32_t ix = 0;
  std::int32_t iy = 0;
  std::vector<Agent> agents;  // sorted by id between steps
  std::vector<Emigrant> outbox;

  /// n^2 for n agents, at least 1.
  graph::Weight weight() const override {
    const graph::Weight n = agents.size();
    return std::max<graph::Weight>(1, n * n);
  }
  /// The neighbour's agent count, at least 1; 1 if it has no local copy.
  graph::Weight edgeweight(const graph::ObjRef& nbr) const override {
    if (nbr.nullref()) return 1;
    const auto* c = dynamic_cast<const PicCell*>(nbr.get());
    return c == nullptr ? 1 : std::max<graph::Weight>(1, c->agents.size());
  }

  template <class Self, class V>
  static void fields(Self& s, V& v) {
    graph::Node::fields(s, v);
    v("ix", s.ix);
    v("iy", s.iy);
    v("agents", s.agents);
    v("outbox", s.outbox);
  }
};

struct PicParams {
  int nx = 16;
  int ny = 16;
  double cell_size = 1.0;
  double dt = 0.1;
  double radius = 0.05;
  double max_speed = 1.0;
  double drift_gain = 0.5;
  double noise = 0.2;
  Vec2 attractor{};
  std::uint64_t seed = 1;
  std::uint64_t step = 0;

  /// Largest distance an agent can travel in one step.
  double max_hop() const { return (max_speed + drift_gain + noise) * dt; }

  void validate() const {
    auto bad = [](const std::string& what) { fail(Errc::config_error, what); };
    if (nx < 1 || ny < 1) bad("nx and ny must be positive");
    if (!(cell_size > 0) || !(dt > 0)) bad("cell_size and dt must be positive");
    if (!(radius >= 0) || !(max_speed >= 0) || !(drift_gain >= 0) || !(noise >= 0)) {
      bad("radius, max_speed, drift_gain and noise must be non-negative");
    }
    if (max_hop() > cell_size) {
      bad("cell_size " + std::to_string(cell_size) + " is smaller than the largest hop " +
          std::to_string(max_hop()));
    }
  }
};

/// Attractor circling the domain centre once every `period` steps.
inline Vec2 attractor_at(const PicParams& p, std::uint64_t step, double period = 200) {
  const double w = p.nx * p.cell_size, h = p.ny * p.cell_size;
  const double r = 0.3 * std::min(w, h);
  const double a = 2 * std::numbers::pi * static_cast<double>(step) / period;
  return {0.5 * w + r * std::cos(a), 0.5 * h + r * std::sin(a)};
}

namespace detail {

inline std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Uniform in [-1, 1), a pure function of (seed, step, agent, axis).
inline double noise(std::uint64_t seed, std::uint64_t step, std::uint64_t id, int axis) {
  const std::uint64_t h =
      splitmix(splitmix(splitmix(seed) ^ step) ^ (id * 2 + static_cast<std::uint64_t>(axis)));
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

struct Seen {
  Vec2 pos;  // global
  Vec2 vel;
  std::uint64_t id;
};

/// Reflects x into [0, extent).
inline void reflect(double& x, double& v, double extent) {
  if (x < 0) {
    x = -x;
    v = -v;
  } else if (x >= extent) {
    x = 2 * extent - x;
    v = -v;
  }
  x = std::clamp(x, 0.0, std::nextafter(extent, 0.0));
}

inline std::int32_t cell_of(double x, double cell_size, int n) {
  return std::clamp(static_cast<std::int32_t>(std::floor(x / cell_size)), 0, n - 1);
}

}  // namespace detail

/// Adds nx*ny empty PicCells, each linked to its up to 8 surrounding cells.
template <class G>
void build_pic(G& g, int nx, int ny) {
  auto id = [&](int i, int j) -> graph::GraphId {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return graph::BAD_ID;
    return static_cast<graph::GraphId>(j) * static_cast<graph::GraphId>(nx) +
           static_cast<graph::GraphId>(i);
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      auto& c = g.template add_object<PicCell>(id(i, j)).template as<PicCell>();
      c.ix = i;
      c.iy = j;
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      auto& o = g[id(i, j)];
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di != 0 || dj != 0) g.add_edge(o, id(i + di, j + dj));
        }
      }
    }
  }
}

/// Places `count` agents uniformly in [x0, x1) x [y0, y1) (global
/// coordinates) with random velocities of speed at most max_speed.
template <class G>
void seed_agents(G& g, const PicParams& p, std::size_t count, Vec2 lo, Vec2 hi,
                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo[0], hi[0]), uy(lo[1], hi[1]), unit(0.0, 1.0);
  for (std::size_t k = 0; k < count; ++k) {
    double x = ux(rng), y = uy(rng);
    const double speed = p.max_speed * unit(rng);
    const double angle = 2 * std::numbers::pi * unit(rng);
    const auto ix = detail::cell_of(x, p.cell_size, p.nx);
    const auto iy = detail::cell_of(y, p.cell_size, p.ny);
    Agent a;
    a.id = k;
    a.position = {std::clamp(x - ix * p.cell_size, 0.0, std::nextafter(p.cell_size, 0.0)),
                  std::clamp(y - iy * p.cell_size, 0.0, std::nextafter(p.cell_size, 0.0))};
    a.velocity = {speed * std::cos(angle), speed * std::sin(angle)};
    g[static_cast<graph::GraphId>(iy) * p.nx + ix].template as<PicCell>().agents.push_back(a);
  }
}

/// One step from `front` into `back` (same topology and distribution).
/// Returns the number of colliding pairs whose lower id lives in a cell
/// hosted here, so the sum over ranks is the global count.
///
/// Collisions use the front state: two agents collide if their centres are
/// closer than 2*radius and they are approaching. Each pair exchanges the
/// velocity components along the line of centres, computed from front
/// velocities, and an agent sums its exchanges in ascending partner id.
/// Speeds are then capped at max_speed so no agent can hop more than one
/// cell.
template <class G>
std::uint64_t pic_step(G& front, G& back, const PicParams& p) {
  const double cs = p.cell_size;
  const double width = p.nx * cs, height = p.ny * cs;
  std::uint64_t collisions = 0;

  front.prepare_neighbours();
  std::vector<detail::Seen> near;
  for (graph::ObjRef& ref : front) {
    const auto& cell = ref.as<PicCell>();
    auto& out = back[ref.id()].template as<PicCell>();
    out.ix = cell.ix;
    out.iy = cell.iy;
    out.agents.clear();
    out.outbox.clear();

    near.clear();
    auto add_cell = [&](const PicCell& c) {
      for (const Agent& a : c.agents) {
        near.push_back({{c.ix * cs + a.position[0], c.iy * cs + a.position[1]}, a.velocity, a.id});
      }
    };
    add_cell(cell);
    for (graph::GraphId n : cell.neighbours()) add_cell(front[n].template as<PicCell>());
    std::sort(near.begin(), near.end(),
              [](const detail::Seen& a, const detail::Seen& b) { return a.id < b.id; });

    for (const Agent& a : cell.agents) {
      const Vec2 pa{cell.ix * cs + a.position[0], cell.iy * cs + a.position[1]};
      Vec2 v = a.velocity;
      for (const detail::Seen& b : near) {
        if (b.id == a.id) continue;
        const double dx = b.pos[0] - pa[0], dy = b.pos[1] - pa[1];
        const double d2 = dx * dx + dy * dy;
        if (d2 == 0 || d2 >= 4 * p.radius * p.radius) continue;
        const double rvx = b.vel[0] - a.velocity[0], rvy = b.vel[1] - a.velocity[1];
        const double closing = rvx * dx + rvy * dy;
        if (closing >= 0) continue;
        // a gains the normal component of (vb - va)
        const double k = closing / d2;
        v[0] += k * dx;
        v[1] += k * dy;
        if (a.id < b.id) ++collisions;
      }
      const double speed = std::hypot(v[0], v[1]);
      if (speed > p.max_speed) {
        v[0] *= p.max_speed / speed;
        v[1] *= p.max_speed / speed;
      }

      Vec2 pos{pa[0] + v[0] * p.dt, pa[1] + v[1] * p.dt};
      const double tx = p.attractor[0] - pa[0], ty = p.attractor[1] - pa[1];
      const double dist = std::hypot(tx, ty);
      if (dist > 0) {
        pos[0] += p.drift_gain * p.dt * tx / dist;
        pos[1] += p.drift_gain * p.dt * ty / dist;
      }
      pos[0] += p.noise * p.dt * detail::noise(p.seed, p.step, a.id, 0);
      pos[1] += p.noise * p.dt * detail::noise(p.seed, p.step, a.id, 1);
      detail::reflect(pos[0], v[0], width);
      detail::reflect(pos[1], v[1], height);

      const auto nx = detail::cell_of(pos[0], cs, p.nx);
      const auto ny = detail::cell_of(pos[1], cs, p.ny);
      if (std::abs(nx - cell.ix) > 1 || std::abs(ny - cell.iy) > 1) {
        fail(Errc::agent_escaped, "agent " + std::to_string(a.id) + " left cell (" +
                                      std::to_string(cell.ix) + "," + std::to_string(cell.iy) +
                                      ") for (" + std::to_string(nx) + "," + std::to_string(ny) +
                                      ")");
      }
      Agent moved;
      moved.id = a.id;
      moved.velocity = v;
      moved.position = {std::clamp(pos[0] - nx * cs, 0.0, std::nextafter(cs, 0.0)),
                        std::clamp(pos[1] - ny * cs, 0.0, std::nextafter(cs, 0.0))};
      if (nx == cell.ix && ny == cell.iy) {
        out.agents.push_back(moved);
      } else {
        out.outbox.push_back({nx, ny, moved});
      }
    }
  }

  // Second exchange: collect the agents neighbours sent our way.
  back.prepare_neighbours();
  for (graph::ObjRef& ref : back) {
    auto& cell = ref.as<PicCell>();
    for (graph::GraphId n : cell.neighbours()) {
      for (const Emigrant& e : back[n].template as<PicCell>().outbox) {
        if (e.ix == cell.ix && e.iy == cell.iy) cell.agents.push_back(e.agent);
      }
    }
    std::sort(cell.agents.begin(), cell.agents.end(),
              [](const Agent& a, const Agent& b) { return a.id < b.id; });
  }
  for (graph::ObjRef& ref : back) ref.as<PicCell>().outbox.clear();
  return collisions;
}

/// Agents hosted here in global coordinates, sorted by id.
template <class G>
std::vector<Agent> local_agents(const G& g, double cell_size) {
  std::vector<Agent> out;
  for (graph::ObjRef& ref : g) {
    const auto& c = ref.as<PicCell>();
    for (Agent a : c.agents) {
      a.position = {c.ix * cell_size + a.position[0], c.iy * cell_size + a.position[1]};
      out.push_back(a);
    }
  }
  std::sort(out.begin(), out.end(), [](const Agent& a, const Agent& b) { return a.id < b.id; });
  return out;
}

}  // namespace graphcell::sim
