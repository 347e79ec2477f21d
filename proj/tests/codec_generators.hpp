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

// Random value generators and a graph oracle for the codec property tests.

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "graphcell/codec/codec.hpp"

namespace graphcell::testing::gen {

struct Inner {
  std::int32_t a = 0;
  std::string s;
  std::vector<double> xs;
  std::optional<std::uint16_t> o;

  template <class Self, class V>
  static void fields(Self& self, V& v) {
    v("a", self.a);
    v("s", self.s);
    v("xs", self.xs);
    v("o", self.o);
  }
  friend bool operator==(const Inner&, const Inner&) = default;
};

struct Outer {
  std::uint64_t id = 0;
  std::vector<Inner> inners;
  std::map<std::string, std::int32_t> m;
  std::array<float, 3> arr{};
  bool flag = false;
  Inner single;
  std::vector<std::vector<std::uint8_t>> nested;
  std::pair<std::int8_t, std::string> p;
  std::vector<bool> bits;

  template <class Self, class V>
  static void fields(Self& self, V& v) {
    v("id", self.id);
    v("inners", self.inners);
    v("m", self.m);
    v("arr", self.arr);
    v("flag", self.flag);
    v("single", self.single);
    v("nested", self.nested);
    v("p", self.p);
    v("bits", self.bits);
  }
  friend bool operator==(const Outer&, const Outer&) = default;
};

inline std::string text(std::mt19937_64& rng) {
  std::string s(rng() % 12, ' ');
  for (char& c : s) c = static_cast<char>(rng() % 256);
  return s;
}

inline Inner inner(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> real(-1e6, 1e6);
  Inner v;
  v.a = static_cast<std::int32_t>(rng());
  v.s = text(rng);
  v.xs.resize(rng() % 6);
  for (double& x : v.xs) x = real(rng);
  if (rng() % 2) v.o = static_cast<std::uint16_t>(rng());
  return v;
}

inline Outer outer(std::mt19937_64& rng) {
  std::uniform_real_distribution<float> real(-100.0f, 100.0f);
  Outer v;
  v.id = rng();
  v.inners.resize(rng() % 4);
  for (auto& i : v.inners) i = inner(rng);
  for (std::size_t k = rng() % 4; k > 0; --k) v.m[text(rng)] = static_cast<std::int32_t>(rng());
  for (float& f : v.arr) f = real(rng);
  v.flag = rng() % 2;
  v.single = inner(rng);
  v.nested.resize(rng() % 3);
  for (auto& n : v.nested) {
    n.resize(rng() % 5);
    for (auto& b : n) b = static_cast<std::uint8_t>(rng());
  }
  v.p = {static_cast<std::int8_t>(rng()), text(rng)};
  v.bits.resize(rng() % 9);
  for (std::size_t k = 0; k < v.bits.size(); ++k) v.bits[k] = rng() % 2;
  return v;
}

struct GNode {
  std::uint32_t label = 0;
  std::vector<GNode*> links;

  template <class Self, class V>
  static void fields(Self& self, V& v) {
    v("label", self.label);
    v("links", self.links);
  }
};

/// n nodes with distinct labels, each with up to `max_links` links to random
/// nodes (self links and nulls included).
inline std::vector<std::unique_ptr<GNode>> random_graph(std::mt19937_64& rng, std::size_t n,
                                                        std::size_t max_links) {
  std::vector<std::unique_ptr<GNode>> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    nodes.push_back(std::make_unique<GNode>());
    nodes.back()->label = static_cast<std::uint32_t>(1000 + i);
  }
  for (auto& node : nodes) {
    for (std::size_t k = rng() % (max_links + 1); k > 0; --k) {
      std::size_t pick = rng() % (n + 1);
      node->links.push_back(pick == n ? nullptr : nodes[pick].get());
    }
  }
  return nodes;
}

inline std::size_t reachable_count(const GNode* root) {
  if (root == nullptr) return 0;
  std::unordered_set<const GNode*> seen{root};
  std::vector<const GNode*> stack{root};
  while (!stack.empty()) {
    const GNode* n = stack.back();
    stack.pop_back();
    for (const GNode* l : n->links) {
      if (l != nullptr && seen.insert(l).second) stack.push_back(l);
    }
  }
  return seen.size();
}

/// Labels and adjacency with nodes renumbered in breadth-first discovery
/// order; equal forms mean the graphs are isomorphic preserving link order.
using Form = std::vector<std::pair<std::uint32_t, std::vector<long>>>;

inline Form canonical_form(const GNode* root) {
  Form form;
  if (root == nullptr) return form;
  std::unordered_map<const GNode*, long> number{{root, 0}};
  std::deque<const GNode*> queue{root};
  while (!queue.empty()) {
    const GNode* n = queue.front();
    queue.pop_front();
    std::vector<long> adj;
    for (const GNode* l : n->links) {
      if (l == nullptr) {
        adj.push_back(-1);
        continue;
      }
      auto [it, fresh] = number.try_emplace(l, static_cast<long>(number.size()));
      if (fresh) queue.push_back(l);
      adj.push_back(it->second);
    }
    form.emplace_back(n->label, std::move(adj));
  }
  return form;
}

}  // namespace graphcell::testing::gen

template <>
inline constexpr bool graphcell::codec::graphnode_policy<graphcell::testing::gen::GNode> = true;
