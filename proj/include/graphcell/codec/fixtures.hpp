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

// Reference types with frozen wire images, shared by the golden-vector tests
// and graphcell-describe.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphcell/codec/codec.hpp"

namespace graphcell::codec::fixtures {

struct Animal {
  template <class Self, class V>
  static void fields(Self&, V&) {}

  friend bool operator==(const Animal&, const Animal&) = default;
};

struct Jellyfish : Animal {
  static constexpr std::size_t dims = 2;

  double position[dims]{};
  double velocity[dims]{};
  double radius = 0;
  std::int32_t colour = 0;

  template <class Self, class V>
  static void fields(Self& self, V& v) {
    Animal::fields(self, v);
    v("position", self.position);
    v("velocity", self.velocity);
    v("radius", self.radius);
    v("colour", self.colour);
  }

  friend bool operator==(const Jellyfish& a, const Jellyfish& b) {
    for (std::size_t i = 0; i < dims; ++i) {
      if (a.position[i] != b.position[i] || a.velocity[i] != b.velocity[i]) return false;
    }
    return a.radius == b.radius && a.colour == b.colour;
  }
};

struct Pair {
  std::uint32_t x = 0;
  std::uint32_t y = 0;

  template <class Self, class V>
  static void fields(Self& self, V& v) {
    v("x", self.x);
    v("y", self.y);
  }

  friend bool operator==(const Pair&, const Pair&) = default;
};

/// One field of every wire category.
struct Golden {
  std::uint8_t a = 0;
  std::int16_t b = 0;
  std::uint32_t c = 0;
  std::int64_t d = 0;
  float e = 0;
  double f = 0;
  bool g = false;
  std::string h;
  std::vector<std::uint16_t> i;
  std::array<std::int32_t, 2> j{};
  std::optional<std::uint32_t> k;
  Pair l;

  template <class Self, class V>
  static void fields(Self& self, V& v) {
    v("a", self.a);
    v("b", self.b);
    v("c", self.c);
    v("d", self.d);
    v("e", self.e);
    v("f", self.f);
    v("g", self.g);
    v("h", self.h);
    v("i", self.i);
    v("j", self.j);
    v("k", self.k);
    v("l", self.l);
  }

  friend bool operator==(const Golden&, const Golden&) = default;
};

inline Jellyfish sample_jellyfish() {
  Jellyfish j;
  j.position[0] = 1.5;
  j.position[1] = -2.25;
  j.velocity[0] = 0.125;
  j.velocity[1] = 3.0;
  j.radius = 0.5;
  j.colour = 7;
  return j;
}

inline Golden sample_golden() {
  Golden g;
  g.a = 0xAB;
  g.b = -2;
  g.c = 42;
  g.d = -1234567890123LL;
  g.e = 1.5f;
  g.f = 1.0;
  g.g = true;
  g.h = "ab";
  g.i = {1, 2, 3};
  g.j = {-1, 65536};
  g.k = 9;
  g.l = {1, 2};
  return g;
}

}  // namespace graphcell::codec::fixtures
