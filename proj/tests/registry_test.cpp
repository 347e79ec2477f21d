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

#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "graphcell/registry/lazy_ref.hpp"
#include "graphcell/registry/poly.hpp"
#include "graphcell/registry/type_table.hpp"
#include "test_util.hpp"

namespace {

using graphcell::Errc;
using graphcell::codec::Buffer;
using graphcell::registry::LazyRef;
using graphcell::registry::Object;
using graphcell::registry::payload_bytes;
using graphcell::registry::PolyHandle;
using graphcell::registry::Polymorphic;
using graphcell::registry::TypeTable;

struct Foo : Polymorphic<Foo> {
  std::uint32_t x = 0;
  template <class Self, class V>
  static void fields(Self& s, V& v) {
    v("x", s.x);
  }
};

struct Bar : Polymorphic<Bar> {
  std::string s;
  template <class Self, class V>
  static void fields(Self& self, V& v) {
    v("s", self.s);
  }
};

struct Animal : Polymorphic<Animal> {
  std::int32_t legs = 0;
  template <class Self, class V>
  static void fields(Self& s, V& v) {
    v("legs", s.legs);
  }
};

struct Fish : Polymorphic<Fish, Animal> {
  double fin = 0;
  template <class Self, class V>
  static void fields(Self& s, V& v) {
    Animal::fields(s, v);
    v("fin", s.fin);
  }
};

struct Rock : Polymorphic<Rock> {
  template <class Self, class V>
  static void fields(Self&, V&) {}
};

class Registry : public ::testing::Test {
 protected:
  Registry() {
    table.register_type<Foo>("Foo");
    table.register_type<Bar>("Bar");
    table.register_type<Animal>("Animal");
    table.register_type<Fish>("Fish");
  }
  TypeTable table;
};

TEST_F(Registry, IdsAreDenseInRegistrationOrder) {
  EXPECT_EQ(table.size(), 4u);
  EXPECT_EQ(table.id_of<Foo>(), 0u);
  EXPECT_EQ(table.id_of<Bar>(), 1u);
  EXPECT_EQ(table.id_of<Fish>(), 3u);
}

TEST_F(Registry, RegistrationIsIdempotent) {
  EXPECT_EQ(table.register_type<Bar>("Bar"), 1u);
  EXPECT_EQ(table.size(), 4u);
}

TEST_F(Registry, LookupReturnsArchetype) {
  const Object& a = table.lookup(0);
  EXPECT_NE(dynamic_cast<const Foo*>(&a), nullptr);
  EXPECT_ERRC(table.lookup(4), Errc::unknown_type_id);
}

TEST_F(Registry, MakeByIdAndTypeOfAgree) {
  auto made = table.make_by_id(1);
  EXPECT_NE(dynamic_cast<Bar*>(made.get()), nullptr);
  EXPECT_EQ(table.type_of(*made), 1u);
  EXPECT_ERRC(table.make_by_id(99), Errc::unknown_type_id);
  EXPECT_ERRC(table.type_of(Rock{}), Errc::unknown_type_id);
}

TEST_F(Registry, RandomIdsRoundtripThroughMakeById) {
  std::mt19937 rng(1);
  for (int i = 0; i < 100; ++i) {
    auto t = static_cast<graphcell::registry::TypeId>(rng() % table.size());
    ASSERT_EQ(table.type_of(*table.make_by_id(t)), t);
  }
}

TEST_F(Registry, DigestDependsOnOrderAndNames) {
  TypeTable same;
  same.register_type<Foo>("Foo");
  same.register_type<Bar>("Bar");
  same.register_type<Animal>("Animal");
  same.register_type<Fish>("Fish");
  EXPECT_EQ(same.digest(), table.digest());

  TypeTable swapped;
  swapped.register_type<Bar>("Bar");
  swapped.register_type<Foo>("Foo");
  swapped.register_type<Animal>("Animal");
  swapped.register_type<Fish>("Fish");
  EXPECT_NE(swapped.digest(), table.digest());
}

TEST(Fnv, KnownVectors) {
  // reference values of 64-bit FNV-1a
  EXPECT_EQ(graphcell::registry::fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(graphcell::registry::fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(graphcell::registry::fnv1a64("foobar"), 0x85944171f73967e8ull);
}

TEST_F(Registry, LnewIsFreshDefault) {
  Foo f;
  f.x = 9;
  auto fresh = f.lnew();
  EXPECT_EQ(dynamic_cast<Foo&>(*fresh).x, 0u);
  EXPECT_EQ(f.x, 9u);
}

TEST_F(Registry, CloneIsDeepAndIndependent) {
  Foo f;
  f.x = 5;
  auto c = f.clone();
  EXPECT_EQ(payload_bytes(*c), payload_bytes(f));
  f.x = 6;
  EXPECT_EQ(dynamic_cast<Foo&>(*c).x, 5u);
  EXPECT_EQ(f.cloneT()->x, 6u);
}

TEST_F(Registry, CloneKeepsDerivedType) {
  Fish fish;
  fish.legs = 0;
  fish.fin = 2.5;
  const Animal& as_animal = fish;
  auto c = as_animal.clone();
  EXPECT_EQ(table.type_of(*c), table.id_of<Fish>());
  EXPECT_EQ(payload_bytes(*c), payload_bytes(fish));
}

TEST_F(Registry, CloneEqualityOnRandomValues) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    Fish f;
    f.legs = static_cast<std::int32_t>(rng());
    f.fin = static_cast<double>(rng() % 100000) / 7.0;
    ASSERT_EQ(payload_bytes(*f.clone()), payload_bytes(f));
  }
}

TEST_F(Registry, HandleSetById) {
  PolyHandle<> h(table);
  h.set(1);
  EXPECT_EQ(h.type(), 1u);
  h.cast<Bar>().s = "hi";
  EXPECT_EQ(h.cast<Bar>().s, "hi");
  EXPECT_ERRC(h.set(77), Errc::unknown_type_id);
}

TEST_F(Registry, HandleCastMismatch) {
  PolyHandle<> h(table);
  h.set(0);
  EXPECT_ERRC(h.cast<Bar>(), Errc::bad_cast);
}

TEST_F(Registry, EmptyHandle) {
  PolyHandle<> h(table);
  EXPECT_TRUE(h.empty());
  EXPECT_ERRC(h.get(), Errc::empty_handle);
  EXPECT_ERRC(h.cast<Foo>(), Errc::empty_handle);
}

TEST_F(Registry, HandleEmplaceWithInit) {
  PolyHandle<Animal> h(table);
  Fish& f = h.emplace<Fish>([](Fish& x) { x.fin = 1.25; });
  EXPECT_EQ(f.fin, 1.25);
  EXPECT_EQ(h.type(), table.id_of<Fish>());
  EXPECT_EQ(h->legs, 0);
}

TEST_F(Registry, HandleCopyIsDeep) {
  PolyHandle<> a(table);
  a.emplace<Foo>([](Foo& f) { f.x = 1; });
  PolyHandle<> b = a;
  b.cast<Foo>().x = 2;
  EXPECT_EQ(a.cast<Foo>().x, 1u);
  EXPECT_NE(&a.get(), &b.get());
}

TEST_F(Registry, HandleRoundtripsThroughBuffer) {
  PolyHandle<Animal> h(table);
  h.emplace<Fish>([](Fish& x) {
    x.legs = 3;
    x.fin = -0.5;
  });
  Buffer buf;
  buf << h;
  EXPECT_EQ(buf.size(), 1u + 4u + 4u + 8u);
  PolyHandle<Animal> back(table);
  buf >> back;
  EXPECT_EQ(back.type(), table.id_of<Fish>());
  EXPECT_EQ(back.cast<Fish>().fin, -0.5);
  EXPECT_EQ(back->legs, 3);
}

TEST_F(Registry, EmptyHandleRoundtrip) {
  PolyHandle<> h(table);
  Buffer buf;
  buf << h;
  EXPECT_EQ(buf.data(), graphcell::testing::bytes({0}));
  PolyHandle<> back(table);
  back.set(0);
  buf >> back;
  EXPECT_TRUE(back.empty());
}

TEST_F(Registry, HandleUnknownTypeOnWire) {
  Buffer buf(graphcell::testing::bytes({1, 0, 0, 0, 42}));
  PolyHandle<> h(table);
  EXPECT_ERRC(buf >> h, Errc::unknown_type_id);
}

TEST_F(Registry, HandleDescribe) {
  PolyHandle<> h(table);
  h.emplace<Foo>([](Foo& f) { f.x = 3; });
  auto d = graphcell::codec::describe(h);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[1].path, ".type");
  EXPECT_EQ(d[2].path, ".payload.x");
  EXPECT_EQ(d[2].value, "3");
}

// ---------------------------------------------------------------------------
// LazyRef

struct Counted {
  static inline int constructions = 0;
  int value = 0;
  Counted() { ++constructions; }
  template <class Self, class V>
  static void fields(Self& s, V& v) {
    v("value", s.value);
  }
};

TEST(LazyRefTest, CopiesShareBeforeFirstDereference) {
  Counted::constructions = 0;
  LazyRef<Counted> a;
  LazyRef<Counted> b = a;
  EXPECT_FALSE(a.has_target());
  EXPECT_EQ(Counted::constructions, 0);
  b->value = 4;
  EXPECT_EQ(Counted::constructions, 1);
  EXPECT_TRUE(a.has_target());
  EXPECT_EQ(a->value, 4);
  EXPECT_EQ(&*a, &*b);
  EXPECT_EQ(Counted::constructions, 1);
  EXPECT_TRUE(a.shares_with(b));
  EXPECT_EQ(a.use_count(), 2);
}

TEST(LazyRefTest, ManyCopiesConstructOnce) {
  Counted::constructions = 0;
  LazyRef<Counted> root;
  std::vector<LazyRef<Counted>> copies(10, root);
  for (auto& c : copies) c->value += 1;
  EXPECT_EQ(Counted::constructions, 1);
  EXPECT_EQ(root->value, 10);
}

TEST(LazyRefTest, IndependentRefsDoNotShare) {
  LazyRef<Counted> a;
  LazyRef<Counted> b;
  EXPECT_FALSE(a.shares_with(b));
  a->value = 1;
  EXPECT_FALSE(b.has_target());
}

TEST(LazyRefTest, WireRoundtripGivesFreshGroup) {
  LazyRef<Counted> a;
  a->value = 12;
  Buffer buf;
  buf << a;
  EXPECT_EQ(buf.data(), graphcell::testing::bytes({1, 0, 0, 0, 12}));
  LazyRef<Counted> back;
  buf >> back;
  EXPECT_EQ(back->value, 12);
  EXPECT_FALSE(back.shares_with(a));

  LazyRef<Counted> empty;
  Buffer buf2;
  buf2 << empty;
  EXPECT_EQ(buf2.data(), graphcell::testing::bytes({0}));
  EXPECT_FALSE(empty.has_target());
}

}  // namespace
