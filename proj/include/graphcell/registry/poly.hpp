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

#pragma once

#include <concepts>
#include <memory>
#include <string>
#include <typeinfo>
#include <utility>

#include "graphcell/codec/codec.hpp"
#include "graphcell/registry/type_table.hpp"

namespace graphcell::registry {

/// Value-semantics holder of one polymorphic object. Copies clone the held
/// value; it is never aliased.
template <class Base = Object>
class PolyHandle {
  static_assert(std::is_base_of_v<Object, Base>);

 public:
  explicit PolyHandle(const TypeTable& table = TypeTable::global()) : table_(&table) {}

  PolyHandle(const Base& value, const TypeTable& table = TypeTable::global()) : table_(&table) {
    set(value);
  }

  PolyHandle(const PolyHandle& o) : table_(o.table_) {
    if (o.value_) value_ = clone_as_base(*o.value_);
  }
  PolyHandle& operator=(const PolyHandle& o) {
    if (this != &o) {
      PolyHandle tmp(o);
      swap(tmp);
    }
    return *this;
  }
  PolyHandle(PolyHandle&&) noexcept = default;
  PolyHandle& operator=(PolyHandle&&) noexcept = default;
  ~PolyHandle() = default;

  PolyHandle& operator=(const Base& value) {
    set(value);
    return *this;
  }

  bool empty() const noexcept { return value_ == nullptr; }
  explicit operator bool() const noexcept { return value_ != nullptr; }
  const TypeTable& table() const noexcept { return *table_; }

  TypeId type() const { return table_->type_of(get()); }

  /// Replaces the content with a fresh default value of type `t`.
  void set(TypeId t) { value_ = as_base(table_->make_by_id(t)); }

  /// Replaces the content with a clone of `value`.
  void set(const Base& value) {
    table_->type_of(value);
    value_ = clone_as_base(value);
  }

  /// Default-constructs a U and then applies `init` to it.
  template <class U, class Init>
    requires std::derived_from<U, Base> && std::invocable<Init&, U&>
  U& emplace(Init&& init) {
    table_->template id_of<U>();
    auto fresh = std::make_unique<U>();
    init(*fresh);
    U& ref = *fresh;
    value_ = std::move(fresh);
    return ref;
  }

  template <class U>
    requires std::derived_from<U, Base>
  U& emplace() {
    return emplace<U>([](U&) {});
  }

  void reset() noexcept { value_.reset(); }
  void swap(PolyHandle& o) noexcept {
    std::swap(value_, o.value_);
    std::swap(table_, o.table_);
  }

  Base& get() {
    if (!value_) fail(Errc::empty_handle, "dereferenced an empty handle");
    return *value_;
  }
  const Base& get() const {
    if (!value_) fail(Errc::empty_handle, "dereferenced an empty handle");
    return *value_;
  }
  Base& operator*() { return get(); }
  const Base& operator*() const { return get(); }
  Base* operator->() { return &get(); }
  const Base* operator->() const { return &get(); }

  template <class U>
  U& cast() {
    auto* p = dynamic_cast<U*>(&get());
    if (p == nullptr) fail(Errc::bad_cast, bad_cast_detail<U>());
    return *p;
  }
  template <class U>
  const U& cast() const {
    const auto* p = dynamic_cast<const U*>(&get());
    if (p == nullptr) fail(Errc::bad_cast, bad_cast_detail<U>());
    return *p;
  }

 private:
  template <class U>
  std::string bad_cast_detail() const {
    return std::string("held ") + typeid(*value_).name() + ", requested " + typeid(U).name();
  }

  static std::unique_ptr<Base> as_base(std::unique_ptr<Object> o) {
    auto* p = dynamic_cast<Base*>(o.get());
    if (p == nullptr) fail(Errc::bad_cast, "registered type does not derive from handle base");
    o.release();
    return std::unique_ptr<Base>(p);
  }
  static std::unique_ptr<Base> clone_as_base(const Base& v) { return as_base(v.clone()); }

  std::unique_ptr<Base> value_;
  const TypeTable* table_;
};

}  // namespace graphcell::registry

namespace graphcell::codec {

/// Wire: bool present, then u32 TypeId and the payload.
template <class Base>
struct Codec<registry::PolyHandle<Base>> {
  using Handle = registry::PolyHandle<Base>;

  static void pack(Buffer& buf, const Path& path, const Handle& h) {
    Path present = path.field("present");
    Codec<bool>::pack(buf, present, !h.empty());
    if (h.empty()) return;
    Path type = path.field("type");
    Codec<std::uint32_t>::pack(buf, type, h.type());
    Path payload = path.field("payload");
    h->pack(buf, payload);
  }

  static void unpack(Buffer& buf, const Path& path, Handle& h) {
    Path present = path.field("present");
    bool has = false;
    Codec<bool>::unpack(buf, present, has);
    if (!has) {
      h.reset();
      return;
    }
    Path type = path.field("type");
    std::uint32_t t = 0;
    Codec<std::uint32_t>::unpack(buf, type, t);
    h.set(t);
    Path payload = path.field("payload");
    h->unpack(buf, payload);
  }

  static void describe(Description& out, const Path& path, const Handle& h) {
    Path present = path.field("present");
    Codec<bool>::describe(out, present, !h.empty());
    if (h.empty()) return;
    Path type = path.field("type");
    Codec<std::uint32_t>::describe(out, type, h.type());
    Path payload = path.field("payload");
    h->describe(out, payload);
  }
};

}  // namespace graphcell::codec
