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

#include <memory>

#include "graphcell/codec/codec.hpp"

namespace graphcell::registry {

/// Interface every polymorphic value implements: virtual construction,
/// deep copy and serialisation of the concrete type.
class Object {
 public:
  virtual ~Object() = default;

  /// A fresh default-constructed value of the same concrete type.
  virtual std::unique_ptr<Object> lnew() const = 0;
  virtual std::unique_ptr<Object> clone() const = 0;

  virtual void pack(codec::Buffer& buf, const codec::Path& path) const = 0;
  virtual void unpack(codec::Buffer& buf, const codec::Path& path) = 0;
  virtual void describe(codec::Description& out, const codec::Path& path) const = 0;

  void pack(codec::Buffer& buf) const { pack(buf, codec::Path::root()); }
  void unpack(codec::Buffer& buf) { unpack(buf, codec::Path::root()); }

 protected:
  Object() = default;
  Object(const Object&) = default;
  Object& operator=(const Object&) = default;
};

/// Implements the Object virtuals for `This` from its field descriptor.
///
///   struct Foo : registry::Polymorphic<Foo> {
///     int x = 0;
///     template <class Self, class V> static void fields(Self& s, V& v) { v("x", s.x); }
///   };
template <class This, class Base = Object>
class Polymorphic : public Base {
 public:
  using Base::Base;

  std::unique_ptr<Object> lnew() const override { return std::make_unique<This>(); }
  std::unique_ptr<Object> clone() const override { return std::make_unique<This>(self()); }
  std::unique_ptr<This> cloneT() const { return std::make_unique<This>(self()); }

  void pack(codec::Buffer& buf, const codec::Path& path) const override {
    codec::Codec<This>::pack(buf, path, self());
  }
  void unpack(codec::Buffer& buf, const codec::Path& path) override {
    codec::Codec<This>::unpack(buf, path, static_cast<This&>(*this));
  }
  void describe(codec::Description& out, const codec::Path& path) const override {
    codec::Codec<This>::describe(out, path, self());
  }
  using Object::pack;
  using Object::unpack;

 private:
  const This& self() const { return static_cast<const This&>(*this); }
};

/// Canonical bytes of a polymorphic value (payload only, no type tag).
inline std::vector<std::byte> payload_bytes(const Object& o) {
  codec::Buffer buf;
  o.pack(buf);
  return buf.release();
}

}  // namespace graphcell::registry
