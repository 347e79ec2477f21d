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

/// Reference-counted shared reference whose target is default-constructed on
/// first dereference. Copies share the target, including copies taken before
/// it exists. Acyclic use only: a cycle of LazyRefs is never reclaimed.
template <class T>
class LazyRef {
 public:
  LazyRef() : slot_(std::make_shared<Slot>()) {}

  T& operator*() const {
    if (!slot_->target) slot_->target = std::make_unique<T>();
    return *slot_->target;
  }
  T* operator->() const { return &**this; }

  bool has_target() const noexcept { return slot_->target != nullptr; }
  long use_count() const noexcept { return slot_.use_count(); }
  bool shares_with(const LazyRef& o) const noexcept { return slot_ == o.slot_; }

 private:
  struct Slot {
    std::unique_ptr<T> target;
  };
  std::shared_ptr<Slot> slot_;
};

}  // namespace graphcell::registry

namespace graphcell::codec {

/// Wire: bool has_target, then the target payload. Unpacking always yields a
/// fresh share group.
template <class T>
struct Codec<registry::LazyRef<T>> {
  static void pack(Buffer& buf, const Path& path, const registry::LazyRef<T>& r) {
    Path flag = path.field("has_target");
    Codec<bool>::pack(buf, flag, r.has_target());
    if (r.has_target()) {
      Path p = path.field("target");
      Codec<T>::pack(buf, p, *r);
    }
  }
  static void unpack(Buffer& buf, const Path& path, registry::LazyRef<T>& r) {
    Path flag = path.field("has_target");
    bool has = false;
    Codec<bool>::unpack(buf, flag, has);
    r = registry::LazyRef<T>();
    if (has) {
      Path p = path.field("target");
      Codec<T>::unpack(buf, p, *r);
    }
  }
  static void describe(Description& out, const Path& path, const registry::LazyRef<T>& r) {
    Path flag = path.field("has_target");
    Codec<bool>::describe(out, flag, r.has_target());
    if (r.has_target()) {
      Path p = path.field("target");
      describe_into(out, p, *r);
    }
  }
};

}  // namespace graphcell::codec
