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

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <typeinfo>
#include <utility>
#include <vector>

#include "graphcell/error.hpp"
#include "graphcell/registry/object.hpp"
#include "graphcell/transport/types.hpp"

namespace graphcell::graph {

using GraphId = std::uint64_t;
using Weight = std::uint64_t;
using transport::Rank;

inline constexpr GraphId BAD_ID = std::numeric_limits<GraphId>::max();

class ObjRef;

/// Base of every graph object. Holds the ids of its out-neighbours; the
/// owner of each neighbour is looked up in the graph's object map.
class Node : public registry::Object {
 public:
  /// Computational cost, at least 1.
  virtual Weight weight() const { return 1; }
  /// Communication cost of the edge to `neighbour`, at least 1. The
  /// neighbour's payload is present when called from partition_objects.
  virtual Weight edgeweight(const ObjRef& /*neighbour*/) const { return 1; }

  const std::vector<GraphId>& neighbours() const noexcept { return nbrs_; }

  /// Appends a neighbour id; BAD_ID is refused and false returned.
  bool push_back(GraphId id) {
    if (id == BAD_ID) return false;
    nbrs_.push_back(id);
    return true;
  }
  void clear_neighbours() noexcept { nbrs_.clear(); }

  template <class Self, class V>
  static void fields(Self& self, V& v) {
    v("neighbours", self.nbrs_);
  }

 private:
  std::vector<GraphId> nbrs_;
};

/// Proxy for one graph object: its id, owner rank and, optionally, a local
/// payload. A managed payload belongs to the ref and is cloned on copy.
class ObjRef {
 public:
  ObjRef() = default;
  explicit ObjRef(GraphId id, Rank proc = 0) : id_(id), proc_(proc) {}

  ObjRef(const ObjRef& o) : id_(o.id_), proc_(o.proc_), managed_(o.managed_) {
    if (o.ptr_ == nullptr) return;
    if (o.managed_) {
      auto c = o.ptr_->clone();
      ptr_ = static_cast<Node*>(c.release());
    } else {
      ptr_ = o.ptr_;
    }
  }
  ObjRef& operator=(const ObjRef& o) {
    if (this != &o) {
      ObjRef tmp(o);
      swap(tmp);
    }
    return *this;
  }
  ObjRef(ObjRef&& o) noexcept
      : id_(o.id_), proc_(o.proc_), ptr_(std::exchange(o.ptr_, nullptr)),
        managed_(std::exchange(o.managed_, false)) {}
  ObjRef& operator=(ObjRef&& o) noexcept {
    if (this != &o) {
      nullify();
      id_ = o.id_;
      proc_ = o.proc_;
      ptr_ = std::exchange(o.ptr_, nullptr);
      managed_ = std::exchange(o.managed_, false);
    }
    return *this;
  }
  ~ObjRef() { nullify(); }

  void swap(ObjRef& o) noexcept {
    std::swap(id_, o.id_);
    std::swap(proc_, o.proc_);
    std::swap(ptr_, o.ptr_);
    std::swap(managed_, o.managed_);
  }

  GraphId id() const noexcept { return id_; }
  Rank proc() const noexcept { return proc_; }
  void set_proc(Rank p) noexcept { proc_ = p; }

  bool nullref() const noexcept { return ptr_ == nullptr; }
  bool managed() const noexcept { return managed_; }

  /// Takes ownership of `payload`.
  void addref(std::unique_ptr<Node> payload) {
    nullify();
    ptr_ = payload.release();
    managed_ = true;
  }
  /// Points at `payload`; the ref owns it only if `managed`.
  void addref(Node* payload, bool managed) {
    if (payload == ptr_) {
      managed_ = managed;
      return;
    }
    nullify();
    ptr_ = payload;
    managed_ = managed;
  }

  /// Drops the payload, destroying it if managed.
  void nullify() noexcept {
    if (managed_) delete ptr_;
    ptr_ = nullptr;
    managed_ = false;
  }

  Node* get() const noexcept { return ptr_; }
  Node& operator*() const { return deref(); }
  Node* operator->() const { return &deref(); }

  template <class T>
  T& as() const {
    auto* p = dynamic_cast<T*>(&deref());
    if (p == nullptr) {
      fail(Errc::bad_cast, "object " + std::to_string(id_) + " is not a " + typeid(T).name());
    }
    return *p;
  }

 private:
  Node& deref() const {
    if (ptr_ == nullptr) {
      fail(Errc::no_local_copy, "object " + std::to_string(id_) + " (owned by rank " +
                                    std::to_string(proc_) + ") has no local copy");
    }
    return *ptr_;
  }

  GraphId id_ = BAD_ID;
  Rank proc_ = 0;
  Node* ptr_ = nullptr;
  bool managed_ = false;
};

}  // namespace graphcell::graph
