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

// Id-keyed maps of ObjRefs. Both implementations give stable references,
// auto-create a null ref on operator[], and visit entries in ascending id
// order, so they are interchangeable.

#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <unordered_map>
#include <vector>

#include "graphcell/graph/node.hpp"

namespace graphcell::graph {

namespace detail {

inline void check_key(GraphId id) {
  if (id == BAD_ID) fail(Errc::bad_id, "BAD_ID cannot key an object");
}

}  // namespace detail

/// Array-backed map for contiguous, or nearly contiguous, id ranges
/// starting near 0. Memory grows with the largest id used.
class DenseOMap {
 public:
  ObjRef& operator[](GraphId id) {
    detail::check_key(id);
    const auto idx = static_cast<std::size_t>(id);
    if (idx >= slots_.size()) {
      slots_.resize(idx + 1);
      present_.resize(idx + 1, false);
    }
    if (!present_[idx]) {
      present_[idx] = true;
      slots_[idx] = ObjRef(id);
      ++count_;
    }
    return slots_[idx];
  }

  const ObjRef* find(GraphId id) const noexcept {
    const auto idx = static_cast<std::size_t>(id);
    if (id == BAD_ID || idx >= slots_.size() || !present_[idx]) return nullptr;
    return &slots_[idx];
  }
  ObjRef* find(GraphId id) noexcept {
    return const_cast<ObjRef*>(static_cast<const DenseOMap*>(this)->find(id));
  }

  bool contains(GraphId id) const noexcept { return find(id) != nullptr; }
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  bool erase(GraphId id) {
    const auto idx = static_cast<std::size_t>(id);
    if (find(id) == nullptr) return false;
    slots_[idx] = ObjRef();
    present_[idx] = false;
    --count_;
    return true;
  }

  void clear() {
    slots_.clear();
    present_.clear();
    count_ = 0;
  }

  template <class F>
  void for_each(F&& f) {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (present_[i]) f(slots_[i]);
    }
  }
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (present_[i]) f(slots_[i]);
    }
  }

  std::vector<GraphId> keys() const {
    std::vector<GraphId> out;
    out.reserve(count_);
    for_each([&](const ObjRef& r) { out.push_back(r.id()); });
    return out;
  }

 private:
  std::deque<ObjRef> slots_;
  std::vector<bool> present_;
  std::size_t count_ = 0;
};

/// Hash map for sparse ids.
class HashedOMap {
 public:
  ObjRef& operator[](GraphId id) {
    detail::check_key(id);
    auto [it, fresh] = map_.try_emplace(id, id);
    return it->second;
  }

  const ObjRef* find(GraphId id) const noexcept {
    auto it = map_.find(id);
    return it == map_.end() ? nullptr : &it->second;
  }
  ObjRef* find(GraphId id) noexcept {
    auto it = map_.find(id);
    return it == map_.end() ? nullptr : &it->second;
  }

  bool contains(GraphId id) const noexcept { return map_.count(id) != 0; }
  std::size_t size() const noexcept { return map_.size(); }
  bool empty() const noexcept { return map_.empty(); }
  bool erase(GraphId id) { return map_.erase(id) != 0; }
  void clear() { map_.clear(); }

  template <class F>
  void for_each(F&& f) {
    for (GraphId id : keys()) f(map_.at(id));
  }
  template <class F>
  void for_each(F&& f) const {
    for (GraphId id : keys()) f(map_.at(id));
  }

  std::vector<GraphId> keys() const {
    std::vector<GraphId> out;
    out.reserve(map_.size());
    for (const auto& [id, ref] : map_) out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::unordered_map<GraphId, ObjRef> map_;
};

}  // namespace graphcell::graph
