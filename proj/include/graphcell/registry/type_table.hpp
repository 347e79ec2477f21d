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

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <typeindex>
#include <typeinfo>
#include <unordered_map>
#include <vector>

#include "graphcell/error.hpp"
#include "graphcell/registry/object.hpp"

namespace graphcell::registry {

using TypeId = std::uint32_t;

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view text,
                                std::uint64_t h = 0xcbf29ce484222325ull) noexcept {
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Hash of a set of lines: sorted, joined with '\n', FNV-1a.
inline std::uint64_t digest_lines(std::vector<std::string> lines) {
  std::sort(lines.begin(), lines.end());
  std::string joined;
  for (const auto& l : lines) {
    joined += l;
    joined += '\n';
  }
  return fnv1a64(joined);
}

/// Archetype database: one default-constructed exemplar per dense TypeId.
/// Registration happens at startup, in the same order on every process;
/// afterwards the table is read-only.
class TypeTable {
 public:
  TypeTable() = default;
  TypeTable(const TypeTable&) = delete;
  TypeTable& operator=(const TypeTable&) = delete;

  /// Returns the id of T, assigning size-before-insert on first registration.
  template <class T>
  TypeId register_type(std::string name = typeid(T).name()) {
    static_assert(std::is_base_of_v<Object, T>, "registered types derive from Object");
    return register_type(std::make_unique<T>(), std::move(name));
  }

  TypeId register_type(std::unique_ptr<Object> archetype, std::string name) {
    const Object& a = *archetype;
    std::type_index key(typeid(a));
    if (auto it = ids_.find(key); it != ids_.end()) return it->second;
    auto t = static_cast<TypeId>(archetypes_.size());
    ids_.emplace(key, t);
    archetypes_.push_back(std::move(archetype));
    names_.push_back(std::move(name));
    return t;
  }

  std::size_t size() const noexcept { return archetypes_.size(); }
  bool contains(TypeId t) const noexcept { return t < archetypes_.size(); }

  const Object& lookup(TypeId t) const {
    check(t);
    return *archetypes_[t];
  }

  const std::string& name(TypeId t) const {
    check(t);
    return names_[t];
  }

  std::unique_ptr<Object> make_by_id(TypeId t) const { return lookup(t).lnew(); }

  std::optional<TypeId> find(const Object& o) const {
    auto it = ids_.find(std::type_index(typeid(o)));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  template <class T>
  std::optional<TypeId> find() const {
    auto it = ids_.find(std::type_index(typeid(T)));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  TypeId type_of(const Object& o) const {
    if (auto t = find(o)) return *t;
    fail(Errc::unknown_type_id, std::string("unregistered type ") + typeid(o).name());
  }

  template <class T>
  TypeId id_of() const {
    if (auto t = find<T>()) return *t;
    fail(Errc::unknown_type_id, std::string("unregistered type ") + typeid(T).name());
  }

  /// "id:name" per entry.
  std::vector<std::string> entries() const {
    std::vector<std::string> out;
    for (std::size_t t = 0; t < names_.size(); ++t) {
      out.push_back(std::to_string(t) + ":" + names_[t]);
    }
    return out;
  }

  std::uint64_t digest() const { return digest_lines(entries()); }

  /// The process-wide table used by graphs and group startup by default.
  static TypeTable& global() {
    static TypeTable table;
    return table;
  }

 private:
  void check(TypeId t) const {
    if (t >= archetypes_.size()) {
      fail(Errc::unknown_type_id, "type id " + std::to_string(t) + " not registered (table size " +
                                      std::to_string(archetypes_.size()) + ")");
    }
  }

  std::vector<std::unique_ptr<Object>> archetypes_;
  std::vector<std::string> names_;
  std::unordered_map<std::type_index, TypeId> ids_;
};

inline std::unique_ptr<Object> clone_of(const Object& v) { return v.clone(); }

}  // namespace graphcell::registry
