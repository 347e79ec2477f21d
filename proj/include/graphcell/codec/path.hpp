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

#include <cstddef>
#include <string>
#include <string_view>

namespace graphcell::codec {

/// Descriptor path naming a leaf inside a composite value: "" for the root,
/// ".name" per field, "[i]" per element. Paths are built as a chain of stack
/// frames so descending costs nothing until `str()` is asked for.
class Path {
 public:
  static constexpr Path root() noexcept { return Path(); }

  constexpr Path field(std::string_view name) const noexcept {
    return Path(this, Kind::field, name, 0);
  }
  constexpr Path element(std::size_t index) const noexcept {
    return Path(this, Kind::element, {}, index);
  }

  bool is_root() const noexcept { return kind_ == Kind::root; }

  std::string str() const {
    std::string out;
    append_to(out);
    return out;
  }

 private:
  enum class Kind { root, field, element };

  constexpr Path() noexcept = default;
  constexpr Path(const Path* parent, Kind kind, std::string_view name,
                 std::size_t index) noexcept
      : parent_(parent), kind_(kind), name_(name), index_(index) {}

  void append_to(std::string& out) const {
    if (parent_ != nullptr) parent_->append_to(out);
    switch (kind_) {
      case Kind::root:
        break;
      case Kind::field:
        out += '.';
        out += name_;
        break;
      case Kind::element:
        out += '[';
        out += std::to_string(index_);
        out += ']';
        break;
    }
  }

  const Path* parent_ = nullptr;
  Kind kind_ = Kind::root;
  std::string_view name_;
  std::size_t index_ = 0;
};

}  // namespace graphcell::codec
