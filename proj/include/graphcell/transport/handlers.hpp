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

// Registered slave procedures. Ids are dense in registration order and,
// like TypeIds, must be registered identically on every rank.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "graphcell/error.hpp"
#include "graphcell/registry/type_table.hpp"

namespace graphcell::transport {

class MsgBuf;

using HandlerId = std::uint32_t;

/// Reserved id telling a slave loop to exit.
inline constexpr HandlerId SHUTDOWN_HANDLER = 0xFFFFFFFFu;

/// A handler reads its arguments from the buffer and leaves its reply in it,
/// e.g. `args >> x >> y; args.reset() << x + y;`.
using Handler = std::function<void(MsgBuf&)>;

class HandlerRegistry {
 public:
  HandlerId add(std::string name, Handler fn) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return static_cast<HandlerId>(i);
    }
    names_.push_back(std::move(name));
    handlers_.push_back(std::move(fn));
    return static_cast<HandlerId>(handlers_.size() - 1);
  }

  bool contains(HandlerId id) const noexcept { return id < handlers_.size(); }
  std::size_t size() const noexcept { return handlers_.size(); }

  const Handler& at(HandlerId id) const {
    if (!contains(id)) fail(Errc::unknown_handler, "handler id " + std::to_string(id));
    return handlers_[id];
  }

  std::vector<std::string> entries() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < names_.size(); ++i) out.push_back(std::to_string(i) + ":" + names_[i]);
    return out;
  }

  static HandlerRegistry& global() {
    static HandlerRegistry reg;
    return reg;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Handler> handlers_;
};

inline HandlerId register_handler(std::string name, Handler fn) {
  return HandlerRegistry::global().add(std::move(name), std::move(fn));
}

/// Digest exchanged at group startup: global types and handlers.
inline std::uint64_t startup_digest() {
  std::vector<std::string> lines;
  for (auto& e : registry::TypeTable::global().entries()) lines.push_back("type " + e);
  for (auto& e : HandlerRegistry::global().entries()) lines.push_back("handler " + e);
  return registry::digest_lines(std::move(lines));
}

}  // namespace graphcell::transport
