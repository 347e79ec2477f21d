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
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "graphcell/codec/path.hpp"
#include "graphcell/error.hpp"

namespace graphcell::codec {

/// Bookkeeping for one pack_graphnode / unpack_graphnode call. Lives on the
/// stack of that call; the Buffer only points at it while it runs.
struct GraphSession {
  const void* node_type = nullptr;  // identifies the declared node type
  // packing
  std::unordered_map<const void*, std::uint32_t> visited;
  std::vector<const void*> order;
  // unpacking
  std::vector<void*> nodes;
  void* (*make_node)(void* owner) = nullptr;
  void* owner = nullptr;
};

/// Append-only byte repository with a read cursor.
class Buffer {
 public:
  Buffer() = default;
  explicit Buffer(std::vector<std::byte> bytes) : data_(std::move(bytes)) {}

  // A copy carries the bytes and the cursor, never an active session.
  Buffer(const Buffer& o) : data_(o.data_), cursor_(o.cursor_) {}
  Buffer& operator=(const Buffer& o) {
    data_ = o.data_;
    cursor_ = o.cursor_;
    return *this;
  }
  Buffer(Buffer&& o) noexcept
      : data_(std::move(o.data_)), cursor_(std::exchange(o.cursor_, 0)) {}
  Buffer& operator=(Buffer&& o) noexcept {
    data_ = std::move(o.data_);
    cursor_ = std::exchange(o.cursor_, 0);
    return *this;
  }
  ~Buffer() = default;

  void append(std::span<const std::byte> bytes) {
    data_.insert(data_.end(), bytes.begin(), bytes.end());
  }
  void append_byte(std::byte b) { data_.push_back(b); }

  /// Consumes `n` bytes at the cursor. Throws BufferUnderflow (naming `path`)
  /// when fewer remain.
  std::span<const std::byte> read(std::size_t n, const Path& path = Path::root()) {
    if (n > remaining()) {
      fail(Errc::buffer_underflow,
           "need " + std::to_string(n) + " bytes, " + std::to_string(remaining()) +
               " remain at '" + path.str() + "'");
    }
    std::span<const std::byte> out(data_.data() + cursor_, n);
    cursor_ += n;
    return out;
  }

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t cursor() const noexcept { return cursor_; }
  std::size_t remaining() const noexcept { return data_.size() - cursor_; }
  std::span<const std::byte> bytes() const noexcept { return data_; }
  const std::vector<std::byte>& data() const noexcept { return data_; }

  /// Hands the bytes out and leaves the buffer empty.
  std::vector<std::byte> release() noexcept {
    cursor_ = 0;
    return std::exchange(data_, {});
  }

  void rewind() noexcept { cursor_ = 0; }
  Buffer& reset() noexcept {
    data_.clear();
    cursor_ = 0;
    return *this;
  }
  void assign(std::vector<std::byte> bytes) noexcept {
    data_ = std::move(bytes);
    cursor_ = 0;
  }

  template <class T>
  Buffer& operator<<(const T& value);
  template <class T>
  Buffer& operator>>(T& value);

  // graph sessions
  GraphSession* graph_session() const noexcept { return session_; }
  std::size_t visited_count() const noexcept {
    return session_ == nullptr ? 0 : session_->visited.size() + session_->nodes.size();
  }

  // Optional recorder of every primitive leaf path written by pack.
  void trace_paths(std::vector<std::string>* sink) noexcept { trace_ = sink; }
  std::vector<std::string>* path_trace() const noexcept { return trace_; }

 private:
  friend class SessionScope;

  std::vector<std::byte> data_;
  std::size_t cursor_ = 0;
  GraphSession* session_ = nullptr;
  std::vector<std::string>* trace_ = nullptr;
};

/// Installs a GraphSession on a buffer for the enclosing scope.
class SessionScope {
 public:
  SessionScope(Buffer& buf, GraphSession& session) : buf_(buf), prev_(buf.session_) {
    buf_.session_ = &session;
  }
  ~SessionScope() { buf_.session_ = prev_; }
  SessionScope(const SessionScope&) = delete;
  SessionScope& operator=(const SessionScope&) = delete;

 private:
  Buffer& buf_;
  GraphSession* prev_;
};

inline std::string to_hex(std::span<const std::byte> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::byte b : bytes) {
    auto v = std::to_integer<unsigned>(b);
    out += digits[v >> 4];
    out += digits[v & 0xf];
  }
  return out;
}

inline std::vector<std::byte> from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<std::byte> out;
  int hi = -1;
  for (char c : hex) {
    int v = nibble(c);
    if (v < 0) continue;  // separators
    if (hi < 0) {
      hi = v;
    } else {
      out.push_back(static_cast<std::byte>((hi << 4) | v));
      hi = -1;
    }
  }
  return out;
}

}  // namespace graphcell::codec
