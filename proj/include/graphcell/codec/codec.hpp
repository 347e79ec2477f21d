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

// Canonical binary encoding of primitive and composite values.
//
// Every packable type T has a Codec<T> specialisation with
//
//   static void pack(Buffer&, const Path&, const T&);
//   static void unpack(Buffer&, const Path&, T&);
//   static void describe(Description&, const Path&, const T&);   // optional
//
// Composite types opt in by exposing a static member template
//
//   template <class Self, class V> static void fields(Self& self, V& v) {
//     Base::fields(self, v);       // bases first
//     v("x", self.x);
//     v("y", self.y);
//   }
//
// which every action (pack, unpack, describe) walks in declaration order.
// The wire layout is documented in docs/wire-format.md.

#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "graphcell/codec/buffer.hpp"
#include "graphcell/codec/path.hpp"
#include "graphcell/error.hpp"

namespace graphcell::codec {

/// One primitive leaf of a value, in pack order.
struct Entry {
  std::string path;
  std::string type;
  std::string value;

  friend bool operator==(const Entry&, const Entry&) = default;
};
using Description = std::vector<Entry>;

template <class T, class Enable = void>
struct Codec;

/// Link fields of type T* are rejected unless T opts into the graphnode
/// protocol by specialising this to true.
template <class T>
inline constexpr bool graphnode_policy = false;

inline constexpr std::uint32_t null_ordinal = 0xFFFFFFFFu;

namespace detail {

struct FieldProbe {
  template <class F>
  void operator()(std::string_view, F&) {}
};

template <class T>
inline constexpr char type_key_v = 0;

}  // namespace detail

template <class T>
const void* type_key() noexcept {
  return &detail::type_key_v<T>;
}

template <class T>
concept Described = requires(T& t, const T& ct, detail::FieldProbe& probe) {
  T::fields(t, probe);
  T::fields(ct, probe);
};

template <class T>
concept Primitive = std::is_arithmetic_v<T> || std::is_enum_v<T>;

// ---------------------------------------------------------------------------
// Free-function entry points.

template <class T>
void pack(Buffer& buf, const Path& path, const T& value) {
  Codec<T>::pack(buf, path, value);
}

template <class T>
void unpack(Buffer& buf, const Path& path, T& value) {
  Codec<T>::unpack(buf, path, value);
}

template <class T>
T unpack_as(Buffer& buf, const Path& path = Path::root()) {
  T value{};
  Codec<T>::unpack(buf, path, value);
  return value;
}

template <class T>
void describe_into(Description& out, const Path& path, const T& value) {
  if constexpr (requires { Codec<T>::describe(out, path, value); }) {
    Codec<T>::describe(out, path, value);
  } else {
    out.push_back({path.str(), "opaque", "?"});
  }
}

template <class T>
Description describe(const T& value) {
  Description out;
  describe_into(out, Path::root(), value);
  return out;
}

/// Encoded form of a single value.
template <class T>
std::vector<std::byte> encode(const T& value) {
  Buffer buf;
  pack(buf, Path::root(), value);
  return buf.release();
}

template <class T>
std::size_t encoded_size(const T& value) {
  return encode(value).size();
}

template <class T>
T decode(std::span<const std::byte> bytes) {
  Buffer buf(std::vector<std::byte>(bytes.begin(), bytes.end()));
  return unpack_as<T>(buf);
}

/// Packs `value` at the root path; returns the buffer so calls chain.
template <class T>
Buffer& stream_pack(Buffer& buf, const T& value) {
  pack(buf, Path::root(), value);
  return buf;
}

template <class T>
Buffer& Buffer::operator<<(const T& value) {
  pack(*this, Path::root(), value);
  return *this;
}

template <class T>
Buffer& Buffer::operator>>(T& value) {
  unpack(*this, Path::root(), value);
  return *this;
}

// ---------------------------------------------------------------------------
// Big-endian fixed-width helpers.

template <std::unsigned_integral U>
void put_be(Buffer& buf, U v) {
  std::array<std::byte, sizeof(U)> raw;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    raw[sizeof(U) - 1 - i] = static_cast<std::byte>(v & 0xffu);
    if constexpr (sizeof(U) > 1) v = static_cast<U>(v >> 8);
  }
  buf.append(raw);
}

template <std::unsigned_integral U>
U get_be(Buffer& buf, const Path& path) {
  auto raw = buf.read(sizeof(U), path);
  U v = 0;
  for (std::byte b : raw) {
    if constexpr (sizeof(U) > 1) v = static_cast<U>(v << 8);
    v = static_cast<U>(v | std::to_integer<U>(b));
  }
  return v;
}

inline void put_count(Buffer& buf, std::size_t n, const Path& path) {
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    fail(Errc::malformed_container, "count exceeds 32 bits at '" + path.str() + "'");
  }
  put_be<std::uint32_t>(buf, static_cast<std::uint32_t>(n));
}

/// Reads a count prefix and checks it against the bytes left, given each
/// element needs at least `min_element_bytes`.
inline std::uint32_t get_count(Buffer& buf, const Path& path, std::size_t min_element_bytes) {
  auto n = get_be<std::uint32_t>(buf, path);
  if (min_element_bytes > 0 && n > buf.remaining() / min_element_bytes) {
    fail(Errc::malformed_container, "count " + std::to_string(n) + " exceeds " +
                                        std::to_string(buf.remaining()) +
                                        " remaining bytes at '" + path.str() + "'");
  }
  return n;
}

namespace detail {

template <class T>
constexpr std::size_t min_wire_size() {
  if constexpr (std::is_same_v<T, bool>) {
    return 1;
  } else if constexpr (std::is_enum_v<T>) {
    return sizeof(std::underlying_type_t<T>);
  } else if constexpr (std::is_arithmetic_v<T>) {
    return sizeof(T);
  } else if constexpr (std::is_empty_v<T>) {
    return 0;
  } else {
    return 1;
  }
}

template <class T>
std::string primitive_name() {
  if constexpr (std::is_enum_v<T>) {
    return primitive_name<std::underlying_type_t<T>>();
  } else if constexpr (std::is_same_v<T, bool>) {
    return "bool";
  } else if constexpr (std::is_floating_point_v<T>) {
    return sizeof(T) == 4 ? "f32" : "f64";
  } else {
    return std::string(std::is_signed_v<T> && !std::is_same_v<T, char> ? "i" : "u") +
           std::to_string(sizeof(T) * 8);
  }
}

template <class T>
std::string primitive_text(T v) {
  if constexpr (std::is_enum_v<T>) {
    return primitive_text(static_cast<std::underlying_type_t<T>>(v));
  } else if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_same_v<T, char>) {
    return std::to_string(static_cast<unsigned>(static_cast<unsigned char>(v)));
  } else {
    std::array<char, 64> text{};
    auto res = std::to_chars(text.data(), text.data() + text.size(), v);
    return std::string(text.data(), res.ptr);
  }
}

template <class T>
using wire_uint_t = std::conditional_t<
    sizeof(T) == 1, std::uint8_t,
    std::conditional_t<sizeof(T) == 2, std::uint16_t,
                       std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;

inline void trace(Buffer& buf, const Path& path) {
  if (auto* sink = buf.path_trace()) sink->push_back(path.str());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Primitives: fixed-width big-endian integers, IEEE-754 floats, 1-byte bools.

template <Primitive T>
struct Codec<T> {
  static_assert(sizeof(T) == 1 || sizeof(T) == 2 || sizeof(T) == 4 || sizeof(T) == 8,
                "unsupported primitive width");
  using Wire = detail::wire_uint_t<T>;

  static void pack(Buffer& buf, const Path& path, const T& v) {
    detail::trace(buf, path);
    if constexpr (std::is_same_v<T, bool>) {
      buf.append_byte(v ? std::byte{1} : std::byte{0});
    } else if constexpr (std::is_floating_point_v<T>) {
      put_be<Wire>(buf, std::bit_cast<Wire>(v));
    } else {
      put_be<Wire>(buf, static_cast<Wire>(v));
    }
  }

  static void unpack(Buffer& buf, const Path& path, T& v) {
    if constexpr (std::is_same_v<T, bool>) {
      auto raw = std::to_integer<unsigned>(buf.read(1, path)[0]);
      if (raw > 1) {
        fail(Errc::malformed_container,
             "bool byte " + std::to_string(raw) + " at '" + path.str() + "'");
      }
      v = raw == 1;
    } else if constexpr (std::is_floating_point_v<T>) {
      v = std::bit_cast<T>(get_be<Wire>(buf, path));
    } else {
      v = static_cast<T>(get_be<Wire>(buf, path));
    }
  }

  static void describe(Description& out, const Path& path, const T& v) {
    out.push_back({path.str(), detail::primitive_name<T>(), detail::primitive_text(v)});
  }
};

// ---------------------------------------------------------------------------
// Strings and containers.

template <>
struct Codec<std::string> {
  static void pack(Buffer& buf, const Path& path, const std::string& s) {
    detail::trace(buf, path);
    put_count(buf, s.size(), path);
    buf.append(std::as_bytes(std::span(s.data(), s.size())));
  }
  static void unpack(Buffer& buf, const Path& path, std::string& s) {
    auto n = get_count(buf, path, 1);
    auto raw = buf.read(n, path);
    s.assign(reinterpret_cast<const char*>(raw.data()), raw.size());
  }
  static void describe(Description& out, const Path& path, const std::string& s) {
    out.push_back({path.str(), "string", s});
  }
};

template <class T, class A>
struct Codec<std::vector<T, A>> {
  static void pack(Buffer& buf, const Path& path, const std::vector<T, A>& v) {
    put_count(buf, v.size(), path);
    for (std::size_t i = 0; i < v.size(); ++i) {
      Path p = path.element(i);
      Codec<T>::pack(buf, p, v[i]);
    }
  }
  static void unpack(Buffer& buf, const Path& path, std::vector<T, A>& v) {
    auto n = get_count(buf, path, detail::min_wire_size<T>());
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      Path p = path.element(i);
      Codec<T>::unpack(buf, p, v[i]);
    }
  }
  static void describe(Description& out, const Path& path, const std::vector<T, A>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      Path p = path.element(i);
      describe_into(out, p, v[i]);
    }
  }
};

template <class A>
struct Codec<std::vector<bool, A>> {
  static void pack(Buffer& buf, const Path& path, const std::vector<bool, A>& v) {
    put_count(buf, v.size(), path);
    for (std::size_t i = 0; i < v.size(); ++i) {
      Path p = path.element(i);
      Codec<bool>::pack(buf, p, v[i]);
    }
  }
  static void unpack(Buffer& buf, const Path& path, std::vector<bool, A>& v) {
    auto n = get_count(buf, path, 1);
    v.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      Path p = path.element(i);
      bool b = false;
      Codec<bool>::unpack(buf, p, b);
      v[i] = b;
    }
  }
  static void describe(Description& out, const Path& path, const std::vector<bool, A>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      Path p = path.element(i);
      Codec<bool>::describe(out, p, v[i]);
    }
  }
};

namespace detail {

// Fixed-size arrays, packed element-wise with no count prefix.
template <class T, std::size_t N, class Arr>
struct FixedArrayCodec {
  static void pack(Buffer& buf, const Path& path, const Arr& a) {
    for (std::size_t i = 0; i < N; ++i) {
      Path p = path.element(i);
      Codec<T>::pack(buf, p, a[i]);
    }
  }
  static void unpack(Buffer& buf, const Path& path, Arr& a) {
    for (std::size_t i = 0; i < N; ++i) {
      Path p = path.element(i);
      Codec<T>::unpack(buf, p, a[i]);
    }
  }
  static void describe(Description& out, const Path& path, const Arr& a) {
    for (std::size_t i = 0; i < N; ++i) {
      Path p = path.element(i);
      describe_into(out, p, a[i]);
    }
  }
};

}  // namespace detail

template <class T, std::size_t N>
struct Codec<std::array<T, N>> : detail::FixedArrayCodec<T, N, std::array<T, N>> {};

template <class T, std::size_t N>
struct Codec<T[N]> : detail::FixedArrayCodec<T, N, T[N]> {};

template <class T>
struct Codec<std::optional<T>> {
  static void pack(Buffer& buf, const Path& path, const std::optional<T>& v) {
    Path flag = path.field("has_value");
    Codec<bool>::pack(buf, flag, v.has_value());
    if (v) {
      Path p = path.field("value");
      Codec<T>::pack(buf, p, *v);
    }
  }
  static void unpack(Buffer& buf, const Path& path, std::optional<T>& v) {
    Path flag = path.field("has_value");
    bool present = false;
    Codec<bool>::unpack(buf, flag, present);
    if (!present) {
      v.reset();
      return;
    }
    if (!v) v.emplace();
    Path p = path.field("value");
    Codec<T>::unpack(buf, p, *v);
  }
  static void describe(Description& out, const Path& path, const std::optional<T>& v) {
    Path flag = path.field("has_value");
    Codec<bool>::describe(out, flag, v.has_value());
    if (v) {
      Path p = path.field("value");
      describe_into(out, p, *v);
    }
  }
};

template <class A, class B>
struct Codec<std::pair<A, B>> {
  static void pack(Buffer& buf, const Path& path, const std::pair<A, B>& v) {
    Path f = path.field("first");
    Codec<A>::pack(buf, f, v.first);
    Path s = path.field("second");
    Codec<B>::pack(buf, s, v.second);
  }
  static void unpack(Buffer& buf, const Path& path, std::pair<A, B>& v) {
    Path f = path.field("first");
    Codec<A>::unpack(buf, f, v.first);
    Path s = path.field("second");
    Codec<B>::unpack(buf, s, v.second);
  }
  static void describe(Description& out, const Path& path, const std::pair<A, B>& v) {
    Path f = path.field("first");
    describe_into(out, f, v.first);
    Path s = path.field("second");
    describe_into(out, s, v.second);
  }
};

template <class K, class V, class C, class A>
struct Codec<std::map<K, V, C, A>> {
  using Map = std::map<K, V, C, A>;
  static void pack(Buffer& buf, const Path& path, const Map& m) {
    put_count(buf, m.size(), path);
    std::size_t i = 0;
    for (const auto& [k, v] : m) {
      Path e = path.element(i++);
      Path kp = e.field("key");
      Codec<K>::pack(buf, kp, k);
      Path vp = e.field("value");
      Codec<V>::pack(buf, vp, v);
    }
  }
  static void unpack(Buffer& buf, const Path& path, Map& m) {
    auto n = get_count(buf, path, detail::min_wire_size<K>());
    m.clear();
    for (std::size_t i = 0; i < n; ++i) {
      Path e = path.element(i);
      Path kp = e.field("key");
      K k{};
      Codec<K>::unpack(buf, kp, k);
      Path vp = e.field("value");
      V v{};
      Codec<V>::unpack(buf, vp, v);
      m.insert_or_assign(std::move(k), std::move(v));
    }
  }
  static void describe(Description& out, const Path& path, const Map& m) {
    std::size_t i = 0;
    for (const auto& [k, v] : m) {
      Path e = path.element(i++);
      Path kp = e.field("key");
      describe_into(out, kp, k);
      Path vp = e.field("value");
      describe_into(out, vp, v);
    }
  }
};

// ---------------------------------------------------------------------------
// Composite types with a field descriptor.

namespace detail {

struct PackFields {
  Buffer& buf;
  const Path& path;
  template <class F>
  void operator()(std::string_view name, const F& field) {
    Path p = path.field(name);
    Codec<std::remove_cv_t<F>>::pack(buf, p, field);
  }
};

struct UnpackFields {
  Buffer& buf;
  const Path& path;
  template <class F>
  void operator()(std::string_view name, F& field) {
    Path p = path.field(name);
    Codec<std::remove_cv_t<F>>::unpack(buf, p, field);
  }
};

struct DescribeFields {
  Description& out;
  const Path& path;
  template <class F>
  void operator()(std::string_view name, const F& field) {
    Path p = path.field(name);
    describe_into(out, p, field);
  }
};

}  // namespace detail

template <Described T>
struct Codec<T> {
  static void pack(Buffer& buf, const Path& path, const T& v) {
    detail::PackFields visit{buf, path};
    T::fields(v, visit);
  }
  static void unpack(Buffer& buf, const Path& path, T& v) {
    detail::UnpackFields visit{buf, path};
    T::fields(v, visit);
  }
  static void describe(Description& out, const Path& path, const T& v) {
    detail::DescribeFields visit{out, path};
    T::fields(v, visit);
  }
};

// ---------------------------------------------------------------------------
// Raw links. Only legal for node types under the graphnode protocol, and only
// inside a pack_graphnode / unpack_graphnode session (see graphnode.hpp).

template <class T>
struct Codec<T*> {
  using Node = std::remove_cv_t<T>;

  static GraphSession& session_for(Buffer& buf, const Path& path) {
    if constexpr (!graphnode_policy<Node>) {
      fail(Errc::unsupported_field,
           "raw pointer with no graphnode policy at '" + path.str() + "'");
    } else {
      GraphSession* s = buf.graph_session();
      if (s == nullptr || s->node_type != type_key<Node>()) {
        fail(Errc::unsupported_field,
             "graphnode link outside a graph session at '" + path.str() + "'");
      }
      return *s;
    }
  }

  static void pack(Buffer& buf, const Path& path, T* const& link) {
    GraphSession& s = session_for(buf, path);
    std::uint32_t ordinal = null_ordinal;
    if (link != nullptr) {
      const void* key = static_cast<const void*>(link);
      auto [it, fresh] = s.visited.try_emplace(key, static_cast<std::uint32_t>(s.order.size()));
      if (fresh) {
        if (s.order.size() >= null_ordinal) {
          fail(Errc::malformed_container, "graph exceeds 2^32-1 nodes");
        }
        s.order.push_back(key);
      }
      ordinal = it->second;
    }
    put_be<std::uint32_t>(buf, ordinal);
  }

  static void unpack(Buffer& buf, const Path& path, T*& link) {
    GraphSession& s = session_for(buf, path);
    auto ordinal = get_be<std::uint32_t>(buf, path);
    if (ordinal == null_ordinal) {
      link = nullptr;
    } else if (ordinal < s.nodes.size()) {
      link = static_cast<T*>(s.nodes[ordinal]);
    } else if (ordinal == s.nodes.size()) {
      void* fresh = s.make_node(s.owner);
      s.nodes.push_back(fresh);
      link = static_cast<T*>(fresh);
    } else {
      fail(Errc::dangling_backref, "ordinal " + std::to_string(ordinal) + " with only " +
                                       std::to_string(s.nodes.size()) + " nodes seen at '" +
                                       path.str() + "'");
    }
  }

  static void describe(Description& out, const Path& path, T* const& link) {
    out.push_back({path.str(), "link", link == nullptr ? "null" : "node"});
  }
};

}  // namespace graphcell::codec
