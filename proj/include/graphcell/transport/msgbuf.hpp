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

// Message buffers bound to a group, with stream-style send manipulators:
//
//   MsgBuf b(group);
//   b << a << c << send(1, tag);     // blocking
//   b << x << isend(2, tag);         // asynchronous; b.wait() or ~MsgBuf waits
//   b.get(ANY_SOURCE, tag) >> a;

#pragma once

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "graphcell/codec/codec.hpp"
#include "graphcell/transport/group.hpp"

namespace graphcell::transport {

struct send {
  Rank dest;
  Tag tag = 0;
  send(Rank d, Tag t = 0) : dest(d), tag(t) {}
};

struct isend {
  Rank dest;
  Tag tag = 0;
  isend(Rank d, Tag t = 0) : dest(d), tag(t) {}
};

class MsgBuf : public codec::Buffer {
 public:
  explicit MsgBuf(Group& g) : group_(&g) {}
  MsgBuf(const MsgBuf&) = delete;
  MsgBuf& operator=(const MsgBuf&) = delete;
  MsgBuf(MsgBuf&& o) noexcept
      : codec::Buffer(std::move(o)),
        group_(o.group_),
        inflight_(std::move(o.inflight_)),
        last_source_(o.last_source_),
        last_tag_(o.last_tag_) {}

  ~MsgBuf() {
    // Implicit wait; failures here surface through the group's teardown.
    try {
      wait();
    } catch (...) {
    }
  }

  Group& group() const noexcept { return *group_; }

  /// Sends the current contents and empties the buffer. Blocks until the
  /// payload is queued at the receiver.
  MsgBuf& send_to(Rank dest, Tag tag) {
    SendHandle h = group_->transport().post(dest, tag, release());
    group_->transport().wait(h);
    return *this;
  }

  MsgBuf& isend_to(Rank dest, Tag tag) {
    inflight_.push_back(group_->transport().post(dest, tag, release()));
    return *this;
  }

  /// True once every asynchronous send from this buffer has completed.
  bool sent() {
    std::erase_if(inflight_, [](const SendHandle& h) { return h->done.load(); });
    return inflight_.empty();
  }

  void wait() {
    while (!inflight_.empty()) {
      group_->transport().wait(inflight_.back());
      inflight_.pop_back();
    }
  }

  /// Replaces the contents with the next message matching (source, tag).
  MsgBuf& get(Rank source = ANY_SOURCE, Tag tag = ANY_TAG) {
    Envelope e = group_->transport().receive(source, tag);
    assign(std::move(e.payload));
    last_source_ = e.source;
    last_tag_ = e.tag;
    return *this;
  }

  Rank last_source() const noexcept { return last_source_; }
  Tag last_tag() const noexcept { return last_tag_; }

  MsgBuf& reset() noexcept {
    codec::Buffer::reset();
    return *this;
  }

  template <class T>
  MsgBuf& operator<<(const T& v) {
    codec::Buffer::operator<<(v);
    return *this;
  }
  MsgBuf& operator<<(const send& s) { return send_to(s.dest, s.tag); }
  MsgBuf& operator<<(const isend& s) { return isend_to(s.dest, s.tag); }

  template <class T>
  MsgBuf& operator>>(T& v) {
    codec::Buffer::operator>>(v);
    return *this;
  }

 private:
  Group* group_;
  std::vector<SendHandle> inflight_;
  Rank last_source_ = ANY_SOURCE;
  Tag last_tag_ = ANY_TAG;
};

/// One MsgBuf per destination; disposal waits for every send.
class SendGroup {
 public:
  explicit SendGroup(Group& g) : group_(&g) {
    bufs_.reserve(g.nprocs());
    for (Rank r = 0; r < g.nprocs(); ++r) bufs_.emplace_back(g);
  }
  SendGroup(const SendGroup&) = delete;
  SendGroup& operator=(const SendGroup&) = delete;
  ~SendGroup() = default;  // each MsgBuf waits

  MsgBuf& operator[](Rank dest) { return bufs_.at(dest); }

  void isend(Rank dest, Tag tag) { bufs_.at(dest).isend_to(dest, tag); }

  /// Posts every buffer except our own.
  void isend_all(Tag tag) {
    for (Rank r = 0; r < group_->nprocs(); ++r) {
      if (r != group_->myid()) isend(r, tag);
    }
  }

  void wait() {
    for (auto& b : bufs_) b.wait();
  }

 private:
  Group* group_;
  std::vector<MsgBuf> bufs_;
};

/// All-to-all: outgoing[r] goes to rank r (own entry ignored); the result
/// holds one payload per source, own entry empty.
inline std::vector<codec::Buffer> exchange_all(Group& g, std::vector<codec::Buffer> outgoing,
                                               Tag tag) {
  const Rank n = g.nprocs();
  std::vector<codec::Buffer> incoming(n);
  if (n == 1) return incoming;
  outgoing.resize(n);
  SendGroup sg(g);
  for (Rank r = 0; r < n; ++r) {
    if (r == g.myid()) continue;
    sg[r].assign(outgoing[r].release());
    sg.isend(r, tag);
  }
  MsgBuf b(g);
  for (Rank i = 1; i < n; ++i) {
    b.get(ANY_SOURCE, tag);
    incoming[b.last_source()].assign(b.release());
  }
  return incoming;
}

}  // namespace graphcell::transport
