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

// Packing of linked structures under the graphnode protocol: every link is
// either null or points at one valid node of the declared type N.
//
// Wire: u32 root ordinal (or null_ordinal), then each node's payload once, in
// first-visit order. Inside a payload each link is a u32 ordinal: the next
// unused ordinal introduces a new node, a smaller one is a back-reference.
// Nodes are walked through an explicit queue, so deep or cyclic graphs never
// recurse.

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "graphcell/codec/codec.hpp"

namespace graphcell::codec {

/// Owns the nodes reconstructed by unpack_graphnode. Node 0 is the root.
template <class N>
class NodeGraph {
 public:
  N* root() const noexcept { return nodes_.empty() ? nullptr : nodes_.front().get(); }
  std::size_t size() const noexcept { return nodes_.size(); }
  N& node(std::size_t ordinal) const { return *nodes_.at(ordinal); }

 private:
  template <class M>
  friend NodeGraph<M> unpack_graphnode(Buffer& buf);

  static void* make(void* owner) {
    auto* self = static_cast<NodeGraph*>(owner);
    self->nodes_.push_back(std::make_unique<N>());
    return self->nodes_.back().get();
  }

  std::vector<std::unique_ptr<N>> nodes_;
};

template <class N>
void pack_graphnode(Buffer& buf, const N* root) {
  static_assert(graphnode_policy<N>, "node type must declare graphnode_policy");
  GraphSession session;
  session.node_type = type_key<N>();
  SessionScope scope(buf, session);

  const Path top = Path::root();
  Codec<N*>::pack(buf, top, const_cast<N* const&>(root));
  for (std::size_t k = 0; k < session.order.size(); ++k) {
    const N& node = *static_cast<const N*>(session.order[k]);
    Path p = top.element(k);
    Codec<N>::pack(buf, p, node);
  }
}

template <class N>
NodeGraph<N> unpack_graphnode(Buffer& buf) {
  static_assert(graphnode_policy<N>, "node type must declare graphnode_policy");
  NodeGraph<N> graph;
  GraphSession session;
  session.node_type = type_key<N>();
  session.make_node = &NodeGraph<N>::make;
  session.owner = &graph;
  SessionScope scope(buf, session);

  const Path top = Path::root();
  N* root = nullptr;
  Codec<N*>::unpack(buf, top, root);
  for (std::size_t k = 0; k < session.nodes.size(); ++k) {
    Path p = top.element(k);
    Codec<N>::unpack(buf, p, *static_cast<N*>(session.nodes[k]));
  }
  return graph;
}

}  // namespace graphcell::codec
