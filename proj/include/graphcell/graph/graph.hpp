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

// Distributed object graph. Every rank holds an ObjRef for every object;
// payloads live on their owner, plus read-only cached copies of remote
// neighbours after prepare_neighbours.
//
// All collectives must be called by every rank in the same order. Each one
// takes a fresh tag from the group and starts its messages with an
// operation code, so a mismatched sequence fails with ProtocolViolation.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "graphcell/codec/codec.hpp"
#include "graphcell/error.hpp"
#include "graphcell/graph/node.hpp"
#include "graphcell/graph/omap.hpp"
#include "graphcell/graph/partition.hpp"
#include "graphcell/registry/type_table.hpp"
#include "graphcell/transport/group.hpp"
#include "graphcell/transport/msgbuf.hpp"

namespace graphcell::graph {

using registry::TypeId;
using transport::Tag;

/// Type and out-neighbours of one object, replicated on every rank by
/// distribute_objects.
struct TopologyEntry {
  TypeId type = 0;
  std::vector<GraphId> nbrs;
};

/// Counts of requests refused because they named BAD_ID.
struct Diagnostics {
  std::uint64_t refused_objects = 0;
  std::uint64_t refused_edges = 0;
};

namespace detail {

enum class Op : std::uint32_t {
  distribute = 1,
  gather = 2,
  migrate = 3,
  prepare = 4,
  report = 5,
  assign = 6,
};

inline const char* op_name(std::uint32_t op) {
  switch (op) {
    case 1: return "distribute_objects";
    case 2: return "gather";
    case 3: return "migrate";
    case 4: return "prepare_neighbours";
    case 5: return "report";
    case 6: return "assign";
    default: return "unknown";
  }
}

inline void put_op(codec::Buffer& b, Op op) { b << static_cast<std::uint32_t>(op); }

inline void expect_op(codec::Buffer& b, Op op, Rank from) {
  std::uint32_t got = 0;
  b >> got;
  if (got != static_cast<std::uint32_t>(op)) {
    fail(Errc::protocol_violation, std::string("collective mismatch: expected ") +
                                       op_name(static_cast<std::uint32_t>(op)) + ", rank " +
                                       std::to_string(from) + " sent " + op_name(got));
  }
}

inline void put_count(codec::Buffer& b, std::size_t n) { codec::put_count(b, n, codec::Path::root()); }
inline std::uint32_t get_count(codec::Buffer& b, std::size_t min_bytes) {
  return codec::get_count(b, codec::Path::root(), min_bytes);
}

}  // namespace detail

template <class Map = DenseOMap>
class BasicGraph {
  using Table = std::unordered_map<GraphId, TopologyEntry>;

 public:
  using map_type = Map;
  using Move = std::pair<GraphId, Rank>;

  /// Iterates the local list, yielding ObjRef&.
  class iterator {
   public:
    using value_type = ObjRef;
    using difference_type = std::ptrdiff_t;
    iterator() = default;
    explicit iterator(std::vector<ObjRef*>::const_iterator it) : it_(it) {}
    ObjRef& operator*() const { return **it_; }
    ObjRef* operator->() const { return *it_; }
    iterator& operator++() {
      ++it_;
      return *this;
    }
    iterator operator++(int) {
      iterator t = *this;
      ++it_;
      return t;
    }
    bool operator==(const iterator&) const = default;

   private:
    std::vector<ObjRef*>::const_iterator it_;
  };

  explicit BasicGraph(transport::Group& g,
                      const registry::TypeTable& types = registry::TypeTable::global())
      : group_(&g), types_(&types), topo_(std::make_shared<Table>()) {}

  /// Deep copy: managed payloads are cloned, the replicated topology shared.
  BasicGraph(const BasicGraph& o)
      : group_(o.group_),
        types_(o.types_),
        objects_(o.objects_),
        topo_(o.topo_),
        distributed_(o.distributed_),
        diag_(o.diag_),
        plan_(o.plan_) {
    rebuild_local_list();
  }
  BasicGraph& operator=(const BasicGraph& o) {
    if (this != &o) {
      BasicGraph tmp(o);
      swap(tmp);
    }
    return *this;
  }
  BasicGraph(BasicGraph&&) noexcept = default;
  BasicGraph& operator=(BasicGraph&&) noexcept = default;

  void swap(BasicGraph& o) noexcept {
    using std::swap;
    swap(group_, o.group_);
    swap(types_, o.types_);
    swap(objects_, o.objects_);
    swap(local_, o.local_);
    swap(topo_, o.topo_);
    swap(distributed_, o.distributed_);
    swap(diag_, o.diag_);
    swap(plan_, o.plan_);
    swap(last_neighbour_tag_, o.last_neighbour_tag_);
  }
  friend void swap(BasicGraph& a, BasicGraph& b) noexcept { a.swap(b); }

  transport::Group& group() const noexcept { return *group_; }
  const registry::TypeTable& types() const noexcept { return *types_; }
  Rank myid() const noexcept { return group_->myid(); }
  Rank nprocs() const noexcept { return group_->nprocs(); }

  Map& objects() noexcept { return objects_; }
  const Map& objects() const noexcept { return objects_; }
  /// Auto-creating lookup.
  ObjRef& operator[](GraphId id) { return objects_[id]; }
  const ObjRef* find(GraphId id) const noexcept { return objects_.find(id); }

  iterator begin() const { return iterator(local_.begin()); }
  iterator end() const { return iterator(local_.end()); }
  std::size_t size() const noexcept { return local_.size(); }
  bool empty() const noexcept { return local_.empty(); }
  const std::vector<ObjRef*>& local_list() const noexcept { return local_; }

  const Diagnostics& diagnostics() const noexcept { return diag_; }
  bool distributed() const noexcept { return distributed_; }
  /// Tag used by the most recent prepare_neighbours.
  std::optional<Tag> last_neighbour_tag() const noexcept { return last_neighbour_tag_; }

  // -------------------------------------------------------------------------
  // construction

  /// Adds a fresh object of type `type` hosted here. BAD_ID is refused: the
  /// graph is unchanged, a null ref returned and the refusal counted.
  ObjRef& add_object(TypeId type, GraphId id) {
    if (id == BAD_ID) {
      ++diag_.refused_objects;
      refused_ = ObjRef();
      return refused_;
    }
    if (const ObjRef* existing = objects_.find(id); existing && !existing->nullref()) {
      fail(Errc::duplicate_id, "object " + std::to_string(id) + " already exists");
    }
    auto node = make_node(type);
    ObjRef& r = objects_[id];
    r.addref(std::move(node));
    r.set_proc(myid());
    plan_.reset();
    auto pos = std::lower_bound(local_.begin(), local_.end(), id,
                                [](const ObjRef* a, GraphId b) { return a->id() < b; });
    local_.insert(pos, &r);
    return r;
  }
  ObjRef& add_object(const Node& archetype, GraphId id) {
    return add_object(types_->type_of(archetype), id);
  }
  template <class T>
  ObjRef& add_object(GraphId id) {
    return add_object(types_->template id_of<T>(), id);
  }

  /// Appends `to` to from's neighbour list; BAD_ID is refused and counted.
  /// Edges added after distribute_objects are not seen by other ranks until
  /// the graph is distributed again.
  bool add_edge(ObjRef& from, GraphId to) {
    Node& n = *from;
    if (!n.push_back(to)) {
      ++diag_.refused_edges;
      return false;
    }
    plan_.reset();
    return true;
  }
  bool add_edge(ObjRef& from, const ObjRef& to) { return add_edge(from, to.id()); }
  bool add_edge(GraphId from, GraphId to) {
    ObjRef* f = objects_.find(from);
    if (f == nullptr) fail(Errc::no_local_copy, "object " + std::to_string(from) + " is unknown");
    return add_edge(*f, to);
  }

  /// Type and neighbours as this rank knows them: the replicated table once
  /// distributed, the local payload before that.
  std::optional<TypeId> type_of(GraphId id) const {
    if (distributed_) {
      auto it = topo_->find(id);
      if (it != topo_->end()) return it->second.type;
      return std::nullopt;
    }
    const ObjRef* r = objects_.find(id);
    if (r == nullptr || r->nullref()) return std::nullopt;
    return types_->type_of(*r->get());
  }
  const std::vector<GraphId>* neighbours_of(GraphId id) const {
    if (distributed_) {
      auto it = topo_->find(id);
      return it == topo_->end() ? nullptr : &it->second.nbrs;
    }
    const ObjRef* r = objects_.find(id);
    if (r == nullptr || r->nullref()) return nullptr;
    return &r->get()->neighbours();
  }

  // -------------------------------------------------------------------------
  // local bookkeeping

  /// Local list := refs hosted here with an owned payload, by ascending id.
  void rebuild_local_list() {
    local_.clear();
    const Rank me = myid();
    objects_.for_each([&](ObjRef& r) {
      if (r.proc() == me && !r.nullref() && r.managed()) local_.push_back(&r);
    });
  }

  /// Drops payloads of objects hosted elsewhere.
  void clear_non_local() {
    const Rank me = myid();
    objects_.for_each([&](ObjRef& r) {
      if (r.proc() != me) r.nullify();
    });
  }

  /// One line per known object, by id: "id proc type neighbour-ids...".
  std::string dump() const {
    std::ostringstream os;
    objects_.for_each([&](const ObjRef& r) {
      auto type = type_of(r.id());
      const auto* nbrs = neighbours_of(r.id());
      if (!type || nbrs == nullptr) return;
      os << r.id() << ' ' << r.proc() << ' ' << *type;
      for (GraphId n : *nbrs) os << ' ' << n;
      os << '\n';
    });
    return os.str();
  }

  // -------------------------------------------------------------------------
  // collectives

  /// Rank 0 sends every rank the topology table and the payloads it is to
  /// host, then drops its copies of objects hosted elsewhere.
  void distribute_objects() {
    const Tag tag = group_->next_collective_tag();
    const Rank n = nprocs();
    const Rank me = myid();
    auto table = std::make_shared<Table>();
    plan_.reset();

    if (me == 0) {
      codec::Buffer common;
      detail::put_op(common, detail::Op::distribute);
      std::size_t count = 0;
      objects_.for_each([&](ObjRef& r) {
        if (r.nullref()) return;
        if (r.proc() >= n) {
          fail(Errc::invalid_rank, "object " + std::to_string(r.id()) + " assigned to rank " +
                                       std::to_string(r.proc()) + " of " + std::to_string(n));
        }
        (*table)[r.id()] = {types_->type_of(*r), r->neighbours()};
        ++count;
      });
      detail::put_count(common, count);
      objects_.for_each([&](ObjRef& r) {
        if (r.nullref()) return;
        const auto& e = table->at(r.id());
        common << r.id() << r.proc() << e.type << e.nbrs;
      });
      if (n > 1) {
        transport::SendGroup sg(*group_);
        std::vector<std::size_t> hosted(n, 0);
        objects_.for_each([&](ObjRef& r) {
          if (!r.nullref()) ++hosted[r.proc()];
        });
        for (Rank d = 1; d < n; ++d) {
          sg[d].assign(common.data());
          detail::put_count(sg[d], hosted[d]);
        }
        objects_.for_each([&](ObjRef& r) {
          if (r.nullref() || r.proc() == 0) return;
          sg[r.proc()] << r.id();
          r->pack(sg[r.proc()]);
        });
        sg.isend_all(tag);
        sg.wait();
        clear_non_local();
      }
    } else {
      transport::MsgBuf b(*group_);
      b.get(0, tag);
      detail::expect_op(b, detail::Op::distribute, 0);
      objects_.clear();
      const auto count = detail::get_count(b, 20);
      for (std::uint32_t i = 0; i < count; ++i) {
        GraphId id = 0;
        Rank proc = 0;
        TopologyEntry e;
        b >> id >> proc >> e.type >> e.nbrs;
        objects_[id].set_proc(proc);
        (*table)[id] = std::move(e);
      }
      const auto payloads = detail::get_count(b, 8);
      for (std::uint32_t i = 0; i < payloads; ++i) {
        GraphId id = 0;
        b >> id;
        auto it = table->find(id);
        ObjRef* r = objects_.find(id);
        if (it == table->end() || r == nullptr || r->proc() != me) {
          fail(Errc::protocol_violation, "rank 0 sent object " + std::to_string(id) +
                                             " which is not hosted here");
        }
        auto node = make_node(it->second.type);
        node->unpack(b);
        r->addref(std::move(node));
      }
    }
    topo_ = std::move(table);
    distributed_ = true;
    rebuild_local_list();
  }

  /// Every rank sends its hosted payloads to rank 0, which keeps copies.
  void gather() {
    const Tag tag = group_->next_collective_tag();
    const Rank n = nprocs();
    if (n == 1) return;
    if (myid() != 0) {
      transport::MsgBuf b(*group_);
      detail::put_op(b, detail::Op::gather);
      detail::put_count(b, local_.size());
      for (ObjRef* r : local_) {
        b << r->id() << types_->type_of(**r);
        (*r)->pack(b);
      }
      b.send_to(0, tag);
      return;
    }
    transport::MsgBuf b(*group_);
    for (Rank i = 1; i < n; ++i) {
      b.get(transport::ANY_SOURCE, tag);
      const Rank src = b.last_source();
      detail::expect_op(b, detail::Op::gather, src);
      const auto count = detail::get_count(b, 12);
      for (std::uint32_t k = 0; k < count; ++k) {
        GraphId id = 0;
        TypeId type = 0;
        b >> id >> type;
        ObjRef& r = objects_[id];
        r.set_proc(src);
        materialise(r, type, b);
      }
    }
  }

  /// Moves objects between ranks. Every rank passes a move set; a rank
  /// acts on the entries for objects it hosts and ignores the rest. Cached
  /// neighbour copies are dropped.
  void migrate(const std::vector<Move>& moves) {
    const Tag tag = group_->next_collective_tag();
    const Rank n = nprocs();
    const Rank me = myid();
    plan_.reset();

    std::map<GraphId, Rank> mine;
    for (const auto& [id, dest] : moves) {
      if (dest >= n) {
        fail(Errc::invalid_rank, "move of object " + std::to_string(id) + " to rank " +
                                     std::to_string(dest) + " of " + std::to_string(n));
      }
      const ObjRef* r = objects_.find(id);
      if (r != nullptr && r->proc() == me && !r->nullref()) mine[id] = dest;
    }
    std::erase_if(mine, [&](const auto& kv) { return kv.second == me; });

    if (n > 1) {
      transport::SendGroup sg(*group_);
      std::vector<std::size_t> bound(n, 0);
      for (const auto& [id, dest] : mine) ++bound[dest];
      for (Rank d = 0; d < n; ++d) {
        if (d == me) continue;
        detail::put_op(sg[d], detail::Op::migrate);
        detail::put_count(sg[d], mine.size());
        for (const auto& [id, dest] : mine) sg[d] << id << dest;
        detail::put_count(sg[d], bound[d]);
      }
      for (const auto& [id, dest] : mine) {
        ObjRef& r = *objects_.find(id);
        sg[dest] << id << types_->type_of(*r);
        r->pack(sg[dest]);
        r.set_proc(dest);
        r.nullify();
      }
      sg.isend_all(tag);

      transport::MsgBuf b(*group_);
      for (Rank i = 1; i < n; ++i) {
        b.get(transport::ANY_SOURCE, tag);
        const Rank src = b.last_source();
        detail::expect_op(b, detail::Op::migrate, src);
        const auto announced = detail::get_count(b, 12);
        for (std::uint32_t k = 0; k < announced; ++k) {
          GraphId id = 0;
          Rank dest = 0;
          b >> id >> dest;
          objects_[id].set_proc(dest);
        }
        const auto payloads = detail::get_count(b, 12);
        for (std::uint32_t k = 0; k < payloads; ++k) {
          GraphId id = 0;
          TypeId type = 0;
          b >> id >> type;
          ObjRef& r = objects_[id];
          if (r.proc() != me) {
            fail(Errc::protocol_violation, "rank " + std::to_string(src) + " sent object " +
                                               std::to_string(id) + " without announcing it");
          }
          materialise(r, type, b);
        }
      }
      sg.wait();
    }
    clear_non_local();
    rebuild_local_list();
  }

  /// Makes every neighbour of every local object available here. Sends
  /// exactly one message to each rank that hosts a node with a neighbour
  /// hosted here, and receives one from each rank hosting a neighbour of a
  /// local node. Only direct neighbours are cached.
  void prepare_neighbours() {
    const Tag tag = group_->next_collective_tag();
    last_neighbour_tag_ = tag;
    const Rank n = nprocs();
    if (n == 1) return;
    const Rank me = myid();
    if (!plan_) plan_ = compute_plan();

    transport::SendGroup sg(*group_);
    for (Rank d = 0; d < n; ++d) {
      const auto& ids = plan_->exports[d];
      if (ids.empty()) continue;
      detail::put_op(sg[d], detail::Op::prepare);
      detail::put_count(sg[d], ids.size());
      for (GraphId id : ids) {
        const ObjRef& r = *objects_.find(id);
        sg[d] << id << types_->type_of(*r);
        r->pack(sg[d]);
      }
      sg.isend(d, tag);
    }

    transport::MsgBuf b(*group_);
    std::set<Rank> pending(plan_->imports.begin(), plan_->imports.end());
    while (!pending.empty()) {
      b.get(transport::ANY_SOURCE, tag);
      const Rank src = b.last_source();
      if (pending.erase(src) == 0) {
        fail(Errc::protocol_violation,
             "unexpected neighbour message from rank " + std::to_string(src));
      }
      detail::expect_op(b, detail::Op::prepare, src);
      const auto count = detail::get_count(b, 12);
      for (std::uint32_t k = 0; k < count; ++k) {
        GraphId id = 0;
        TypeId type = 0;
        b >> id >> type;
        ObjRef& r = objects_[id];
        if (r.proc() == me) {
          fail(Errc::protocol_violation, "rank " + std::to_string(src) +
                                             " sent a copy of local object " + std::to_string(id));
        }
        materialise(r, type, b);
      }
    }
    sg.wait();
  }

  /// Computes a new assignment on rank 0 from every node's weight and edge
  /// weights, and migrates objects to realise it. Returns the assignment on
  /// every rank; nparts must not exceed nprocs. When nparts == nprocs, parts
  /// are renamed to keep as much weight as possible where it already is.
  PartitionAssignment partition_objects(const PartitionOptions& opts = {},
                                        const Partitioner& partitioner = greedy_partition) {
    return partition_objects(nprocs(), opts, partitioner);
  }
  PartitionAssignment partition_objects(Part nparts, const PartitionOptions& opts = {},
                                        const Partitioner& partitioner = greedy_partition) {
    if (nparts == 0 || nparts > nprocs()) {
      fail(Errc::config_error, "nparts " + std::to_string(nparts) + " with " +
                                   std::to_string(nprocs()) + " ranks");
    }
    const Rank n = nprocs();
    auto a = assess([&](const Topology& t, const std::vector<Part>& owner) {
      auto result = partitioner(t, nparts, opts);
      if (nparts == n) {
        result = evaluate(t, relabel_to_owners(t, result.part, owner, nparts), nparts,
                          opts.epsilon);
      }
      return result;
    });
    const auto labels = a.labels();
    std::vector<Move> moves;
    for (ObjRef* r : local_) {
      auto it = labels.find(r->id());
      if (it != labels.end() && it->second != myid()) moves.emplace_back(r->id(), it->second);
    }
    migrate(moves);
    return a;
  }

  /// Weights and cut of the current distribution, on every rank.
  PartitionAssignment metrics(double epsilon = 0.1) {
    return assess([&](const Topology& t, const std::vector<Part>& owner) {
      return evaluate(t, owner, nprocs(), epsilon);
    });
  }

 private:
  struct Plan {
    std::vector<std::vector<GraphId>> exports;  // by destination rank
    std::vector<Rank> imports;
  };

  std::unique_ptr<Node> make_node(TypeId type) const {
    auto obj = types_->make_by_id(type);
    auto* node = dynamic_cast<Node*>(obj.get());
    if (node == nullptr) {
      fail(Errc::bad_cast, "type " + std::to_string(type) + " (" + types_->name(type) +
                               ") is not a graph node");
    }
    obj.release();
    return std::unique_ptr<Node>(node);
  }

  /// Unpacks into r's payload, reusing it when it is an owned object of the
  /// same type.
  void materialise(ObjRef& r, TypeId type, codec::Buffer& b) {
    if (!r.nullref() && r.managed() && types_->find(*r.get()) == type) {
      r->unpack(b);
      return;
    }
    auto node = make_node(type);
    node->unpack(b);
    r.addref(std::move(node));
  }

  Plan compute_plan() const {
    const Rank me = myid();
    Plan p;
    std::vector<std::set<GraphId>> exports(nprocs());
    std::set<Rank> imports;
    objects_.for_each([&](const ObjRef& r) {
      const auto* nbrs = neighbours_of(r.id());
      if (nbrs == nullptr) return;
      for (GraphId nb : *nbrs) {
        const ObjRef* t = objects_.find(nb);
        if (t == nullptr || t->proc() == r.proc()) continue;
        if (r.proc() == me) {
          imports.insert(t->proc());
        } else if (t->proc() == me) {
          exports[r.proc()].insert(nb);
        }
      }
    });
    for (auto& s : exports) p.exports.emplace_back(s.begin(), s.end());
    p.imports.assign(imports.begin(), imports.end());
    return p;
  }

  /// Neighbour exchange, then each rank reports its nodes' weights and
  /// edges to rank 0, which runs `decide` and broadcasts the result.
  template <class Decide>
  PartitionAssignment assess(Decide&& decide) {
    prepare_neighbours();
    const Tag tag = group_->next_collective_tag();
    const Rank n = nprocs();
    const Rank me = myid();

    codec::Buffer report;
    detail::put_count(report, local_.size());
    for (ObjRef* r : local_) {
      const Node& node = **r;
      std::vector<std::pair<GraphId, Weight>> edges;
      for (GraphId nb : node.neighbours()) {
        ObjRef* t = objects_.find(nb);
        if (t == nullptr) continue;
        edges.emplace_back(nb, std::max<Weight>(1, node.edgeweight(*t)));
      }
      report << r->id() << std::max<Weight>(1, node.weight()) << edges;
    }

    PartitionAssignment a;
    if (me != 0) {
      transport::MsgBuf b(*group_);
      detail::put_op(b, detail::Op::report);
      b.append(report.bytes());
      b.send_to(0, tag);
      b.get(0, tag);
      detail::expect_op(b, detail::Op::assign, 0);
      b >> a.nparts >> a.ids >> a.part >> a.part_weight >> a.edge_cut >> a.bound >> a.infeasible;
      return a;
    }

    struct Reported {
      Rank owner;
      Weight weight;
      std::vector<std::pair<GraphId, Weight>> edges;
    };
    std::map<GraphId, Reported> nodes;
    auto read_report = [&](codec::Buffer& b, Rank owner) {
      const auto count = detail::get_count(b, 20);
      for (std::uint32_t k = 0; k < count; ++k) {
        GraphId id = 0;
        Reported rep{owner, 1, {}};
        b >> id >> rep.weight >> rep.edges;
        nodes[id] = std::move(rep);
      }
    };
    read_report(report, 0);
    transport::MsgBuf b(*group_);
    for (Rank i = 1; i < n; ++i) {
      b.get(transport::ANY_SOURCE, tag);
      detail::expect_op(b, detail::Op::report, b.last_source());
      read_report(b, b.last_source());
    }

    std::vector<GraphId> ids;
    std::vector<Weight> weights;
    std::vector<Part> owner;
    std::unordered_map<GraphId, std::uint32_t> index;
    for (const auto& [id, rep] : nodes) {
      index[id] = static_cast<std::uint32_t>(ids.size());
      ids.push_back(id);
      weights.push_back(rep.weight);
      owner.push_back(rep.owner);
    }
    std::vector<Topology::Arc> arcs;
    for (const auto& [id, rep] : nodes) {
      for (const auto& [nb, w] : rep.edges) {
        auto it = index.find(nb);
        if (it != index.end()) arcs.push_back({index.at(id), it->second, w});
      }
    }
    const Topology t = Topology::from_arcs(std::move(ids), std::move(weights), arcs);
    a = decide(t, owner);

    if (n > 1) {
      transport::SendGroup sg(*group_);
      for (Rank d = 1; d < n; ++d) {
        detail::put_op(sg[d], detail::Op::assign);
        sg[d] << a.nparts << a.ids << a.part << a.part_weight << a.edge_cut << a.bound
              << a.infeasible;
      }
      sg.isend_all(tag);
      sg.wait();
    }
    return a;
  }

  transport::Group* group_;
  const registry::TypeTable* types_;
  Map objects_;
  std::vector<ObjRef*> local_;
  std::shared_ptr<const Table> topo_;
  bool distributed_ = false;
  Diagnostics diag_;
  std::optional<Plan> plan_;
  std::optional<Tag> last_neighbour_tag_;
  ObjRef refused_;
};

using Graph = BasicGraph<DenseOMap>;
using HashedGraph = BasicGraph<HashedOMap>;

}  // namespace graphcell::graph
