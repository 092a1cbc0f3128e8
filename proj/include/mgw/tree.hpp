// Copyright 2026 The mgw Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgw/common.hpp"
#include "mgw/ulam.hpp"

namespace mgw {

/// Vertex ids are 1-based depth-first ranks.
using VertexId = std::int64_t;

inline constexpr std::size_t kDefaultDistanceCap = 20000;

/// Finite rooted planar tree whose vertices carry a type in [1, d].
///
/// Stored in depth-first order as (type, child-count vector) per vertex. The
/// children of a vertex are ordered by type: all type-1 children first, then
/// type-2, and so on. The constructor validates that the count sequence
/// describes exactly one tree and that each child's type matches its slot.
class MultitypeTree {
 public:
  /// `child_counts` holds d entries per vertex, vertex-major.
  MultitypeTree(int type_count, std::vector<int> types, std::vector<std::int64_t> child_counts);

  static MultitypeTree single_vertex(int type_count, int type);

  int type_count() const { return d_; }
  std::int64_t size() const { return static_cast<std::int64_t>(types_.size()); }

  int type(VertexId v) const { return types_[index(v)]; }
  std::int64_t child_count(VertexId v, int type) const {
    return counts_[index(v) * static_cast<std::size_t>(d_) + static_cast<std::size_t>(type - 1)];
  }
  std::span<const std::int64_t> child_counts(VertexId v) const {
    return {counts_.data() + index(v) * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  std::int64_t total_children(VertexId v) const;

  /// Parent id, 0 for the root.
  VertexId parent(VertexId v) const { return parent_[index(v)]; }
  std::span<const VertexId> children(VertexId v) const;
  std::int64_t height(VertexId v) const { return height_[index(v)]; }
  std::int64_t max_height() const;
  bool contains(VertexId v) const { return v >= 1 && v <= size(); }

  const std::vector<int>& types() const { return types_; }
  const std::vector<std::int64_t>& raw_counts() const { return counts_; }

  friend bool operator==(const MultitypeTree& a, const MultitypeTree& b) {
    return a.d_ == b.d_ && a.types_ == b.types_ && a.counts_ == b.counts_;
  }

 private:
  std::size_t index(VertexId v) const { return static_cast<std::size_t>(v - 1); }

  int d_ = 1;
  std::vector<int> types_;
  std::vector<std::int64_t> counts_;
  std::vector<VertexId> parent_;
  std::vector<std::int64_t> child_offset_;
  std::vector<VertexId> child_list_;
  std::vector<std::int64_t> height_;
};

/// A tree with one extra typeless vertex joined to the old root. Point 0 is
/// the new root; point v >= 1 is vertex v of `base`.
struct PlantedTree {
  MultitypeTree base;

  std::int64_t point_count() const { return base.size() + 1; }
  /// Parent point of a point; -1 for point 0.
  std::int64_t parent_point(std::int64_t p) const { return p == 0 ? -1 : base.parent(p); }
  /// Graph distance from the planted root.
  std::int64_t depth(std::int64_t p) const { return p == 0 ? 0 : base.height(p) + 1; }
};

std::vector<VertexId> depth_first_order(const MultitypeTree& t);
std::vector<VertexId> breadth_first_order(const MultitypeTree& t);
/// Graph distance to the root. Throws InvalidInput for unknown ids.
std::int64_t vertex_height(const MultitypeTree& t, VertexId v);

PlantedTree plant(MultitypeTree t);

/// All-pairs graph distances. Throws CapExceeded above `cap` points.
IntMatrix graph_distance_matrix(const MultitypeTree& t, std::size_t cap = kDefaultDistanceCap);
IntMatrix graph_distance_matrix(const PlantedTree& t, std::size_t cap = kDefaultDistanceCap);

/// One maximal monochromatic connected subtree, collapsed.
struct ReducedVertex {
  int type = 1;
  UlamLabel label;
  /// Original vertex ids in depth-first order; members.front() is the root.
  std::vector<VertexId> members;
  /// Index of the parent reduced vertex, -1 for the root.
  std::int64_t parent = -1;
  /// Parent (in the original tree) of members.front(); 0 for the root.
  VertexId attach_vertex = 0;
  /// Child reduced vertices in inherited planar order.
  std::vector<std::int64_t> children;
  std::int64_t depth = 0;
};

/// The reduced tree, with vertices listed in breadth-first order and
/// labelled by Ulam words: the m-th largest type-j child of label p gets
/// p·(j + (m-1)d). Equal sizes keep planar order.
class ReducedTree {
 public:
  ReducedTree(int type_count, std::vector<ReducedVertex> vertices,
              std::vector<std::int64_t> component_of);

  int type_count() const { return d_; }
  const std::vector<ReducedVertex>& vertices() const { return vertices_; }
  std::int64_t size() const { return static_cast<std::int64_t>(vertices_.size()); }
  /// Reduced index containing original vertex v.
  std::int64_t component_of(VertexId v) const { return component_[static_cast<std::size_t>(v - 1)]; }
  /// Reduced index for a label, or -1.
  std::int64_t find(const UlamLabel& label) const;

  /// The reduced tree as a MultitypeTree (children re-sorted by type).
  MultitypeTree shape() const;

 private:
  int d_;
  std::vector<ReducedVertex> vertices_;
  std::vector<std::int64_t> component_;
  std::map<UlamLabel, std::int64_t> by_label_;
};

ReducedTree reduce(const MultitypeTree& t);

/// The typed subtree behind `label`, as a one-type tree keeping d; nullopt
/// when the label is not in the reduced tree.
std::optional<MultitypeTree> type_subtree(const MultitypeTree& t, const ReducedTree& reduced,
                                          const UlamLabel& label);
std::optional<MultitypeTree> type_subtree(const MultitypeTree& t, const UlamLabel& label);

/// Size of the type-root(t) subtree containing the root.
std::int64_t root_subtree_size(const MultitypeTree& t);

// MTREE text format, version 1.

struct MtreeDocument {
  MultitypeTree tree;
  bool planted = false;
};

void write_mtree(std::ostream& os, const MultitypeTree& t, bool planted = false);
std::string to_mtree(const MultitypeTree& t, bool planted = false);
MtreeDocument read_mtree(std::istream& is);
MtreeDocument parse_mtree(const std::string& text);

}  // namespace mgw
