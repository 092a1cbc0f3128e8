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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mgw/mm_space.hpp"
#include "mgw/rng.hpp"
#include "mgw/sampling.hpp"
#include "mgw/tree.hpp"
#include "mgw/ulam.hpp"
#include "mgw/walk.hpp"

namespace mgw {

/// A planted one-type tree with marks. Point 0 is the planted root; points
/// 1..n are the tree's vertices in depth-first order. The trivial
/// subdecoration has no tree and a single point.
struct Subdecoration {
  int type = 1;
  int type_count = 1;
  std::optional<MultitypeTree> tree;
  /// x_1, x_2, ... as point ids; every later mark is point 0.
  std::vector<std::int64_t> marks;

  bool trivial() const { return !tree.has_value(); }
  std::int64_t point_count() const { return tree ? tree->size() + 1 : 1; }
  std::int64_t mark(std::int64_t l) const {
    return l >= 1 && l <= static_cast<std::int64_t>(marks.size()) ? marks[static_cast<std::size_t>(l - 1)] : 0;
  }
  /// Parent point of p, -1 for point 0.
  std::int64_t parent_point(std::int64_t p) const { return p == 0 ? -1 : tree->parent(p); }

  static Subdecoration trivial_of(int type, int type_count);

  friend bool operator==(const Subdecoration&, const Subdecoration&) = default;
};

/// Entry j != i counts marks of residue j that are not the planted root;
/// entry i is the number of points.
std::vector<std::int64_t> mark_counts(const Subdecoration& s);

/// Checks the structural invariants (mark ranges, residue-i marks at the
/// root). Throws InvalidInput.
void validate(const Subdecoration& s);

/// From one excursion bundle: the planted tree of the diagonal coordinate
/// and, for each j != i, the type-j attachment list shuffled by an
/// independent uniform permutation and laid out at residues j, j+d, ...
Subdecoration build_subdecoration(const TypedWalkBundle& excursion, const RngSpec& rng);

/// Nontrivial labels only; absent labels are trivial.
using Decoration = std::map<UlamLabel, Subdecoration>;

struct DecorationCaps {
  std::int64_t max_vertices_per_subdecoration = kDefaultMaxVertices;
  std::int64_t max_total_vertices = 10 * kDefaultMaxVertices;
};

/// Root from the type-i0 excursion law, then generation by generation up to
/// label length `depth`: i.i.d. children per nontrivial mark, sorted by
/// non-increasing size (stable) and labelled j + (m-1)d.
Decoration build_decoration(const OffspringSpec& spec, int root_type, int depth, const RngSpec& rng,
                            const DecorationCaps& caps = {});
/// Same, with a given root subdecoration.
Decoration build_decoration_from_root(const OffspringSpec& spec, Subdecoration root, int depth,
                                      const RngSpec& rng, const DecorationCaps& caps = {});

/// (label, local point id) of a glued point.
using Provenance = std::pair<UlamLabel, std::int64_t>;

/// The glued space as a tree on points. Point 0 is the root of the root
/// subdecoration; the rest follow labels in lexicographic order, each
/// contributing its non-root points.
struct GluedTree {
  int type_count = 1;
  std::vector<std::int64_t> parent;  // -1 for point 0
  std::vector<Provenance> provenance;
  /// Point-major measure table.
  std::vector<double> measure;
  std::map<Provenance, std::int64_t> point_of;

  std::size_t size() const { return parent.size(); }
  /// Point carrying (label, local id), resolving planted roots to the mark
  /// they are identified with.
  std::int64_t resolve(const UlamLabel& label, std::int64_t local) const;

  std::map<UlamLabel, std::vector<std::int64_t>> mark_of_;
};

struct GluedSpace {
  GluedTree tree;
  IntMatrix dist;
  FiniteMMSpace space() const;
};

GluedTree glue_tree(const Decoration& dec);
/// Full distance matrix; CapExceeded above `cap` points.
GluedSpace glue(const Decoration& dec, std::size_t cap = kDefaultDistanceCap);
/// Graph distances from one point of a glued tree.
std::vector<std::int64_t> distances_from(const GluedTree& g, std::int64_t source);

/// Distance between (p, z) and (q, y) by the closed three-case formula,
/// using only the local metrics and marks.
std::int64_t glued_distance_formula(const Decoration& dec, const UlamLabel& p, std::int64_t z,
                                    const UlamLabel& q, std::int64_t y);

struct Decomposition {
  Decoration decoration;
  /// provenance[v] for the planted tree's point v (0 = planted root).
  std::vector<Provenance> provenance;
};
Decomposition decompose(const PlantedTree& t);

Decoration truncate(const Decoration& dec, std::size_t depth);
/// Keeps labels in `labels` whose every prefix is also kept.
Decoration restrict_to(const Decoration& dec, const std::set<UlamLabel>& labels);
std::size_t decoration_depth(const Decoration& dec);

/// Hausdorff distance, inside the glued space of `dec`, between all points
/// and the points of labels of length <= depth.
double truncation_gap(const GluedTree& g, std::size_t depth);

// DECOR JSON v1.
std::string to_decor_json(const Decoration& dec);
Decoration parse_decor_json(const std::string& text);
std::string provenance_json(const GluedTree& g);

}  // namespace mgw
