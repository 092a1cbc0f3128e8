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
#include <optional>
#include <string>
#include <vector>

#include "mgw/tree.hpp"

namespace mgw {

/// Prefix sums X(0..n) with X(0) = 0.
using LatticePath = std::vector<std::int64_t>;

/// For one base type i, the d coordinates X^{i,1..d}, all of the same length.
/// A type with no subtrees has d copies of {0} (zero steps).
struct TypedWalkBundle {
  int base_type = 1;
  std::vector<LatticePath> paths;

  int type_count() const { return static_cast<int>(paths.size()); }
  std::int64_t steps() const {
    return paths.empty() ? 0 : static_cast<std::int64_t>(paths.front().size()) - 1;
  }
  const LatticePath& coord(int j) const { return paths[static_cast<std::size_t>(j - 1)]; }
  LatticePath& coord(int j) { return paths[static_cast<std::size_t>(j - 1)]; }

  /// Throws InvalidInput on shape, start value or monotonicity violations.
  void validate() const;

  friend bool operator==(const TypedWalkBundle&, const TypedWalkBundle&) = default;
};

TypedWalkBundle empty_bundle(int base_type, int type_count);

/// A slice (start, end] of a path, shifted so it starts at 0.
struct DiscreteExcursion {
  std::int64_t start = 0;
  std::int64_t end = 0;
  LatticePath values;

  std::int64_t length() const { return end - start; }
};

/// Łukasiewicz path of a plane tree (all types merged).
LatticePath encode_single(const MultitypeTree& t);
/// One-type tree (d = 1) with the given path. Throws InvalidInput.
MultitypeTree decode_single(const LatticePath& x);
/// Checks the single-tree conditions; throws InvalidInput with a reason.
void check_single_tree_path(const LatticePath& x);

/// H(m) = #{k < m : X(k) = min_{k<=r<=m} X(r)} for m = 0..n-1.
std::vector<std::int64_t> height_process(const LatticePath& x);
/// Heights visited by the contour walk (length 2n-1).
std::vector<std::int64_t> contour_process(const MultitypeTree& t);

/// Smallest m with X(m) = -k, or nullopt. k >= 1.
std::optional<std::int64_t> first_passage(const LatticePath& x, std::int64_t k);

/// Precomputed first passage times for a path with increments >= -1.
class PassageIndex {
 public:
  explicit PassageIndex(const LatticePath& x);
  /// tau(0) = 0; nullopt when -k is never reached.
  std::optional<std::int64_t> tau(std::int64_t k) const;
  std::int64_t levels_reached() const { return static_cast<std::int64_t>(tau_.size()) - 1; }

 private:
  std::vector<std::int64_t> tau_;
};

/// Slices between consecutive first passage times up to level `up_to`.
std::vector<DiscreteExcursion> excursions(const LatticePath& x, std::int64_t up_to);

/// One bundle per base type (index i-1).
std::vector<TypedWalkBundle> encode_multitype(const MultitypeTree& t);
/// Inverse of encode_multitype. Every step of every bundle must be used.
MultitypeTree decode_multitype(const std::vector<TypedWalkBundle>& bundles, int root_type);

/// Forest from `roots[j-1]` type-j roots, read off the bundles breadth-first
/// by reduced generation. Steps past the closed forest are ignored. Roots
/// are returned type 1 first, then type 2, and so on.
std::vector<MultitypeTree> decode_multitype_forest(const std::vector<TypedWalkBundle>& bundles,
                                                   const std::vector<std::int64_t>& roots);

// WALK CSV v1.
void write_walk_csv(std::ostream& os, const TypedWalkBundle& b);
TypedWalkBundle read_walk_csv(std::istream& is);

}  // namespace mgw
