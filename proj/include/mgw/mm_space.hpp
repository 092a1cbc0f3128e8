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

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mgw/common.hpp"

namespace mgw {

inline constexpr std::size_t kDefaultCorrespondenceCap = 25;

/// Finite pointed metric space with an n x d measure table and marks.
struct FiniteMMSpace {
  RealMatrix dist;
  std::size_t root = 0;
  int type_count = 1;
  /// Point-major: measure[p * type_count + (j - 1)].
  std::vector<double> measure;
  std::vector<std::size_t> marks;

  std::size_t size() const { return dist.size(); }
  double mass(std::size_t p, int j) const { return measure[p * static_cast<std::size_t>(type_count) + static_cast<std::size_t>(j - 1)]; }
  double total_mass(int j) const;
  /// Coordinate j of the measure as a vector over points.
  std::vector<double> coordinate(int j) const;
  /// Mark l (1-based); marks past the stored list are the root.
  std::size_t mark(std::size_t l) const { return l <= marks.size() ? marks[l - 1] : root; }

  /// Metric axioms within `tol`, ranges, nonnegative measure.
  void validate(double tol = 1e-9) const;

  /// Zero measure, no marks.
  static FiniteMMSpace from_distances(RealMatrix dist, std::size_t root = 0, int type_count = 1);
};

double hausdorff(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b, const RealMatrix& d);

/// Prohorov distance between two finite measures on one finite space, with
/// closed neighbourhoods. Exact: scans the critical radii and solves a
/// bipartite max-flow at each.
double prohorov(const std::vector<double>& mu, const std::vector<double>& nu, const RealMatrix& d);

using Correspondence = std::vector<std::pair<std::size_t, std::size_t>>;

/// sup |d_X - d_Y| over pairs of pairs. Throws InvalidInput unless both
/// projections are onto.
double distortion(const Correspondence& r, const FiniteMMSpace& x, const FiniteMMSpace& y);

/// Half the least distortion of a correspondence containing (root, root)
/// and the first k mark pairs. Throws CapExceeded when |X||Y| > cap.
double gh_marked(const FiniteMMSpace& x, const FiniteMMSpace& y, std::size_t k,
                 std::size_t cap = kDefaultCorrespondenceCap);

/// Upper estimate of the vector GHP distance with k marks: for each measure
/// coordinate j, the least over correspondences R of
///   hausdorff + prohorov_j + max(root gap, mark gaps)
/// computed in X u Y glued along R at dis(R)/2; the coordinates are summed.
double ghp_estimate(const FiniteMMSpace& x, const FiniteMMSpace& y, std::size_t k,
                    std::size_t cap = kDefaultCorrespondenceCap);

/// Metric space glued from X and Y along R: X first, then Y.
RealMatrix glue_along(const Correspondence& r, const FiniteMMSpace& x, const FiniteMMSpace& y);

/// The tree coded by samples h(0..N-1): d(s,t) = h(s) + h(t) - 2 min h[s..t],
/// quotiented at zero distance. Point 0 holds sample 0 and is the root; the
/// measure puts mass 1/N per sample on coordinate `type`.
FiniteMMSpace tree_from_height(const std::vector<double>& h, int type_count = 1, int type = 1,
                               std::vector<std::size_t>* point_of_sample = nullptr);

/// 2 sup |h1 - h2| with both functions linearly interpolated on [0, 1].
double gh_bound_from_heights(const std::vector<double>& h1, const std::vector<double>& h2);

// SPACE JSON v1.
std::string to_space_json(const FiniteMMSpace& s);
FiniteMMSpace parse_space_json(const std::string& text);

}  // namespace mgw
