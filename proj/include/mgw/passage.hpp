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
#include <vector>

#include "mgw/rng.hpp"
#include "mgw/sampling.hpp"
#include "mgw/tree.hpp"
#include "mgw/walk.hpp"

namespace mgw {

/// One bundle per base type; bundle i holds X^{i,1..d}.
using DiscreteField = std::vector<TypedWalkBundle>;

void validate_field(const DiscreteField& field);

/// i.i.d. offspring draws for every type: step k of bundle i uses draw k of
/// the field stream for type i, so a longer field extends a shorter one.
DiscreteField sample_field(const OffspringSpec& spec, std::int64_t steps, const RngSpec& rng);

inline constexpr std::int64_t kDefaultPassageSteps = 10'000;

/// Iterates R(0) = r, U(h)_j = tau^j(R(h)_j),
/// R(h+1)_j = r_j + sum_{l != j} X^{l,j}(U(h)_l).
struct PassageState {
  std::vector<std::int64_t> r;
  /// Rows h = 0, 1, ...; entry j-1 per row.
  std::vector<std::vector<std::int64_t>> R;
  std::vector<std::vector<std::int64_t>> U;
  /// Limit, set per coordinate on stabilization.
  std::vector<std::optional<std::int64_t>> T;
  /// Coordinates whose diagonal walk ended before reaching its level.
  std::vector<bool> unreached;
  bool stabilized = false;

  bool any_unreached() const;
};

/// Stops once R(h+1) = R(h), when a walk is exhausted, or after h_max rows.
PassageState minimal_hitting(const DiscreteField& field, const std::vector<std::int64_t>& r,
                             std::int64_t h_max = kDefaultPassageSteps);

/// counts[h][j-1] over a forest: type-j vertices at reduced height <= h and
/// type-j reduced vertices at reduced height <= h. Rows run to h_max.
struct ReducedHeightCounts {
  std::vector<std::vector<std::int64_t>> vertices;
  std::vector<std::vector<std::int64_t>> components;
};
ReducedHeightCounts reduced_height_counts(const std::vector<MultitypeTree>& forest, int type_count,
                                          std::int64_t h_max);

struct ExcursionInterval {
  /// 1-based order of appearance.
  std::int64_t index = 0;
  std::int64_t start = 0;
  std::int64_t end = 0;
  std::int64_t length() const { return end - start; }
};

/// All excursions of x completed by step `horizon`.
std::vector<ExcursionInterval> excursion_intervals(const LatticePath& x, std::int64_t horizon);
/// The k longest of them (earlier first on ties), listed in order of appearance.
std::vector<ExcursionInterval> longest_k_excursions(const LatticePath& x, std::size_t k, std::int64_t horizon);
/// max H(m) over start <= m < end.
std::int64_t excursion_max_height(const std::vector<std::int64_t>& height, const ExcursionInterval& e);

/// Number of k <= floor(b x / a) whose excursion has max H / a > eps or
/// length / b > eps. Throws InvalidInput if the level is not reached.
std::int64_t gamma_statistic(const LatticePath& x, const std::vector<std::int64_t>& height, double level, double eps,
                             double a, double b);

// CSV: h,j,R,U and rank,start,end,length,maxheight.
void write_passage_csv(std::ostream& os, const PassageState& s);
void write_excursion_csv(std::ostream& os, const std::vector<ExcursionInterval>& list,
                         const std::vector<std::int64_t>& height);

}  // namespace mgw
