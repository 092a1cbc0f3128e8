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
#include <string>
#include <vector>

#include "mgw/common.hpp"
#include "mgw/rng.hpp"
#include "mgw/tree.hpp"
#include "mgw/walk.hpp"

namespace mgw {

inline constexpr std::int64_t kDefaultMaxVertices = 1'000'000;
inline constexpr std::int64_t kDefaultMaxAttempts = 1'000'000;

struct OffspringEntry {
  std::vector<std::int64_t> counts;
  double p = 0.0;
};

/// Finite offspring tables, one per type. Validated on construction: each
/// table is non-empty, probabilities are >= 0 and sum to 1 within 1e-12.
class OffspringSpec {
 public:
  OffspringSpec(int type_count, std::vector<std::vector<OffspringEntry>> tables);

  int type_count() const { return d_; }
  const std::vector<OffspringEntry>& table(int type) const { return tables_[static_cast<std::size_t>(type - 1)]; }

  /// Inverse-CDF lookup for u in [0, 1).
  const OffspringEntry& draw(int type, double u) const;

  /// Mean matrix and its Perron root, computed once.
  const RealMatrix& mean() const { return mean_; }
  double rho() const { return rho_; }

 private:
  int d_;
  std::vector<std::vector<OffspringEntry>> tables_;
  std::vector<std::vector<double>> cdf_;
  std::vector<std::size_t> last_positive_;
  RealMatrix mean_;
  double rho_ = 0.0;
};

/// M(i-1, j-1) = E[number of type-j children of a type-i vertex].
RealMatrix mean_matrix(const OffspringSpec& spec);
/// True iff every entry of M + M^2 + ... + M^d is positive.
bool irreducible(const RealMatrix& m);
/// Spectral radius of a nonnegative matrix, to 1e-10.
double perron_eigenvalue(const RealMatrix& m);

enum class Criticality { kSubcritical, kCritical, kSupercritical };
std::string to_string(Criticality c);

struct Classification {
  Criticality kind = Criticality::kCritical;
  double rho = 1.0;
  /// Reducible mean matrices are flagged here rather than rejected.
  bool irreducible = true;
};
/// Critical when |rho - 1| <= 1e-9.
Classification classify(const OffspringSpec& spec);

/// Expected number of type-j vertices in a tree from one type-i0 root: row
/// i0 of (I - M)^{-1}. Requires rho < 1.
std::vector<double> expected_type_counts(const OffspringSpec& spec, int root_type);

struct SampleOptions {
  std::int64_t max_vertices = kDefaultMaxVertices;
  bool allow_supercritical = false;
};

/// Generation-by-generation sample. Vertex k in breadth-first order uses
/// draw k of the tree-vertex stream under `rng`.
MultitypeTree sample_mbgw(const OffspringSpec& spec, int root_type, const RngSpec& rng,
                          const SampleOptions& options = {});

struct ExcursionSample {
  /// All vertices have type i; only type-i child counts are kept.
  MultitypeTree tree;
  TypedWalkBundle bundle;
};
/// Runs the type-i walk until its diagonal coordinate first hits -1.
ExcursionSample sample_excursion_subtree(const OffspringSpec& spec, int type, const RngSpec& rng,
                                         std::int64_t max_vertices = kDefaultMaxVertices);

struct ConditionedSample {
  MultitypeTree tree;
  std::int64_t attempts = 0;
  /// Attempts that hit the vertex cap; these count as rejections.
  std::int64_t overflows = 0;
};
/// Rejection sampling until the root's type-i0 subtree has >= r vertices.
/// Throws CapExceeded once max_attempts are used.
ConditionedSample sample_conditioned(const OffspringSpec& spec, int root_type, std::int64_t r,
                                     const RngSpec& rng, std::int64_t max_attempts = kDefaultMaxAttempts,
                                     const SampleOptions& options = {});

// Single-type presets. Mass beyond `cap` children is lumped at `cap`.
OffspringSpec geometric_spec(double p, int cap = 64);
OffspringSpec poisson_truncated_spec(double lambda, int cap);

// SPEC JSON v1.
OffspringSpec parse_spec_json(const std::string& text);
std::string to_spec_json(const OffspringSpec& spec);

}  // namespace mgw
