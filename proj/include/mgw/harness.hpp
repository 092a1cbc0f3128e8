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
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mgw/mm_space.hpp"
#include "mgw/sampling.hpp"
#include "mgw/tree.hpp"

namespace mgw {

/// Experiment settings, read from a JSON config. Unknown keys are rejected.
struct ExperimentConfig {
  std::optional<OffspringSpec> spec;
  std::string spec_source;  // path or "inline"
  int root_type = 1;
  /// Scaling sequences: n, a_n and b_n^j, all of one length.
  std::vector<std::int64_t> n;
  std::vector<double> a_n;
  std::vector<std::vector<double>> b_n;  // [j-1][index]
  /// Conditioning level: root subtree >= floor(b_n^{i0} r).
  double r = 1.0;
  /// Absolute conditioning level for simulate/roundtrip (0 = none).
  std::int64_t condition = 0;
  std::int64_t replicas = 1;
  std::uint64_t seed = 0;
  std::int64_t max_vertices = kDefaultMaxVertices;
  std::int64_t max_attempts = kDefaultMaxAttempts;
  /// Scaling: vertex cap per attempt is cap_factor * n.
  std::int64_t cap_factor = 64;
  std::string out = ".";
  double x = 1.0;
  double eps = 0.25;
  std::int64_t k_longest = 5;
  std::int64_t field_steps = 4096;
  std::int64_t max_field_steps = std::int64_t{1} << 22;
  std::vector<std::int64_t> roots;  // coupling; default: one root of root_type
  std::int64_t ghp_depth = 3;
  std::int64_t ghp_replicas = 20;
  std::int64_t ghp_points = 5;
  bool corpus = false;
  int corpus_types = 2;
  int corpus_max_vertices = 5;

  /// Throws InvalidInput.
  void validate() const;
  const OffspringSpec& offspring() const;
};

/// `base_dir` resolves a relative spec path.
ExperimentConfig parse_config_json(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// Rectangular table of numbers, printed with up to 17 significant digits.
class SummaryTable {
 public:
  explicit SummaryTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void add_row(std::vector<double> row);
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::size_t column(const std::string& name) const;
  void write_csv(std::ostream& os) const;
  std::string to_csv() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

/// Fixed grid used by every distribution summary.
inline const std::vector<double> kQuantileGrid{0.05, 0.25, 0.50, 0.75, 0.95};
/// Linear interpolation between order statistics (position q (n-1)).
double quantile(std::vector<double> values, double q);
std::vector<double> quantiles(const std::vector<double>& values, const std::vector<double>& grid = kQuantileGrid);

/// Worker count: hardware concurrency capped by MGW_THREADS when set.
unsigned worker_count();
/// Runs fn(0..count-1) on worker threads. fn must only touch its own slot.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& fn);

/// Every type-sorted multitype tree with d types and at most max_vertices
/// vertices.
std::vector<MultitypeTree> enumerate_trees(int type_count, int max_vertices);

struct RunReport {
  bool ok = true;
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  void fail(std::string message);
};

// Runners. Each writes its files under config.out and returns the table it
// wrote as summary.csv (or the file named below).
struct SimulateResult {
  RunReport report;
  SummaryTable table{{}};
};
SimulateResult run_simulate(const ExperimentConfig& config);

struct RoundTripResult {
  RunReport report;
  std::int64_t checked = 0;
  std::int64_t corpus_checked = 0;
  std::int64_t skipped = 0;
  bool negative_control_detected = false;
};
/// Encode/decode equality, glue/decompose isometry and measure totals.
RoundTripResult run_roundtrip(const ExperimentConfig& config);
/// Per-tree checks. `message` names the first failure.
struct RoundTripCheck {
  bool encode_ok = true;   // decode(encode(t)) == t
  bool size_ok = true;     // typed subtree sizes are excursion lengths
  bool height_ok = true;   // height process equals vertex heights
  bool glue_ok = true;     // glue(decompose) isometric, same measure
  bool glue_checked = false;
  std::string message;
  bool ok() const { return encode_ok && size_ok && height_ok && glue_ok; }
};
RoundTripCheck check_round_trip(const MultitypeTree& t, std::size_t distance_cap = kDefaultDistanceCap);

struct CouplingResult {
  RunReport report;
  SummaryTable table{{}};
  std::int64_t checked = 0;
  std::int64_t unreached = 0;
};
CouplingResult run_coupling(const ExperimentConfig& config);
/// One field/forest pair; empty string when the identity holds. Sets
/// *stabilized_rows to the number of rows compared (0 if never stabilized).
std::string check_coupling(const OffspringSpec& spec, const std::vector<std::int64_t>& roots, const RngSpec& rng,
                           std::int64_t field_steps, std::int64_t max_field_steps, std::int64_t* rows);

struct ScalingResult {
  RunReport report;
  SummaryTable table{{}};
};
ScalingResult run_scaling(const ExperimentConfig& config);

/// GHP estimates between the subsampled glued truncations at heights h and
/// h+1, h = 0..depth-1, distances divided by a and type-j masses by b[j-1].
/// Each truncation is cut down to `points` points (root plus a sample
/// stratified by label generation); every vertex's mass moves to its nearest
/// sampled point.
std::vector<double> ghp_truncation_profile(const MultitypeTree& t, std::int64_t depth, double a,
                                           const std::vector<double>& b, const RngSpec& rng, std::size_t points);

/// gamma for one walk of i.i.d. type-i trees: of the first floor(b x / a)
/// trees, those with more than floor(eps b) vertices or height above eps a.
/// Trees are sampled only as far as needed to decide.
std::int64_t sampled_gamma(const OffspringSpec& spec, int type, double x, double eps, double a, double b,
                           const RngSpec& rng);

struct GhpResult {
  double ghp = 0.0;
  double gh = 0.0;
};
GhpResult run_ghp(const FiniteMMSpace& a, const FiniteMMSpace& b, std::size_t marks,
                  std::size_t cap = kDefaultCorrespondenceCap);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace mgw
