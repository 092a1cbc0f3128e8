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

#include "mgw/sampling.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <json.hpp>

namespace mgw {

OffspringSpec::OffspringSpec(int type_count, std::vector<std::vector<OffspringEntry>> tables)
    : d_(type_count), tables_(std::move(tables)) {
  if (d_ < 1) throw InvalidInput("offspring spec needs d >= 1");
  if (static_cast<int>(tables_.size()) != d_) throw InvalidInput("offspring spec needs one table per type");
  mean_ = RealMatrix(static_cast<std::size_t>(d_), 0.0);
  for (int i = 1; i <= d_; ++i) {
    const auto& t = tables_[static_cast<std::size_t>(i - 1)];
    if (t.empty()) throw InvalidInput("offspring table for type " + std::to_string(i) + " is empty");
    std::vector<double> cdf;
    double total = 0.0;
    std::size_t last = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const auto& e = t[k];
      if (static_cast<int>(e.counts.size()) != d_) throw InvalidInput("offspring vector has wrong length");
      for (auto c : e.counts) {
        if (c < 0) throw InvalidInput("offspring vector has a negative entry");
      }
      if (!(e.p >= 0.0) || !std::isfinite(e.p)) throw InvalidInput("offspring probability must be >= 0");
      total += e.p;
      cdf.push_back(total);
      if (e.p > 0.0) last = k;
      for (int j = 1; j <= d_; ++j) {
        mean_(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)) +=
            e.p * static_cast<double>(e.counts[static_cast<std::size_t>(j - 1)]);
      }
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw InvalidInput("offspring table for type " + std::to_string(i) + " sums to " + std::to_string(total));
    }
    cdf_.push_back(std::move(cdf));
    last_positive_.push_back(last);
  }
  rho_ = perron_eigenvalue(mean_);
}

const OffspringEntry& OffspringSpec::draw(int type, double u) const {
  const auto& cdf = cdf_[static_cast<std::size_t>(type - 1)];
  auto k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  k = std::min(k, last_positive_[static_cast<std::size_t>(type - 1)]);
  return tables_[static_cast<std::size_t>(type - 1)][k];
}

RealMatrix mean_matrix(const OffspringSpec& spec) { return spec.mean(); }

bool irreducible(const RealMatrix& m) {
  const std::size_t d = m.size();
  std::vector<char> reach(d * d, 0), power(d * d, 0), next(d * d, 0);
  for (std::size_t k = 0; k < d * d; ++k) power[k] = reach[k] = m.data()[k] > 0.0;
  for (std::size_t step = 2; step <= d; ++step) {
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) {
        if (!power[a * d + b]) continue;
        for (std::size_t c = 0; c < d; ++c) {
          if (m(b, c) > 0.0) next[a * d + c] = 1;
        }
      }
    }
    power.swap(next);
    for (std::size_t k = 0; k < d * d; ++k) reach[k] = reach[k] || power[k];
  }
  return std::all_of(reach.begin(), reach.end(), [](char c) { return c != 0; });
}

double perron_eigenvalue(const RealMatrix& m) {
  const std::size_t d = m.size();
  if (d == 0) throw InvalidInput("empty matrix");
  for (double v : m.data()) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("matrix must be finite and nonnegative");
  }
  // Power iteration on M + I keeps the iterate strictly positive, so the
  // Collatz-Wielandt ratios bracket the spectral radius of M + I.
  std::vector<double> x(d, 1.0), y(d);
  for (int iter = 0; iter < 200000; ++iter) {
    double lo = INFINITY, hi = 0.0, norm = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      double s = x[a];
      for (std::size_t b = 0; b < d; ++b) s += m(a, b) * x[b];
      y[a] = s;
      lo = std::min(lo, s / x[a]);
      hi = std::max(hi, s / x[a]);
      norm = std::max(norm, s);
    }
    if (hi - lo <= 1e-12 * std::max(1.0, hi)) return std::max(0.0, 0.5 * (hi + lo) - 1.0);
    for (std::size_t a = 0; a < d; ++a) x[a] = y[a] / norm;
  }
  if (d <= 8) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  throw CapExceeded("power iteration did not converge");
}

std::string to_string(Criticality c) {
  switch (c) {
    case Criticality::kSubcritical:
      return "subcritical";
    case Criticality::kCritical:
      return "critical";
    case Criticality::kSupercritical:
      return "supercritical";
  }
  return "unknown";
}

Classification classify(const OffspringSpec& spec) {
  Classification out;
  out.rho = spec.rho();
  out.irreducible = irreducible(spec.mean());
  if (std::abs(out.rho - 1.0) <= 1e-9) {
    out.kind = Criticality::kCritical;
  } else {
    out.kind = out.rho < 1.0 ? Criticality::kSubcritical : Criticality::kSupercritical;
  }
  return out;
}

std::vector<double> expected_type_counts(const OffspringSpec& spec, int root_type) {
  const int d = spec.type_count();
  if (root_type < 1 || root_type > d) throw InvalidInput("root type out of range");
  if (!(spec.rho() < 1.0)) throw InvalidInput("expected counts need a subcritical spec");
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) -= spec.mean()(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  // Row i0 of (I - M)^{-1} solves (I - M)^T y = e_{i0}.
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  e(root_type - 1) = 1.0;
  Eigen::VectorXd y = a.transpose().fullPivLu().solve(e);
  return std::vector<double>(y.data(), y.data() + d);
}

namespace {

// Breadth-first sample: per vertex, its type and chosen table entry.
struct BfsSample {
  std::vector<int> types;
  std::vector<const OffspringEntry*> entries;
};

BfsSample sample_bfs(const OffspringSpec& spec, int root_type, const RngSpec& rng,
                     const SampleOptions& options) {
  if (root_type < 1 || root_type > spec.type_count()) throw InvalidInput("root type out of range");
  if (!options.allow_supercritical && spec.rho() > 1.0 + 1e-9) {
    throw InvalidInput("supercritical spec needs explicit acknowledgment and a vertex cap");
  }
  const RngSpec stream = rng.derive({static_cast<std::uint64_t>(RngTag::kTreeVertex)});
  BfsSample s;
  s.types.push_back(root_type);
  for (std::size_t k = 0; k < s.types.size(); ++k) {
    const OffspringEntry& e = spec.draw(s.types[k], stream.uniform(k));
    s.entries.push_back(&e);
    for (int j = 1; j <= spec.type_count(); ++j) {
      const std::int64_t c = e.counts[static_cast<std::size_t>(j - 1)];
      if (static_cast<std::int64_t>(s.types.size()) + c > options.max_vertices) {
        throw TreeTooLarge("tree exceeds " + std::to_string(options.max_vertices) + " vertices");
      }
      s.types.insert(s.types.end(), static_cast<std::size_t>(c), j);
    }
  }
  return s;
}

MultitypeTree bfs_to_tree(const OffspringSpec& spec, const BfsSample& s) {
  const int d = spec.type_count();
  const std::size_t n = s.types.size();
  std::vector<std::size_t> first_child(n);
  std::size_t next = 1;
  for (std::size_t k = 0; k < n; ++k) {
    first_child[k] = next;
    for (auto c : s.entries[k]->counts) next += static_cast<std::size_t>(c);
  }
  std::vector<int> types;
  std::vector<std::int64_t> counts;
  types.reserve(n);
  counts.reserve(n * static_cast<std::size_t>(d));
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    std::size_t k = stack.back();
    stack.pop_back();
    types.push_back(s.types[k]);
    const auto& c = s.entries[k]->counts;
    counts.insert(counts.end(), c.begin(), c.end());
    std::size_t total = 0;
    for (auto x : c) total += static_cast<std::size_t>(x);
    for (std::size_t m = total; m > 0; --m) stack.push_back(first_child[k] + m - 1);
  }
  return MultitypeTree(d, std::move(types), std::move(counts));
}

std::int64_t bfs_root_subtree_size(const BfsSample& s) {
  const std::size_t n = s.types.size();
  std::vector<char> in_root(n, 0);
  in_root[0] = 1;
  std::int64_t count = 0;
  std::size_t next = 1;
  for (std::size_t k = 0; k < n; ++k) {
    count += in_root[k];
    for (auto c : s.entries[k]->counts) {
      for (std::int64_t m = 0; m < c; ++m, ++next) {
        in_root[next] = in_root[k] && s.types[next] == s.types[0];
      }
    }
  }
  return count;
}

}  // namespace

MultitypeTree sample_mbgw(const OffspringSpec& spec, int root_type, const RngSpec& rng,
                          const SampleOptions& options) {
  return bfs_to_tree(spec, sample_bfs(spec, root_type, rng, options));
}

ExcursionSample sample_excursion_subtree(const OffspringSpec& spec, int type, const RngSpec& rng,
                                         std::int64_t max_vertices) {
  const int d = spec.type_count();
  if (type < 1 || type > d) throw InvalidInput("type out of range");
  const RngSpec stream = rng.derive({static_cast<std::uint64_t>(RngTag::kExcursion)});
  TypedWalkBundle bundle = empty_bundle(type, d);
  std::vector<std::int64_t> counts;
  std::uint64_t m = 0;
  while (bundle.coord(type).back() != -1) {
    if (static_cast<std::int64_t>(m) >= max_vertices) {
      throw TreeTooLarge("excursion exceeds " + std::to_string(max_vertices) + " steps");
    }
    const OffspringEntry& e = spec.draw(type, stream.uniform(m++));
    for (int j = 1; j <= d; ++j) {
      auto& x = bundle.coord(j);
      const std::int64_t c = e.counts[static_cast<std::size_t>(j - 1)];
      x.push_back(checked_add(x.back(), c - (j == type ? 1 : 0)));
      counts.push_back(j == type ? c : 0);
    }
  }
  const std::size_t n = static_cast<std::size_t>(bundle.steps());
  return ExcursionSample{MultitypeTree(d, std::vector<int>(n, type), std::move(counts)), std::move(bundle)};
}

ConditionedSample sample_conditioned(const OffspringSpec& spec, int root_type, std::int64_t r,
                                     const RngSpec& rng, std::int64_t max_attempts,
                                     const SampleOptions& options) {
  if (r < 1) throw InvalidInput("conditioning level must be >= 1");
  std::int64_t overflows = 0;
  for (std::int64_t a = 0; a < max_attempts; ++a) {
    RngSpec attempt = rng.derive(RngTag::kConditionedAttempt, static_cast<std::uint64_t>(a));
    BfsSample s;
    try {
      s = sample_bfs(spec, root_type, attempt, options);
    } catch (const TreeTooLarge&) {
      ++overflows;
      continue;
    }
    if (bfs_root_subtree_size(s) >= r) {
      return ConditionedSample{bfs_to_tree(spec, s), a + 1, overflows};
    }
  }
  throw CapExceeded("no accepted tree after " + std::to_string(max_attempts) + " attempts");
}

OffspringSpec geometric_spec(double p, int cap) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidInput("geometric parameter must be in (0, 1]");
  if (cap < 1) throw InvalidInput("cap must be >= 1");
  std::vector<OffspringEntry> table;
  for (int k = 0; k < cap; ++k) table.push_back({{k}, p * std::pow(1.0 - p, k)});
  table.push_back({{cap}, std::pow(1.0 - p, cap)});
  return OffspringSpec(1, {std::move(table)});
}

OffspringSpec poisson_truncated_spec(double lambda, int cap) {
  if (!(lambda >= 0.0)) throw InvalidInput("Poisson mean must be >= 0");
  if (cap < 1) throw InvalidInput("cap must be >= 1");
  std::vector<OffspringEntry> table;
  double below = 0.0;
  for (int k = 0; k < cap; ++k) {
    double pk = std::exp(-lambda + k * std::log(std::max(lambda, 1e-300)) - std::lgamma(k + 1.0));
    if (lambda == 0.0) pk = (k == 0) ? 1.0 : 0.0;
    table.push_back({{k}, pk});
    below += pk;
  }
  table.push_back({{cap}, std::max(0.0, 1.0 - below)});
  return OffspringSpec(1, {std::move(table)});
}

OffspringSpec parse_spec_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("SPEC JSON: ") + e.what());
  }
  try {
    int d = j.at("d").get<int>();
    const auto& tables = j.at("tables");
    if (!tables.is_array()) throw InvalidInput("SPEC JSON: tables must be an array");
    std::vector<std::vector<OffspringEntry>> out;
    for (const auto& t : tables) {
      std::vector<OffspringEntry> table;
      for (const auto& row : t) {
        if (!row.is_array() || row.size() != 2) throw InvalidInput("SPEC JSON: entries are [counts, p]");
        table.push_back({row[0].get<std::vector<std::int64_t>>(), row[1].get<double>()});
      }
      out.push_back(std::move(table));
    }
    return OffspringSpec(d, std::move(out));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("SPEC JSON: ") + e.what());
  }
}

std::string to_spec_json(const OffspringSpec& spec) {
  nlohmann::json tables = nlohmann::json::array();
  for (int i = 1; i <= spec.type_count(); ++i) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& e : spec.table(i)) t.push_back(nlohmann::json::array({e.counts, e.p}));
    tables.push_back(std::move(t));
  }
  nlohmann::json j;
  j["d"] = spec.type_count();
  j["tables"] = std::move(tables);
  return j.dump() + "\n";
}

}  // namespace mgw
