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

#include "mgw/mm_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_set>

#include <json.hpp>

#include "mgw/max_flow.hpp"

namespace mgw {

double FiniteMMSpace::total_mass(int j) const {
  double s = 0.0;
  for (std::size_t p = 0; p < size(); ++p) s += mass(p, j);
  return s;
}

std::vector<double> FiniteMMSpace::coordinate(int j) const {
  std::vector<double> out(size());
  for (std::size_t p = 0; p < size(); ++p) out[p] = mass(p, j);
  return out;
}

void FiniteMMSpace::validate(double tol) const {
  const std::size_t n = size();
  if (n == 0) throw InvalidInput("space has no points");
  if (type_count < 1) throw InvalidInput("space needs d >= 1");
  if (root >= n) throw InvalidInput("root out of range");
  for (auto m : marks) {
    if (m >= n) throw InvalidInput("mark out of range");
  }
  if (measure.size() != n * static_cast<std::size_t>(type_count)) throw InvalidInput("measure table has wrong shape");
  for (double m : measure) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw InvalidInput("measure must be finite and nonnegative");
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (std::abs(dist(a, a)) > tol) throw InvalidInput("nonzero self distance");
    for (std::size_t b = 0; b < n; ++b) {
      if (!(dist(a, b) >= -tol) || !std::isfinite(dist(a, b))) throw InvalidInput("negative or infinite distance");
      if (std::abs(dist(a, b) - dist(b, a)) > tol) throw InvalidInput("distance matrix is not symmetric");
      for (std::size_t c = 0; c < n; ++c) {
        if (dist(a, c) > dist(a, b) + dist(b, c) + tol) throw InvalidInput("triangle inequality fails");
      }
    }
  }
}

FiniteMMSpace FiniteMMSpace::from_distances(RealMatrix dist, std::size_t root, int type_count) {
  FiniteMMSpace s;
  s.measure.assign(dist.size() * static_cast<std::size_t>(type_count), 0.0);
  s.dist = std::move(dist);
  s.root = root;
  s.type_count = type_count;
  return s;
}

double hausdorff(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b, const RealMatrix& d) {
  if (a.empty() || b.empty()) throw InvalidInput("Hausdorff distance needs nonempty sets");
  auto directed = [&](const std::vector<std::size_t>& from, const std::vector<std::size_t>& to) {
    double worst = 0.0;
    for (auto x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (auto y : to) best = std::min(best, d(x, y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

double prohorov(const std::vector<double>& mu, const std::vector<double>& nu, const RealMatrix& d) {
  const std::size_t n = d.size();
  if (mu.size() != n || nu.size() != n) throw InvalidInput("measure length does not match the space");
  double mu_total = 0.0, nu_total = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    if (!(mu[p] >= 0.0) || !(nu[p] >= 0.0)) throw InvalidInput("measures must be nonnegative");
    mu_total += mu[p];
    nu_total += nu[p];
  }
  std::vector<double> radii{0.0};
  for (double v : d.data()) radii.push_back(v);
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  // For radius r, max_A mu(A) - nu(A^r) = mu_total - maxflow_r; the flow is
  // symmetric in (mu, nu) because d is.
  double best = std::numeric_limits<double>::infinity();
  for (double r : radii) {
    if (r >= best) break;
    MaxFlow flow(2 * n + 2);
    const std::size_t s = 2 * n, t = 2 * n + 1;
    for (std::size_t a = 0; a < n; ++a) {
      if (mu[a] > 0.0) flow.add_edge(s, a, mu[a]);
      if (nu[a] > 0.0) flow.add_edge(n + a, t, nu[a]);
      if (mu[a] <= 0.0) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (nu[b] > 0.0 && d(a, b) <= r) flow.add_edge(a, n + b, mu_total + nu_total + 1.0);
      }
    }
    double f = flow.run(s, t);
    double gap = std::max({mu_total - f, nu_total - f, 0.0});
    best = std::min(best, std::max(r, gap));
  }
  return best;
}

double distortion(const Correspondence& r, const FiniteMMSpace& x, const FiniteMMSpace& y) {
  std::vector<char> hit_x(x.size(), 0), hit_y(y.size(), 0);
  for (auto [a, b] : r) {
    if (a >= x.size() || b >= y.size()) throw InvalidInput("correspondence pair out of range");
    hit_x[a] = hit_y[b] = 1;
  }
  if (std::find(hit_x.begin(), hit_x.end(), 0) != hit_x.end() ||
      std::find(hit_y.begin(), hit_y.end(), 0) != hit_y.end()) {
    throw InvalidInput("correspondence is not surjective");
  }
  double worst = 0.0;
  for (auto [a, b] : r) {
    for (auto [c, e] : r) worst = std::max(worst, std::abs(x.dist(a, c) - y.dist(b, e)));
  }
  return worst;
}

RealMatrix glue_along(const Correspondence& r, const FiniteMMSpace& x, const FiniteMMSpace& y) {
  const double half = distortion(r, x, y) / 2.0;
  const std::size_t nx = x.size(), ny = y.size();
  RealMatrix z(nx + ny, 0.0);
  for (std::size_t a = 0; a < nx; ++a)
    for (std::size_t b = 0; b < nx; ++b) z(a, b) = x.dist(a, b);
  for (std::size_t a = 0; a < ny; ++a)
    for (std::size_t b = 0; b < ny; ++b) z(nx + a, nx + b) = y.dist(a, b);
  for (std::size_t a = 0; a < nx; ++a) {
    for (std::size_t b = 0; b < ny; ++b) {
      double best = std::numeric_limits<double>::infinity();
      for (auto [p, q] : r) best = std::min(best, x.dist(a, p) + y.dist(q, b));
      z(a, nx + b) = z(nx + b, a) = best + half;
    }
  }
  return z;
}

namespace {

// Pairs (x, y) are vertices x * ny + y of a compatibility graph on at most
// 64 vertices.
class PairGraph {
 public:
  PairGraph(const FiniteMMSpace& x, const FiniteMMSpace& y) : x_(x), y_(y), nx_(x.size()), ny_(y.size()) {
    n_ = nx_ * ny_;
    row_.assign(nx_, 0);
    col_.assign(ny_, 0);
    for (std::size_t a = 0; a < nx_; ++a) {
      for (std::size_t b = 0; b < ny_; ++b) {
        row_[a] |= bit(a * ny_ + b);
        col_[b] |= bit(a * ny_ + b);
      }
    }
    gap_.assign(n_ * n_, 0.0);
    for (std::size_t u = 0; u < n_; ++u) {
      for (std::size_t v = 0; v < n_; ++v) {
        gap_[u * n_ + v] = std::abs(x.dist(u / ny_, v / ny_) - y.dist(u % ny_, v % ny_));
        values_.push_back(gap_[u * n_ + v]);
      }
    }
    values_.push_back(0.0);
    std::sort(values_.begin(), values_.end());
    values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
  }

  static std::uint64_t bit(std::size_t k) { return std::uint64_t{1} << k; }

  const std::vector<double>& thresholds() const { return values_; }
  std::size_t vertex(std::size_t a, std::size_t b) const { return a * ny_ + b; }

  void set_threshold(double t) {
    adj_.assign(n_, 0);
    for (std::size_t u = 0; u < n_; ++u)
      for (std::size_t v = 0; v < n_; ++v)
        if (u != v && gap_[u * n_ + v] <= t) adj_[u] |= bit(v);
    threshold_ = t;
  }
  bool compatible(std::size_t u, std::size_t v) const { return gap_[u * n_ + v] <= threshold_; }
  std::uint64_t neighbours(std::size_t u) const { return adj_[u]; }
  std::uint64_t all() const { return n_ == 64 ? ~std::uint64_t{0} : bit(n_) - 1; }

  bool surjective(std::uint64_t m) const {
    for (auto r : row_)
      if (!(m & r)) return false;
    for (auto c : col_)
      if (!(m & c)) return false;
    return true;
  }

  Correspondence pairs(std::uint64_t m) const {
    Correspondence out;
    for (std::size_t u = 0; u < n_; ++u)
      if (m & bit(u)) out.emplace_back(u / ny_, u % ny_);
    return out;
  }

  // Bron-Kerbosch with pivoting. `report` returns true to stop.
  template <typename F>
  bool maximal_cliques(std::uint64_t r, std::uint64_t p, std::uint64_t x, F& report) const {
    if (!p && !x) return report(r);
    std::uint64_t px = p | x;
    std::size_t pivot = static_cast<std::size_t>(std::countr_zero(px));
    int best = -1;
    for (std::uint64_t m = px; m; m &= m - 1) {
      auto u = static_cast<std::size_t>(std::countr_zero(m));
      int c = std::popcount(p & adj_[u]);
      if (c > best) {
        best = c;
        pivot = u;
      }
    }
    for (std::uint64_t m = p & ~adj_[pivot]; m; m &= m - 1) {
      auto v = static_cast<std::size_t>(std::countr_zero(m));
      if (maximal_cliques(r | bit(v), p & adj_[v], x & adj_[v], report)) return true;
      p &= ~bit(v);
      x |= bit(v);
    }
    return false;
  }

 private:
  const FiniteMMSpace& x_;
  const FiniteMMSpace& y_;
  std::size_t nx_, ny_, n_;
  std::vector<std::uint64_t> row_, col_, adj_;
  std::vector<double> gap_;
  std::vector<double> values_;
  double threshold_ = 0.0;
};

void check_cap(const FiniteMMSpace& x, const FiniteMMSpace& y, std::size_t cap) {
  if (x.size() == 0 || y.size() == 0) throw InvalidInput("spaces must be nonempty");
  const std::size_t pairs = x.size() * y.size();
  if (pairs > cap || pairs > 64) {
    throw CapExceeded("correspondence search over " + std::to_string(pairs) + " pairs exceeds cap " +
                      std::to_string(std::min<std::size_t>(cap, 64)));
  }
}

}  // namespace

double gh_marked(const FiniteMMSpace& x, const FiniteMMSpace& y, std::size_t k, std::size_t cap) {
  check_cap(x, y, cap);
  PairGraph g(x, y);
  std::vector<std::size_t> forced{g.vertex(x.root, y.root)};
  for (std::size_t l = 1; l <= k; ++l) forced.push_back(g.vertex(x.mark(l), y.mark(l)));

  auto feasible = [&](double t) {
    g.set_threshold(t);
    for (auto u : forced)
      for (auto v : forced)
        if (!g.compatible(u, v)) return false;
    std::uint64_t cand = 0;
    for (std::uint64_t m = g.all(); m; m &= m - 1) {
      auto u = static_cast<std::size_t>(std::countr_zero(m));
      bool ok = true;
      for (auto f : forced) ok = ok && g.compatible(u, f);
      if (ok) cand |= PairGraph::bit(u);
    }
    bool found = false;
    auto report = [&](std::uint64_t r) {
      found = g.surjective(r);
      return found;
    };
    g.maximal_cliques(0, cand, 0, report);
    return found;
  };

  const auto& t = g.thresholds();
  std::size_t lo = 0, hi = t.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (feasible(t[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return t[lo] / 2.0;
}

double ghp_estimate(const FiniteMMSpace& x, const FiniteMMSpace& y, std::size_t k, std::size_t cap) {
  check_cap(x, y, cap);
  if (x.type_count != y.type_count) throw InvalidInput("spaces carry measures of different dimension");
  PairGraph g(x, y);
  // Every correspondence sits inside a maximal clique of the compatibility
  // graph at its own distortion, and enlarging R only shrinks the glued
  // distances, so maximal cliques suffice.
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::uint64_t> cliques;
  for (double t : g.thresholds()) {
    g.set_threshold(t);
    auto report = [&](std::uint64_t r) {
      if (g.surjective(r) && seen.insert(r).second) cliques.push_back(r);
      return false;
    };
    g.maximal_cliques(0, g.all(), 0, report);
  }

  const std::size_t nx = x.size(), ny = y.size();
  std::vector<std::size_t> xs(nx), ys(ny);
  for (std::size_t a = 0; a < nx; ++a) xs[a] = a;
  for (std::size_t b = 0; b < ny; ++b) ys[b] = nx + b;
  std::vector<double> best(static_cast<std::size_t>(x.type_count), std::numeric_limits<double>::infinity());
  for (auto m : cliques) {
    RealMatrix z = glue_along(g.pairs(m), x, y);
    double h = hausdorff(xs, ys, z);
    double marks = z(x.root, nx + y.root);
    for (std::size_t l = 1; l <= k; ++l) marks = std::max(marks, z(x.mark(l), nx + y.mark(l)));
    for (int j = 1; j <= x.type_count; ++j) {
      double base = h + marks;
      if (base >= best[static_cast<std::size_t>(j - 1)]) continue;
      std::vector<double> mu(nx + ny, 0.0), nu(nx + ny, 0.0);
      for (std::size_t a = 0; a < nx; ++a) mu[a] = x.mass(a, j);
      for (std::size_t b = 0; b < ny; ++b) nu[nx + b] = y.mass(b, j);
      double value = base + prohorov(mu, nu, z);
      best[static_cast<std::size_t>(j - 1)] = std::min(best[static_cast<std::size_t>(j - 1)], value);
    }
  }
  double total = 0.0;
  for (double b : best) total += b;
  return total;
}

FiniteMMSpace tree_from_height(const std::vector<double>& h, int type_count, int type,
                               std::vector<std::size_t>* point_of_sample) {
  const std::size_t n = h.size();
  if (n == 0) throw InvalidInput("height function has no samples");
  if (type < 1 || type > type_count) throw InvalidInput("type out of range");
  for (double v : h) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("height function must be nonnegative");
  }
  auto df = [&](std::size_t s, std::size_t t) {
    if (s > t) std::swap(s, t);
    double low = h[s];
    for (std::size_t u = s; u <= t; ++u) low = std::min(low, h[u]);
    return h[s] + h[t] - 2.0 * low;
  };
  std::vector<std::size_t> reps;
  std::vector<std::size_t> cls(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::size_t found = reps.size();
    for (std::size_t c = 0; c < reps.size(); ++c) {
      if (df(reps[c], s) <= 1e-12) {
        found = c;
        break;
      }
    }
    if (found == reps.size()) reps.push_back(s);
    cls[s] = found;
  }
  RealMatrix dist(reps.size(), 0.0);
  for (std::size_t a = 0; a < reps.size(); ++a)
    for (std::size_t b = 0; b < reps.size(); ++b) dist(a, b) = a == b ? 0.0 : df(reps[a], reps[b]);
  FiniteMMSpace out = FiniteMMSpace::from_distances(std::move(dist), 0, type_count);
  for (std::size_t s = 0; s < n; ++s) {
    out.measure[cls[s] * static_cast<std::size_t>(type_count) + static_cast<std::size_t>(type - 1)] +=
        1.0 / static_cast<double>(n);
  }
  if (point_of_sample) *point_of_sample = cls;
  return out;
}

double gh_bound_from_heights(const std::vector<double>& h1, const std::vector<double>& h2) {
  if (h1.empty() || h2.empty()) throw InvalidInput("height functions need samples");
  auto at = [](const std::vector<double>& h, double t) {
    if (h.size() == 1) return h[0];
    double pos = t * static_cast<double>(h.size() - 1);
    auto k = static_cast<std::size_t>(std::floor(pos));
    if (k + 1 >= h.size()) return h.back();
    double frac = pos - static_cast<double>(k);
    return h[k] + frac * (h[k + 1] - h[k]);
  };
  // The difference is linear between the union of breakpoints.
  std::vector<double> grid;
  for (std::size_t k = 0; k < h1.size(); ++k) grid.push_back(h1.size() == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(h1.size() - 1));
  for (std::size_t k = 0; k < h2.size(); ++k) grid.push_back(h2.size() == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(h2.size() - 1));
  grid.push_back(1.0);
  double sup = 0.0;
  for (double t : grid) sup = std::max(sup, std::abs(at(h1, t) - at(h2, t)));
  return 2.0 * sup;
}

std::string to_space_json(const FiniteMMSpace& s) {
  nlohmann::json j;
  j["n"] = s.size();
  std::vector<double> upper;
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = a + 1; b < s.size(); ++b) upper.push_back(s.dist(a, b));
  j["dist"] = upper;
  j["root"] = s.root;
  nlohmann::json measure = nlohmann::json::array();
  for (std::size_t p = 0; p < s.size(); ++p) {
    std::vector<double> row;
    for (int t = 1; t <= s.type_count; ++t) row.push_back(s.mass(p, t));
    measure.push_back(row);
  }
  j["measure"] = measure;
  j["marks"] = s.marks;
  return j.dump() + "\n";
}

FiniteMMSpace parse_space_json(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    const auto n = j.at("n").get<std::size_t>();
    if (n == 0) throw InvalidInput("SPACE JSON: n must be positive");
    auto upper = j.at("dist").get<std::vector<double>>();
    if (upper.size() != n * (n - 1) / 2) throw InvalidInput("SPACE JSON: dist has wrong length");
    RealMatrix dist(n, 0.0);
    std::size_t k = 0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) dist(a, b) = dist(b, a) = upper[k++];
    FiniteMMSpace s;
    s.dist = std::move(dist);
    s.root = j.at("root").get<std::size_t>();
    auto measure = j.at("measure").get<std::vector<std::vector<double>>>();
    if (measure.size() != n || measure.front().empty()) throw InvalidInput("SPACE JSON: measure must have n rows");
    s.type_count = static_cast<int>(measure.front().size());
    for (const auto& row : measure) {
      if (static_cast<int>(row.size()) != s.type_count) throw InvalidInput("SPACE JSON: ragged measure");
      s.measure.insert(s.measure.end(), row.begin(), row.end());
    }
    if (j.contains("marks")) s.marks = j.at("marks").get<std::vector<std::size_t>>();
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("SPACE JSON: ") + e.what());
  }
}

}  // namespace mgw
