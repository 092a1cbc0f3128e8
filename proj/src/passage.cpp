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


#include "mgw/passage.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace mgw {

void validate_field(const DiscreteField& field) {
  const int d = static_cast<int>(field.size());
  if (d < 1) throw InvalidInput("field has no bundles");
  for (int i = 1; i <= d; ++i) {
    const TypedWalkBundle& b = field[static_cast<std::size_t>(i - 1)];
    b.validate();
    if (b.base_type != i) throw InvalidInput("field bundle " + std::to_string(i) + " has wrong base type");
    if (b.type_count() != d) throw InvalidInput("field bundle has wrong number of coordinates");
  }
}

DiscreteField sample_field(const OffspringSpec& spec, std::int64_t steps, const RngSpec& rng) {
  if (steps < 0) throw InvalidInput("field length must be >= 0");
  const int d = spec.type_count();
  DiscreteField field;
  for (int i = 1; i <= d; ++i) {
    const RngSpec stream = rng.derive(RngTag::kField, static_cast<std::uint64_t>(i));
    TypedWalkBundle b = empty_bundle(i, d);
    for (auto& x : b.paths) x.reserve(static_cast<std::size_t>(steps) + 1);
    for (std::int64_t k = 0; k < steps; ++k) {
      const OffspringEntry& e = spec.draw(i, stream.uniform(static_cast<std::uint64_t>(k)));
      for (int j = 1; j <= d; ++j) {
        auto& x = b.coord(j);
        x.push_back(checked_add(x.back(), e.counts[static_cast<std::size_t>(j - 1)] - (j == i ? 1 : 0)));
      }
    }
    field.push_back(std::move(b));
  }
  return field;
}

bool PassageState::any_unreached() const {
  return std::find(unreached.begin(), unreached.end(), true) != unreached.end();
}

PassageState minimal_hitting(const DiscreteField& field, const std::vector<std::int64_t>& r, std::int64_t h_max) {
  validate_field(field);
  const int d = static_cast<int>(field.size());
  if (static_cast<int>(r.size()) != d) throw InvalidInput("r has wrong length");
  for (std::int64_t v : r) {
    if (v < 0) throw InvalidInput("r must be nonnegative");
  }
  std::vector<PassageIndex> tau;
  for (int j = 1; j <= d; ++j) tau.emplace_back(field[static_cast<std::size_t>(j - 1)].coord(j));

  PassageState s;
  s.r = r;
  s.T.assign(static_cast<std::size_t>(d), std::nullopt);
  s.unreached.assign(static_cast<std::size_t>(d), false);
  s.R.push_back(r);
  for (std::int64_t h = 0; h <= h_max; ++h) {
    const auto& rh = s.R.back();
    std::vector<std::int64_t> u(static_cast<std::size_t>(d), 0);
    for (int j = 0; j < d; ++j) {
      auto t = tau[static_cast<std::size_t>(j)].tau(rh[static_cast<std::size_t>(j)]);
      if (!t) {
        s.unreached[static_cast<std::size_t>(j)] = true;
      } else {
        u[static_cast<std::size_t>(j)] = *t;
      }
    }
    if (s.any_unreached()) return s;
    s.U.push_back(u);
    std::vector<std::int64_t> next(r);
    for (int j = 1; j <= d; ++j) {
      for (int l = 1; l <= d; ++l) {
        if (l == j) continue;
        const LatticePath& x = field[static_cast<std::size_t>(l - 1)].coord(j);
        next[static_cast<std::size_t>(j - 1)] =
            checked_add(next[static_cast<std::size_t>(j - 1)], x[static_cast<std::size_t>(u[static_cast<std::size_t>(l - 1)])]);
      }
    }
    if (next == rh) {
      s.stabilized = true;
      for (int j = 0; j < d; ++j) s.T[static_cast<std::size_t>(j)] = u[static_cast<std::size_t>(j)];
      return s;
    }
    if (h == h_max) break;
    s.R.push_back(std::move(next));
  }
  return s;
}

ReducedHeightCounts reduced_height_counts(const std::vector<MultitypeTree>& forest, int type_count,
                                          std::int64_t h_max) {
  if (h_max < 0) throw InvalidInput("h_max must be >= 0");
  const auto rows = static_cast<std::size_t>(h_max) + 1;
  const auto d = static_cast<std::size_t>(type_count);
  ReducedHeightCounts out;
  out.vertices.assign(rows, std::vector<std::int64_t>(d, 0));
  out.components.assign(rows, std::vector<std::int64_t>(d, 0));
  for (const MultitypeTree& t : forest) {
    if (t.type_count() != type_count) throw InvalidInput("forest tree has wrong type count");
    const ReducedTree reduced = reduce(t);
    for (const ReducedVertex& c : reduced.vertices()) {
      if (c.depth > h_max) continue;
      const auto j = static_cast<std::size_t>(c.type - 1);
      for (std::size_t h = static_cast<std::size_t>(c.depth); h < rows; ++h) {
        out.vertices[h][j] += static_cast<std::int64_t>(c.members.size());
        out.components[h][j] += 1;
      }
    }
  }
  return out;
}

std::vector<ExcursionInterval> excursion_intervals(const LatticePath& x, std::int64_t horizon) {
  if (horizon < 0 || horizon >= static_cast<std::int64_t>(x.size())) throw InvalidInput("horizon outside the path");
  PassageIndex index(x);
  std::vector<ExcursionInterval> out;
  for (std::int64_t k = 1; k <= index.levels_reached(); ++k) {
    const std::int64_t end = *index.tau(k);
    if (end > horizon) break;
    out.push_back({k, *index.tau(k - 1), end});
  }
  return out;
}

std::vector<ExcursionInterval> longest_k_excursions(const LatticePath& x, std::size_t k, std::int64_t horizon) {
  std::vector<ExcursionInterval> all = excursion_intervals(x, horizon);
  std::stable_sort(all.begin(), all.end(),
                   [](const ExcursionInterval& a, const ExcursionInterval& b) { return a.length() > b.length(); });
  if (all.size() > k) all.resize(k);
  std::sort(all.begin(), all.end(),
            [](const ExcursionInterval& a, const ExcursionInterval& b) { return a.index < b.index; });
  return all;
}

std::int64_t excursion_max_height(const std::vector<std::int64_t>& height, const ExcursionInterval& e) {
  if (e.start < 0 || e.end > static_cast<std::int64_t>(height.size()) || e.end <= e.start) {
    throw InvalidInput("excursion outside the height sequence");
  }
  return *std::max_element(height.begin() + e.start, height.begin() + e.end);
}

std::int64_t gamma_statistic(const LatticePath& x, const std::vector<std::int64_t>& height, double level, double eps,
                             double a, double b) {
  if (!(a > 0) || !(b > 0) || !(level >= 0)) throw InvalidInput("gamma needs a, b > 0 and level >= 0");
  const auto count = static_cast<std::int64_t>(std::floor(b * level / a));
  if (count == 0) return 0;
  const auto list = excursions(x, count);
  std::int64_t out = 0;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const ExcursionInterval e{static_cast<std::int64_t>(k) + 1, list[k].start, list[k].end};
    const double h = static_cast<double>(excursion_max_height(height, e)) / a;
    const double len = static_cast<double>(e.length()) / b;
    if (h > eps || len > eps) ++out;
  }
  return out;
}

void write_passage_csv(std::ostream& os, const PassageState& s) {
  os << "h,j,R,U\n";
  for (std::size_t h = 0; h < s.U.size(); ++h) {
    for (std::size_t j = 0; j < s.U[h].size(); ++j) {
      os << h << ',' << j + 1 << ',' << s.R[h][j] << ',' << s.U[h][j] << '\n';
    }
  }
}

void write_excursion_csv(std::ostream& os, const std::vector<ExcursionInterval>& list,
                         const std::vector<std::int64_t>& height) {
  os << "rank,start,end,length,maxheight\n";
  for (const ExcursionInterval& e : list) {
    os << e.index << ',' << e.start << ',' << e.end << ',' << e.length() << ',' << excursion_max_height(height, e)
       << '\n';
  }
}

}  // namespace mgw
