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

#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

namespace mgw {
namespace {

OffspringSpec two_type_spec() {
  return OffspringSpec(2, {{{{0, 0}, 0.5}, {{1, 1}, 0.3}, {{2, 0}, 0.2}},
                           {{{0, 0}, 0.6}, {{1, 0}, 0.3}, {{0, 1}, 0.1}}});
}

// The recursion written out directly with linear scans.
std::vector<std::vector<std::int64_t>> oracle_u(const DiscreteField& f, std::vector<std::int64_t> r, int rows) {
  const int d = static_cast<int>(f.size());
  auto tau = [&](int j, std::int64_t k) -> std::int64_t {
    const auto& x = f[static_cast<std::size_t>(j)].paths[static_cast<std::size_t>(j)];
    for (std::size_t m = 0; m < x.size(); ++m) {
      if (x[m] == -k) return static_cast<std::int64_t>(m);
    }
    return -1;
  };
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> rh = r;
  for (int h = 0; h < rows; ++h) {
    std::vector<std::int64_t> u;
    for (int j = 0; j < d; ++j) u.push_back(tau(j, rh[static_cast<std::size_t>(j)]));
    out.push_back(u);
    for (int j = 0; j < d; ++j) {
      rh[static_cast<std::size_t>(j)] = r[static_cast<std::size_t>(j)];
      for (int l = 0; l < d; ++l) {
        if (l != j) rh[static_cast<std::size_t>(j)] += f[static_cast<std::size_t>(l)].paths[static_cast<std::size_t>(j)][static_cast<std::size_t>(u[static_cast<std::size_t>(l)])];
      }
    }
  }
  return out;
}

TEST(PassageTest, SingleDiagonalStep) {
  DiscreteField f{{1, {{0, -1}, {0, 0}}}, {2, {{0, 0}, {0, 0}}}};
  PassageState s = minimal_hitting(f, {1, 0});
  ASSERT_TRUE(s.stabilized);
  EXPECT_EQ(s.U.size(), 1u);
  EXPECT_EQ(s.T[0], 1);
  EXPECT_EQ(s.T[1], 0);
}

TEST(PassageTest, CrossJumpAddsARoot) {
  DiscreteField f{{1, {{0, -1}, {0, 1}}}, {2, {{0, 0}, {0, -1}}}};
  PassageState s = minimal_hitting(f, {1, 0});
  ASSERT_TRUE(s.stabilized);
  ASSERT_GE(s.R.size(), 2u);
  EXPECT_EQ(s.R[1][1], 1);
  EXPECT_EQ(s.T[0], 1);
  EXPECT_EQ(s.T[1], 1);
}

TEST(PassageTest, ZeroStartStaysAtZero) {
  DiscreteField f{{1, {{0, 0}, {0, 0}}}, {2, {{0, 0}, {0, 0}}}};
  PassageState s = minimal_hitting(f, {0, 0});
  ASSERT_TRUE(s.stabilized);
  EXPECT_EQ(s.T[0], 0);
  EXPECT_EQ(s.T[1], 0);
}

TEST(PassageTest, ShortWalkIsReportedUnreached) {
  DiscreteField f{{1, {{0, 0}, {0, 0}}}, {2, {{0, 0}, {0, 0}}}};
  PassageState s = minimal_hitting(f, {1, 0});
  EXPECT_FALSE(s.stabilized);
  EXPECT_TRUE(s.unreached[0]);
  EXPECT_FALSE(s.unreached[1]);
}

TEST(PassageTest, MatchesDirectRecursionAndIsMonotone) {
  const OffspringSpec spec = two_type_spec();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    DiscreteField f = sample_field(spec, 4000, RngSpec(seed));
    const std::vector<std::int64_t> r{1 + static_cast<std::int64_t>(seed % 3), static_cast<std::int64_t>(seed % 2)};
    PassageState s = minimal_hitting(f, r);
    if (s.any_unreached()) continue;
    ASSERT_TRUE(s.stabilized);
    EXPECT_EQ(s.U, oracle_u(f, r, static_cast<int>(s.U.size())));
    for (std::size_t h = 1; h < s.U.size(); ++h) {
      for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_LE(s.R[h - 1][j], s.R[h][j]);
        EXPECT_LE(s.U[h - 1][j], s.U[h][j]);
      }
    }
    PassageState bigger = minimal_hitting(f, {r[0] + 1, r[1] + 1});
    if (bigger.stabilized) {
      EXPECT_LE(*s.T[0], *bigger.T[0]);
      EXPECT_LE(*s.T[1], *bigger.T[1]);
    }
  }
}

TEST(PassageTest, FieldPrefixesAgree) {
  const OffspringSpec spec = two_type_spec();
  DiscreteField a = sample_field(spec, 50, RngSpec(3));
  DiscreteField b = sample_field(spec, 80, RngSpec(3));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      EXPECT_TRUE(std::equal(a[i].paths[j].begin(), a[i].paths[j].end(), b[i].paths[j].begin()));
}

TEST(CouplingTest, ReducedHeightCountsEqualPassageTables) {
  const OffspringSpec spec = two_type_spec();
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::vector<std::int64_t> r{static_cast<std::int64_t>(seed % 3), 1 + static_cast<std::int64_t>(seed % 2)};
    DiscreteField f = sample_field(spec, 3000, RngSpec(seed));
    PassageState s = minimal_hitting(f, r);
    if (!s.stabilized) continue;
    auto forest = decode_multitype_forest(f, r);
    const auto rows = static_cast<std::int64_t>(s.U.size()) - 1;
    ReducedHeightCounts c = reduced_height_counts(forest, 2, rows);
    for (std::size_t h = 0; h < s.U.size(); ++h) {
      EXPECT_EQ(c.vertices[h], s.U[h]) << "seed " << seed << " h " << h;
      EXPECT_EQ(c.components[h], s.R[h]) << "seed " << seed << " h " << h;
    }
    std::vector<std::int64_t> total(2, 0);
    for (const auto& t : forest)
      for (VertexId v = 1; v <= t.size(); ++v) ++total[static_cast<std::size_t>(t.type(v) - 1)];
    EXPECT_EQ(total[0], *s.T[0]);
    EXPECT_EQ(total[1], *s.T[1]);
    ++checked;
  }
  EXPECT_GT(checked, 150);
}

TEST(CouplingTest, MonochromaticForestSize) {
  // One type, three roots: U(0) is the total size of the three trees.
  OffspringSpec spec(1, {{{{0}, 0.5}, {{2}, 0.5}}});
  DiscreteField f = sample_field(spec, 2000, RngSpec(8));
  PassageState s = minimal_hitting(f, {3});
  ASSERT_TRUE(s.stabilized);
  auto forest = decode_multitype_forest(f, {3});
  std::int64_t total = 0;
  for (const auto& t : forest) total += t.size();
  EXPECT_EQ(s.U[0][0], total);
  EXPECT_EQ(reduced_height_counts({}, 1, 0).vertices[0][0], 0);
}

TEST(ExcursionTest, LongestKInAppearanceOrder) {
  const LatticePath x{0, 1, 0, -1, -2, -2, -3};
  auto two = longest_k_excursions(x, 2, 6);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].length(), 3);
  EXPECT_EQ(two[1].length(), 2);
  EXPECT_EQ(two[1].index, 3);
  EXPECT_EQ(longest_k_excursions(x, 10, 6).size(), 3u);
  // Ties: the earlier interval wins.
  const LatticePath tie{0, -1, -2, -2, -3};
  auto one = longest_k_excursions(tie, 1, 4);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].index, 3);
  auto first = longest_k_excursions(LatticePath{0, -1, -2}, 1, 2);
  EXPECT_EQ(first[0].index, 1);
  // Horizon cuts unfinished excursions.
  EXPECT_EQ(excursion_intervals(x, 5).size(), 2u);
}

TEST(ExcursionTest, SumOfLongestGrowsWithK) {
  const OffspringSpec spec = two_type_spec();
  DiscreteField f = sample_field(spec, 500, RngSpec(1));
  const LatticePath& x = f[0].coord(1);
  std::int64_t previous = 0;
  for (std::size_t k = 1; k < 40; ++k) {
    std::int64_t sum = 0;
    for (const auto& e : longest_k_excursions(x, k, 500)) sum += e.length();
    EXPECT_GE(sum, previous);
    EXPECT_LE(sum, 500);
    previous = sum;
  }
}

TEST(GammaTest, HandTally) {
  // Three excursions: lengths 3, 1, 2 with max heights 1, 0, 1.
  const LatticePath x{0, 1, 0, -1, -2, -2, -3};
  const std::vector<std::int64_t> h = height_process(x);
  ASSERT_EQ(h, (std::vector<std::int64_t>{0, 1, 1, 0, 0, 1}));
  EXPECT_EQ(gamma_statistic(x, h, 3, 100.0, 1, 1), 0);
  EXPECT_EQ(gamma_statistic(x, h, 3, 1e-12, 1, 1), 3);
  EXPECT_EQ(gamma_statistic(x, h, 3, 1.5, 1, 1), 2);
  EXPECT_EQ(gamma_statistic(x, h, 2, 1.5, 1, 1), 1);
  EXPECT_EQ(gamma_statistic(x, h, 3, 0.5, 1, 1), 3);
  EXPECT_THROW(gamma_statistic(x, h, 4, 0.5, 1, 1), InvalidInput);
}

TEST(GammaTest, NonIncreasingInEps) {
  const OffspringSpec spec = two_type_spec();
  DiscreteField f = sample_field(spec, 3000, RngSpec(5));
  const LatticePath& x = f[0].coord(1);
  const auto h = height_process(x);
  std::int64_t previous = std::numeric_limits<std::int64_t>::max();
  for (double eps = 0.01; eps < 3; eps *= 1.3) {
    const std::int64_t g = gamma_statistic(x, h, 1.0, eps, 5.0, 25.0);
    EXPECT_LE(g, previous);
    previous = g;
  }
}

TEST(PassageCsvTest, Headers) {
  DiscreteField f{{1, {{0, -1}, {0, 1}}}, {2, {{0, 0}, {0, -1}}}};
  std::ostringstream os;
  write_passage_csv(os, minimal_hitting(f, {1, 0}));
  EXPECT_EQ(os.str(), "h,j,R,U\n0,1,1,1\n0,2,0,0\n1,1,1,1\n1,2,1,1\n");
  std::ostringstream ex;
  const LatticePath x{0, 1, 0, -1};
  write_excursion_csv(ex, longest_k_excursions(x, 1, 3), height_process(x));
  EXPECT_EQ(ex.str(), "rank,start,end,length,maxheight\n1,0,3,3,1\n");
}

}  // namespace
}  // namespace mgw
