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

#include <gtest/gtest.h>

#include <cmath>

namespace mgw {
namespace {

OffspringSpec two_type_spec() {
  return OffspringSpec(2, {{{{0, 0}, 0.5}, {{1, 1}, 0.3}, {{2, 0}, 0.2}},
                           {{{0, 0}, 0.6}, {{1, 0}, 0.3}, {{0, 1}, 0.1}}});
}

RealMatrix matrix(std::size_t n, std::vector<double> values) {
  RealMatrix m(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) m(a, b) = values[a * n + b];
  return m;
}

TEST(SpecTest, RejectsBadTables) {
  EXPECT_THROW(OffspringSpec(1, {{}}), InvalidInput);
  EXPECT_THROW(OffspringSpec(1, {{{{0}, 0.5}}}), InvalidInput);
  EXPECT_THROW(OffspringSpec(1, {{{{0}, 1.5}, {{1}, -0.5}}}), InvalidInput);
  EXPECT_THROW(OffspringSpec(2, {{{{0, 0}, 1.0}}}), InvalidInput);
  EXPECT_THROW(OffspringSpec(1, {{{{-1}, 1.0}}}), InvalidInput);
}

TEST(SpecTest, MeanMatrix) {
  const RealMatrix m = mean_matrix(two_type_spec());
  EXPECT_NEAR(m(0, 0), 0.7, 1e-15);
  EXPECT_NEAR(m(0, 1), 0.3, 1e-15);
  EXPECT_NEAR(m(1, 0), 0.3, 1e-15);
  EXPECT_NEAR(m(1, 1), 0.1, 1e-15);
}

TEST(SpecTest, DrawFollowsTheTable) {
  const OffspringSpec spec = two_type_spec();
  EXPECT_EQ(spec.draw(1, 0.0).counts, (std::vector<std::int64_t>{0, 0}));
  EXPECT_EQ(spec.draw(1, 0.49).counts, (std::vector<std::int64_t>{0, 0}));
  EXPECT_EQ(spec.draw(1, 0.51).counts, (std::vector<std::int64_t>{1, 1}));
  EXPECT_EQ(spec.draw(1, 0.81).counts, (std::vector<std::int64_t>{2, 0}));
  EXPECT_EQ(spec.draw(1, 1.0 - 1e-17).counts, (std::vector<std::int64_t>{2, 0}));
}

TEST(PerronTest, Examples) {
  EXPECT_NEAR(perron_eigenvalue(matrix(2, {1, 0, 0, 1})), 1.0, 1e-10);
  EXPECT_NEAR(perron_eigenvalue(matrix(2, {0, 1, 1, 0})), 1.0, 1e-10);
  EXPECT_NEAR(perron_eigenvalue(matrix(2, {0.5, 0.25, 0.25, 0.5})), 0.75, 1e-10);
  EXPECT_NEAR(perron_eigenvalue(matrix(2, {0, 0, 0, 0})), 0.0, 1e-10);
  EXPECT_NEAR(perron_eigenvalue(matrix(3, {0, 2, 0, 0, 0, 2, 0.125, 0, 0})), 0.5 * std::cbrt(4.0), 1e-10);
  // Against the characteristic polynomial of a generic 2x2.
  const double a = 0.7, b = 0.3, c = 0.3, d = 0.1;
  const double root = 0.5 * (a + d + std::sqrt((a - d) * (a - d) + 4 * b * c));
  EXPECT_NEAR(perron_eigenvalue(matrix(2, {a, b, c, d})), root, 1e-10);
}

TEST(PerronTest, Irreducibility) {
  EXPECT_TRUE(irreducible(matrix(2, {0, 1, 1, 0})));
  EXPECT_FALSE(irreducible(matrix(2, {1, 0, 0, 1})));
  EXPECT_FALSE(irreducible(matrix(2, {1, 1, 0, 1})));
  EXPECT_TRUE(irreducible(matrix(3, {0, 1, 0, 0, 0, 1, 1, 0, 0})));
}

TEST(ClassifyTest, Kinds) {
  EXPECT_EQ(classify(geometric_spec(0.5)).kind, Criticality::kCritical);
  EXPECT_EQ(classify(geometric_spec(0.6)).kind, Criticality::kSubcritical);
  EXPECT_EQ(classify(geometric_spec(0.4)).kind, Criticality::kSupercritical);
  const Classification two = classify(two_type_spec());
  EXPECT_EQ(two.kind, Criticality::kSubcritical);
  EXPECT_TRUE(two.irreducible);
  EXPECT_NEAR(two.rho, 0.4 + std::sqrt(0.09 + 0.09), 1e-10);
  OffspringSpec reducible(2, {{{{1, 0}, 1.0}}, {{{0, 0}, 1.0}}});
  EXPECT_FALSE(classify(reducible).irreducible);
  EXPECT_EQ(to_string(Criticality::kCritical), "critical");
}

TEST(ExpectedCountsTest, MatchesNeumannSeries) {
  const OffspringSpec spec = two_type_spec();
  const RealMatrix m = mean_matrix(spec);
  for (int root = 1; root <= 2; ++root) {
    std::vector<double> row(2, 0.0), power(2, 0.0);
    power[static_cast<std::size_t>(root - 1)] = 1.0;
    for (int n = 0; n < 400; ++n) {
      row[0] += power[0];
      row[1] += power[1];
      power = {power[0] * m(0, 0) + power[1] * m(1, 0), power[0] * m(0, 1) + power[1] * m(1, 1)};
    }
    const auto got = expected_type_counts(spec, root);
    EXPECT_NEAR(got[0], row[0], 1e-9);
    EXPECT_NEAR(got[1], row[1], 1e-9);
  }
  EXPECT_THROW(expected_type_counts(geometric_spec(0.5), 1), InvalidInput);
}

TEST(SampleTest, DeterministicAndCapped) {
  const OffspringSpec spec = two_type_spec();
  EXPECT_EQ(sample_mbgw(spec, 1, RngSpec(42)), sample_mbgw(spec, 1, RngSpec(42)));
  bool differs = false;
  for (std::uint64_t s = 0; s < 20 && !differs; ++s) differs = !(sample_mbgw(spec, 1, RngSpec(s)) == sample_mbgw(spec, 1, RngSpec(s + 100)));
  EXPECT_TRUE(differs);
  int overflowed = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    try {
      EXPECT_EQ(sample_mbgw(geometric_spec(0.5), 1, RngSpec(s), {.max_vertices = 1}).size(), 1);
    } catch (const TreeTooLarge&) {
      ++overflowed;
    }
  }
  EXPECT_GT(overflowed, 0);
  EXPECT_THROW(sample_mbgw(geometric_spec(0.3), 1, RngSpec(1)), InvalidInput);
  EXPECT_THROW(sample_mbgw(spec, 3, RngSpec(1)), InvalidInput);
}

TEST(SampleTest, LeafProbabilityOfCriticalGeometric) {
  const OffspringSpec spec = geometric_spec(0.5);
  const int n = 20000;
  int single = 0;
  for (int s = 0; s < n; ++s) {
    // A tree over the cap is not a single vertex.
    try {
      single += sample_mbgw(spec, 1, RngSpec(7).replica(static_cast<std::uint64_t>(s)), {.max_vertices = 1000}).size() == 1;
    } catch (const TreeTooLarge&) {
    }
  }
  EXPECT_NEAR(static_cast<double>(single) / n, 0.5, 4 * std::sqrt(0.25 / n));
}

TEST(SampleTest, MeanTypeCountsMatchExpectation) {
  const OffspringSpec spec = two_type_spec();
  const int n = 20000;
  std::vector<double> sum(2, 0.0), sq(2, 0.0);
  for (int s = 0; s < n; ++s) {
    MultitypeTree t = sample_mbgw(spec, 1, RngSpec(11).replica(static_cast<std::uint64_t>(s)));
    std::vector<double> c(2, 0.0);
    for (VertexId v = 1; v <= t.size(); ++v) c[static_cast<std::size_t>(t.type(v) - 1)] += 1;
    for (std::size_t j = 0; j < 2; ++j) {
      sum[j] += c[j];
      sq[j] += c[j] * c[j];
    }
  }
  const auto expected = expected_type_counts(spec, 1);
  for (std::size_t j = 0; j < 2; ++j) {
    const double mean = sum[j] / n;
    const double se = std::sqrt((sq[j] / n - mean * mean) / n);
    EXPECT_NEAR(mean, expected[j], 4 * se);
  }
}

TEST(SampleTest, ChildrenAreTypeSorted) {
  const OffspringSpec spec = two_type_spec();
  for (std::uint64_t s = 0; s < 50; ++s) {
    MultitypeTree t = sample_mbgw(spec, 2, RngSpec(s));
    EXPECT_EQ(t.type(1), 2);
    for (VertexId v = 1; v <= t.size(); ++v) {
      int last = 0;
      for (VertexId c : t.children(v)) {
        EXPECT_GE(t.type(c), last);
        last = t.type(c);
      }
    }
  }
}

TEST(ExcursionSampleTest, TreeMatchesDiagonal) {
  const OffspringSpec spec = two_type_spec();
  for (std::uint64_t s = 0; s < 100; ++s) {
    ExcursionSample e = sample_excursion_subtree(spec, 1 + static_cast<int>(s % 2), RngSpec(s));
    const int i = e.bundle.base_type;
    const LatticePath& x = e.bundle.coord(i);
    EXPECT_EQ(x.back(), -1);
    for (std::size_t m = 0; m + 1 < x.size(); ++m) EXPECT_GE(x[m], 0);
    EXPECT_EQ(e.tree.size(), e.bundle.steps());
    EXPECT_EQ(encode_single(e.tree), x);
    e.bundle.validate();
  }
}

TEST(ConditionedTest, LevelsAndAttempts) {
  const OffspringSpec spec = geometric_spec(0.5);
  ConditionedSample one = sample_conditioned(spec, 1, 1, RngSpec(3));
  EXPECT_EQ(one.attempts, 1);
  for (std::uint64_t s = 0; s < 50; ++s) {
    ConditionedSample c = sample_conditioned(spec, 1, 20, RngSpec(s), kDefaultMaxAttempts, {.max_vertices = 5000});
    EXPECT_GE(root_subtree_size(c.tree), 20);
    EXPECT_GE(c.attempts, 1);
    EXPECT_EQ(c.tree, sample_conditioned(spec, 1, 20, RngSpec(s), kDefaultMaxAttempts, {.max_vertices = 5000}).tree);
  }
  EXPECT_THROW(sample_conditioned(spec, 1, 1000, RngSpec(1), 3), CapExceeded);
  EXPECT_THROW(sample_conditioned(spec, 1, 0, RngSpec(1)), InvalidInput);
}

TEST(ConditionedTest, RootSubtreeOnlyCountsTheRootType) {
  const OffspringSpec spec = two_type_spec();
  for (std::uint64_t s = 0; s < 30; ++s) {
    ConditionedSample c = sample_conditioned(spec, 2, 2, RngSpec(s));
    EXPECT_GE(root_subtree_size(c.tree), 2);
    EXPECT_EQ(c.tree.type(1), 2);
  }
}

TEST(PresetTest, Geometric) {
  const OffspringSpec g = geometric_spec(0.5, 8);
  double total = 0.0;
  for (const auto& e : g.table(1)) total += e.p;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(g.table(1).back().p, std::pow(0.5, 8), 1e-15);
  EXPECT_THROW(geometric_spec(0.0), InvalidInput);
}

TEST(PresetTest, PoissonTruncated) {
  const OffspringSpec p = poisson_truncated_spec(1.0, 30);
  EXPECT_NEAR(p.table(1)[0].p, std::exp(-1.0), 1e-15);
  EXPECT_NEAR(p.table(1)[3].p, std::exp(-1.0) / 6, 1e-15);
  EXPECT_NEAR(p.mean()(0, 0), 1.0, 1e-12);
  EXPECT_EQ(poisson_truncated_spec(0.0, 3).table(1)[0].p, 1.0);
}

TEST(SpecJsonTest, RoundTripAndErrors) {
  const OffspringSpec spec = two_type_spec();
  const OffspringSpec back = parse_spec_json(to_spec_json(spec));
  ASSERT_EQ(back.type_count(), 2);
  for (int i = 1; i <= 2; ++i) {
    ASSERT_EQ(back.table(i).size(), spec.table(i).size());
    for (std::size_t k = 0; k < spec.table(i).size(); ++k) {
      EXPECT_EQ(back.table(i)[k].counts, spec.table(i)[k].counts);
      EXPECT_EQ(back.table(i)[k].p, spec.table(i)[k].p);
    }
  }
  EXPECT_THROW(parse_spec_json("not json"), InvalidInput);
  EXPECT_THROW(parse_spec_json(R"({"d":1,"tables":[[[[0],0.5]]]})"), InvalidInput);
  EXPECT_THROW(parse_spec_json(R"({"d":2,"tables":[[[[0],1.0]]]})"), InvalidInput);
}

}  // namespace
}  // namespace mgw
