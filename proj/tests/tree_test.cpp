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

#include "mgw/tree.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "test_util.hpp"

namespace mgw {
namespace {

using testing::build;
using testing::leaf;
using testing::node;

// Ulam coordinates (child index words) in flatten order.
void coords(const testing::Node& n, std::vector<std::int64_t> at, std::vector<std::vector<std::int64_t>>& out) {
  out.push_back(at);
  for (std::size_t k = 0; k < n.kids.size(); ++k) {
    auto next = at;
    next.push_back(static_cast<std::int64_t>(k + 1));
    coords(n.kids[k], next, out);
  }
}

TEST(UlamLabelTest, BasicOperations) {
  UlamLabel p{2, 5};
  EXPECT_EQ(p.generation(), 2u);
  EXPECT_EQ(p.child(1), (UlamLabel{2, 5, 1}));
  EXPECT_EQ(p.parent(), UlamLabel{2});
  EXPECT_TRUE(UlamLabel{2}.is_prefix_of(p));
  EXPECT_EQ(common_ancestor(UlamLabel{2, 5, 1}, UlamLabel{2, 4}), UlamLabel{2});
  EXPECT_EQ(UlamLabel::root().to_string(), "()");
  EXPECT_EQ(p.to_string(), "(2,5)");
  EXPECT_EQ(p.concat(UlamLabel{7}).concat(UlamLabel{1}), p.concat(UlamLabel{7, 1}));
  EXPECT_THROW(UlamLabel({0}), InvalidInput);
  EXPECT_THROW(UlamLabel::root().parent(), InvalidInput);
}

TEST(UlamLabelTest, LetterArithmetic) {
  EXPECT_EQ(label_letter(2, 1, 3), 2);
  EXPECT_EQ(label_letter(2, 2, 3), 5);
  EXPECT_EQ(letter_type(3, 3), 3);
  EXPECT_EQ(letter_type(6, 3), 3);
  EXPECT_EQ(letter_type(4, 3), 1);
  EXPECT_EQ(letter_rank(5, 3), 2);
}

TEST(MultitypeTreeTest, RejectsMalformedSequences) {
  EXPECT_THROW(MultitypeTree(1, {}, {}), InvalidInput);
  EXPECT_THROW(MultitypeTree(1, {1, 1}, {0, 0}), InvalidInput);
  EXPECT_THROW(MultitypeTree(1, {1, 1}, {2, 0}), InvalidInput);
  // Root asks for a type-2 child, gets type 1.
  EXPECT_THROW(MultitypeTree(2, {1, 1}, {0, 1, 0, 0}), InvalidInput);
  // Closes early: root has one child, then a third vertex hangs nowhere.
  EXPECT_THROW(MultitypeTree(1, {1, 1, 1}, {1, 0, 1}), InvalidInput);
  EXPECT_THROW(MultitypeTree(1, {2}, {0}), InvalidInput);
}

TEST(MultitypeTreeTest, DepthFirstOrderMatchesLexicographicCoordinates) {
  // root, children A, B; A has child C.
  auto shape = node(1, {node(1, {leaf()}), leaf()});
  auto t = build(shape, 1);
  std::vector<std::vector<std::int64_t>> c;
  coords(shape, {}, c);
  std::vector<std::size_t> order(c.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return c[a] < c[b]; });
  auto dfo = depth_first_order(t);
  ASSERT_EQ(dfo.size(), order.size());
  for (std::size_t k = 0; k < dfo.size(); ++k) EXPECT_EQ(dfo[k], static_cast<VertexId>(order[k] + 1));
  // [root, A, C, B] in the ids of the hand picture.
  EXPECT_EQ(t.children(1)[0], 2);
  EXPECT_EQ(t.children(2)[0], 3);
  EXPECT_EQ(t.children(1)[1], 4);
  EXPECT_EQ(depth_first_order(build(leaf(), 1)), std::vector<VertexId>{1});
  EXPECT_EQ(depth_first_order(build(testing::path(3), 1)), (std::vector<VertexId>{1, 2, 3}));
}

TEST(MultitypeTreeTest, BreadthFirstOrderMatchesHeightThenRank) {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 200; ++rep) {
    auto shape = testing::random_tree(gen, 2, 30);
    auto t = build(shape, 2);
    std::vector<int> parent;
    testing::parents_of(shape, -1, parent);
    std::vector<int> h(parent.size(), 0);
    for (std::size_t v = 1; v < parent.size(); ++v) h[v] = h[static_cast<std::size_t>(parent[v])] + 1;
    std::vector<VertexId> expect(parent.size());
    for (std::size_t k = 0; k < expect.size(); ++k) expect[k] = static_cast<VertexId>(k + 1);
    std::stable_sort(expect.begin(), expect.end(), [&](auto a, auto b) { return h[a - 1] < h[b - 1]; });
    EXPECT_EQ(breadth_first_order(t), expect);
    for (VertexId v = 1; v <= t.size(); ++v) {
      EXPECT_EQ(vertex_height(t, v), h[static_cast<std::size_t>(v - 1)]);
      EXPECT_EQ(t.parent(v), parent[static_cast<std::size_t>(v - 1)] + 1);
    }
  }
  // root, children A, B; A has child C -> [root, A, B, C].
  auto t = build(node(1, {node(1, {leaf()}), leaf()}), 1);
  EXPECT_EQ(breadth_first_order(t), (std::vector<VertexId>{1, 2, 4, 3}));
}

TEST(MultitypeTreeTest, VertexHeight) {
  auto t = build(testing::path(3), 1);
  EXPECT_EQ(vertex_height(t, 1), 0);
  EXPECT_EQ(vertex_height(t, 3), 2);
  EXPECT_EQ(vertex_height(t, 2), 1);
  EXPECT_THROW(vertex_height(t, 4), InvalidInput);
  EXPECT_THROW(vertex_height(t, 0), InvalidInput);
}

TEST(ReduceTest, MonochromaticTreeCollapsesToOneVertex) {
  auto t = build(node(1, {node(1, {leaf(), leaf()}), node(1, {leaf(), node(1, {leaf(), leaf()})})}), 1);
  ASSERT_EQ(t.size(), 9);
  auto r = reduce(t);
  ASSERT_EQ(r.size(), 1);
  EXPECT_EQ(r.vertices()[0].members.size(), 9u);
  EXPECT_TRUE(r.vertices()[0].label.is_root());
  EXPECT_EQ(*type_subtree(t, UlamLabel::root()), t);
  EXPECT_FALSE(type_subtree(t, UlamLabel{2}).has_value());
}

TEST(ReduceTest, OneCrossChild) {
  auto t = build(node(1, {leaf(2)}), 2);
  auto r = reduce(t);
  ASSERT_EQ(r.size(), 2);
  EXPECT_EQ(r.vertices()[0].label, UlamLabel::root());
  EXPECT_EQ(r.vertices()[1].label, UlamLabel{2});
  EXPECT_EQ(r.vertices()[1].attach_vertex, 1);
}

TEST(ReduceTest, LargerSubtreeGetsSmallerLabel) {
  // Type-1 root with a size-1 type-2 subtree first and a size-3 one second.
  const int d = 2;
  auto t = build(node(1, {leaf(2), node(2, {leaf(2), leaf(2)})}), d);
  auto r = reduce(t);
  ASSERT_EQ(r.size(), 3);
  auto big = r.find(UlamLabel{2});
  auto small = r.find(UlamLabel{2 + d});
  ASSERT_GE(big, 0);
  ASSERT_GE(small, 0);
  EXPECT_EQ(r.vertices()[static_cast<std::size_t>(big)].members.size(), 3u);
  EXPECT_EQ(r.vertices()[static_cast<std::size_t>(small)].members.size(), 1u);
  auto sub = type_subtree(t, UlamLabel{2});
  ASSERT_TRUE(sub.has_value());
  EXPECT_EQ(sub->size(), 3);
  EXPECT_EQ(sub->type(1), 2);
  EXPECT_EQ(sub->child_count(1, 2), 2);
}

TEST(ReduceTest, EqualSizesKeepPlanarOrder) {
  auto t = build(node(1, {leaf(2), leaf(2)}), 2);
  auto r = reduce(t);
  EXPECT_EQ(r.vertices()[static_cast<std::size_t>(r.find(UlamLabel{2}))].members.front(), 2);
  EXPECT_EQ(r.vertices()[static_cast<std::size_t>(r.find(UlamLabel{4}))].members.front(), 3);
}

TEST(ReduceTest, RandomTreesSatisfyStructuralInvariants) {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 300; ++rep) {
    const int d = 1 + rep % 3;
    auto t = build(testing::random_tree(gen, d, 40), d);
    auto r = reduce(t);
    std::vector<int> seen(static_cast<std::size_t>(t.size()), 0);
    for (std::size_t k = 0; k < r.vertices().size(); ++k) {
      const auto& w = r.vertices()[k];
      for (auto v : w.members) {
        ++seen[static_cast<std::size_t>(v - 1)];
        EXPECT_EQ(t.type(v), w.type);
        EXPECT_EQ(r.component_of(v), static_cast<std::int64_t>(k));
      }
      if (w.parent >= 0) {
        const auto& p = r.vertices()[static_cast<std::size_t>(w.parent)];
        EXPECT_NE(p.type, w.type);
        EXPECT_EQ(w.label.parent(), p.label);
        EXPECT_EQ(letter_type(w.label.last(), d), w.type);
        EXPECT_EQ(t.parent(w.members.front()), w.attach_vertex);
        EXPECT_EQ(r.component_of(w.attach_vertex), w.parent);
      }
      // Sizes of same-type children are non-increasing in rank.
      std::map<int, std::vector<std::pair<std::int64_t, std::size_t>>> by_type;
      for (auto c : w.children) {
        const auto& cw = r.vertices()[static_cast<std::size_t>(c)];
        by_type[cw.type].emplace_back(letter_rank(cw.label.last(), d), cw.members.size());
      }
      for (auto& [j, v] : by_type) {
        std::sort(v.begin(), v.end());
        for (std::size_t m = 0; m < v.size(); ++m) {
          EXPECT_EQ(v[m].first, static_cast<std::int64_t>(m + 1));
          if (m > 0) EXPECT_GE(v[m - 1].second, v[m].second);
        }
      }
    }
    for (int s : seen) EXPECT_EQ(s, 1);
    EXPECT_EQ(r.shape().size(), r.size());
  }
}

TEST(PlantTest, AddsOnePointAndShiftsRootDistances) {
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 50; ++rep) {
    auto t = build(testing::random_tree(gen, 2, 25), 2);
    auto planted = plant(t);
    EXPECT_EQ(planted.point_count(), t.size() + 1);
    auto dist = graph_distance_matrix(planted);
    for (VertexId v = 1; v <= t.size(); ++v) {
      EXPECT_EQ(dist(0, static_cast<std::size_t>(v)), t.height(v) + 1);
    }
  }
  auto edge = graph_distance_matrix(plant(MultitypeTree::single_vertex(1, 1)));
  EXPECT_EQ(edge(0, 1), 1);
  EXPECT_EQ(edge.size(), 2u);
}

TEST(DistanceTest, MatchesFloydWarshall) {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 50; ++rep) {
    auto shape = testing::random_tree(gen, 3, 30);
    auto t = build(shape, 3);
    std::vector<int> parent;
    testing::parents_of(shape, -1, parent);
    auto oracle = testing::floyd(parent);
    auto dist = graph_distance_matrix(t);
    for (std::size_t a = 0; a < parent.size(); ++a)
      for (std::size_t b = 0; b < parent.size(); ++b) EXPECT_EQ(dist(a, b), oracle[a][b]);
  }
  EXPECT_EQ(graph_distance_matrix(MultitypeTree::single_vertex(1, 1))(0, 0), 0);
  auto p3 = graph_distance_matrix(build(testing::path(3), 1));
  EXPECT_EQ(*std::max_element(p3.data().begin(), p3.data().end()), 2);
  EXPECT_THROW(graph_distance_matrix(build(testing::path(5), 1), 4), CapExceeded);
}

TEST(MtreeTest, RoundTripsBitExactly) {
  std::mt19937_64 gen(9);
  for (int rep = 0; rep < 100; ++rep) {
    auto t = build(testing::random_tree(gen, 3, 30), 3);
    bool planted = rep % 2 == 0;
    std::string text = to_mtree(t, planted);
    auto doc = parse_mtree(text);
    EXPECT_EQ(doc.tree, t);
    EXPECT_EQ(doc.planted, planted);
    EXPECT_EQ(to_mtree(doc.tree, doc.planted), text);
  }
  EXPECT_EQ(to_mtree(build(node(1, {leaf(2)}), 2)), "MTREE 1 d=2\n1 0 1\n2 0 0\n");
}

TEST(MtreeTest, RejectsMalformedText) {
  EXPECT_THROW(parse_mtree(""), InvalidInput);
  EXPECT_THROW(parse_mtree("MTREE 2 d=1\n1 0\n"), InvalidInput);
  EXPECT_THROW(parse_mtree("MTREE 1 d=2\n1 0\n"), InvalidInput);
  EXPECT_THROW(parse_mtree("MTREE 1 d=1\n1 0 0\n"), InvalidInput);
  EXPECT_THROW(parse_mtree("MTREE 1 d=1 color=red\n1 0\n"), InvalidInput);
  EXPECT_THROW(parse_mtree("MTREE 1 d=1\n1 1\n"), InvalidInput);
}

}  // namespace
}  // namespace mgw
