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

// Helpers shared by the unit tests. Nothing here calls into the library's
// traversal code, so it can serve as an oracle.

#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "mgw/tree.hpp"

namespace mgw::testing {

/// A tree written out by hand. Children are kept in the given order, which
/// must already list lower types first.
struct Node {
  int type = 1;
  std::vector<Node> kids;
};

inline Node leaf(int type = 1) { return Node{type, {}}; }
inline Node node(int type, std::vector<Node> kids) { return Node{type, std::move(kids)}; }

inline void flatten(const Node& n, int d, std::vector<int>& types, std::vector<std::int64_t>& counts) {
  types.push_back(n.type);
  std::vector<std::int64_t> row(static_cast<std::size_t>(d), 0);
  for (const auto& k : n.kids) ++row[static_cast<std::size_t>(k.type - 1)];
  counts.insert(counts.end(), row.begin(), row.end());
  for (const auto& k : n.kids) flatten(k, d, types, counts);
}

inline MultitypeTree build(const Node& root, int d) {
  std::vector<int> types;
  std::vector<std::int64_t> counts;
  flatten(root, d, types, counts);
  return MultitypeTree(d, std::move(types), std::move(counts));
}

inline Node path(int n, int type = 1) {
  Node root = leaf(type);
  for (int k = 1; k < n; ++k) root = node(type, {root});
  return root;
}

/// Random tree with at most `max_vertices` vertices; children sorted by type.
inline Node random_node(std::mt19937_64& gen, int d, int max_vertices, int& budget, int type) {
  Node n{type, {}};
  --budget;
  std::uniform_int_distribution<int> kids(0, 3);
  std::uniform_int_distribution<int> pick(1, d);
  int k = kids(gen);
  for (int c = 0; c < k && budget > 0; ++c) {
    n.kids.push_back(random_node(gen, d, max_vertices, budget, pick(gen)));
  }
  std::stable_sort(n.kids.begin(), n.kids.end(), [](const Node& a, const Node& b) { return a.type < b.type; });
  return n;
}

inline Node random_tree(std::mt19937_64& gen, int d, int max_vertices) {
  int budget = max_vertices;
  std::uniform_int_distribution<int> pick(1, d);
  return random_node(gen, d, max_vertices, budget, pick(gen));
}

/// Parent array (index 0 = root, -1 for none) in the flatten order.
inline void parents_of(const Node& n, int parent, std::vector<int>& out) {
  int me = static_cast<int>(out.size());
  out.push_back(parent);
  for (const auto& k : n.kids) parents_of(k, me, out);
}

/// Floyd-Warshall on an undirected parent array.
inline std::vector<std::vector<int>> floyd(const std::vector<int>& parent) {
  const int n = static_cast<int>(parent.size());
  const int inf = 1 << 28;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (int a = 0; a < n; ++a) d[a][a] = 0;
  for (int a = 0; a < n; ++a) {
    if (parent[a] >= 0) d[a][parent[a]] = d[parent[a]][a] = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) d[a][b] = std::min(d[a][b], d[a][k] + d[k][b]);
  return d;
}

}  // namespace mgw::testing
