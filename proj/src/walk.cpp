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

#include "mgw/walk.hpp"

#include <deque>
#include <istream>
#include <ostream>
#include <sstream>

namespace mgw {

void TypedWalkBundle::validate() const {
  const int d = type_count();
  if (d < 1) throw InvalidInput("bundle has no coordinates");
  if (base_type < 1 || base_type > d) throw InvalidInput("bundle base type out of range");
  for (int j = 1; j <= d; ++j) {
    const auto& x = coord(j);
    if (x.empty() || x.front() != 0) throw InvalidInput("bundle coordinate must start at 0");
    if (x.size() != paths.front().size()) throw InvalidInput("bundle coordinates differ in length");
    for (std::size_t m = 1; m < x.size(); ++m) {
      std::int64_t step = x[m] - x[m - 1];
      if (j == base_type && step < -1) {
        throw InvalidInput("diagonal coordinate has an increment below -1");
      }
      if (j != base_type && step < 0) throw InvalidInput("cross coordinate decreases");
    }
  }
}

TypedWalkBundle empty_bundle(int base_type, int type_count) {
  return TypedWalkBundle{base_type, std::vector<LatticePath>(static_cast<std::size_t>(type_count), LatticePath{0})};
}

LatticePath encode_single(const MultitypeTree& t) {
  LatticePath x{0};
  x.reserve(static_cast<std::size_t>(t.size()) + 1);
  for (VertexId v = 1; v <= t.size(); ++v) x.push_back(checked_add(x.back(), t.total_children(v) - 1));
  return x;
}

void check_single_tree_path(const LatticePath& x) {
  if (x.size() < 2) throw InvalidInput("path too short to encode a tree");
  if (x.front() != 0) throw InvalidInput("path must start at 0");
  for (std::size_t m = 1; m < x.size(); ++m) {
    if (x[m] - x[m - 1] < -1) throw InvalidInput("increment below -1 at step " + std::to_string(m));
    if (m + 1 < x.size() && x[m] < 0) {
      throw InvalidInput("path goes negative before its end at step " + std::to_string(m));
    }
  }
  if (x.back() != -1) throw InvalidInput("path must end at -1");
}

MultitypeTree decode_single(const LatticePath& x) {
  check_single_tree_path(x);
  const std::size_t n = x.size() - 1;
  std::vector<std::int64_t> counts(n);
  for (std::size_t m = 0; m < n; ++m) counts[m] = x[m + 1] - x[m] + 1;
  return MultitypeTree(1, std::vector<int>(n, 1), std::move(counts));
}

std::vector<std::int64_t> height_process(const LatticePath& x) {
  if (x.empty()) return {};
  const std::size_t n = x.size() - 1;
  std::vector<std::int64_t> h(n);
  // Indices k < m with X(k) <= X(r) for all k <= r <= m; values are
  // non-decreasing bottom to top.
  std::vector<std::size_t> stack;
  for (std::size_t m = 0; m < n; ++m) {
    if (m > 0) stack.push_back(m - 1);
    while (!stack.empty() && x[stack.back()] > x[m]) stack.pop_back();
    h[m] = static_cast<std::int64_t>(stack.size());
  }
  return h;
}

std::vector<std::int64_t> contour_process(const MultitypeTree& t) {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(2 * t.size()));
  // (vertex, next child index)
  std::vector<std::pair<VertexId, std::size_t>> stack{{1, 0}};
  out.push_back(0);
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    auto kids = t.children(v);
    if (next < kids.size()) {
      VertexId c = kids[next++];
      stack.emplace_back(c, 0);
      out.push_back(t.height(c));
    } else {
      stack.pop_back();
      if (!stack.empty()) out.push_back(t.height(stack.back().first));
    }
  }
  return out;
}

std::optional<std::int64_t> first_passage(const LatticePath& x, std::int64_t k) {
  if (k < 1) throw InvalidInput("first passage level must be positive");
  for (std::size_t m = 0; m < x.size(); ++m) {
    if (x[m] == -k) return static_cast<std::int64_t>(m);
  }
  return std::nullopt;
}

PassageIndex::PassageIndex(const LatticePath& x) {
  tau_.push_back(0);
  if (x.empty()) return;
  std::int64_t low = x.front();
  for (std::size_t m = 1; m < x.size(); ++m) {
    if (x[m] - x[m - 1] < -1) throw InvalidInput("passage index needs increments >= -1");
    if (x[m] < low) {
      low = x[m];
      tau_.push_back(static_cast<std::int64_t>(m));
    }
  }
}

std::optional<std::int64_t> PassageIndex::tau(std::int64_t k) const {
  if (k < 0) throw InvalidInput("negative passage level");
  if (k >= static_cast<std::int64_t>(tau_.size())) return std::nullopt;
  return tau_[static_cast<std::size_t>(k)];
}

std::vector<DiscreteExcursion> excursions(const LatticePath& x, std::int64_t up_to) {
  std::vector<DiscreteExcursion> out;
  if (up_to <= 0) return out;
  PassageIndex index(x);
  if (index.levels_reached() < up_to) {
    throw InvalidInput("path does not reach level -" + std::to_string(up_to));
  }
  out.reserve(static_cast<std::size_t>(up_to));
  for (std::int64_t k = 1; k <= up_to; ++k) {
    DiscreteExcursion e;
    e.start = *index.tau(k - 1);
    e.end = *index.tau(k);
    e.values.reserve(static_cast<std::size_t>(e.length()) + 1);
    for (std::int64_t m = e.start; m <= e.end; ++m) {
      e.values.push_back(x[static_cast<std::size_t>(m)] - x[static_cast<std::size_t>(e.start)]);
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<TypedWalkBundle> encode_multitype(const MultitypeTree& t) {
  const int d = t.type_count();
  std::vector<TypedWalkBundle> out;
  for (int i = 1; i <= d; ++i) out.push_back(empty_bundle(i, d));
  ReducedTree reduced = reduce(t);
  for (const auto& rv : reduced.vertices()) {
    auto& b = out[static_cast<std::size_t>(rv.type - 1)];
    for (VertexId v : rv.members) {
      for (int j = 1; j <= d; ++j) {
        auto& x = b.coord(j);
        x.push_back(checked_add(x.back(), t.child_count(v, j) - (j == rv.type ? 1 : 0)));
      }
    }
  }
  return out;
}

namespace {

class ForestDecoder {
 public:
  explicit ForestDecoder(const std::vector<TypedWalkBundle>& bundles) : bundles_(bundles) {
    d_ = static_cast<int>(bundles.size());
    if (d_ < 1) throw InvalidInput("no bundles supplied");
    for (int i = 1; i <= d_; ++i) {
      const auto& b = bundles[static_cast<std::size_t>(i - 1)];
      if (b.base_type != i) throw InvalidInput("bundle " + std::to_string(i) + " has wrong base type");
      if (b.type_count() != d_) throw InvalidInput("bundle has wrong number of coordinates");
      b.validate();
    }
    cursor_.assign(static_cast<std::size_t>(d_), 0);
  }

  std::vector<MultitypeTree> run(const std::vector<std::int64_t>& roots) {
    if (static_cast<int>(roots.size()) != d_) throw InvalidInput("root vector has wrong length");
    std::vector<std::int64_t> root_ids;
    for (int j = 1; j <= d_; ++j) {
      if (roots[static_cast<std::size_t>(j - 1)] < 0) throw InvalidInput("negative root count");
      for (std::int64_t r = 0; r < roots[static_cast<std::size_t>(j - 1)]; ++r) {
        root_ids.push_back(new_node(j));
        queue_.push_back(root_ids.back());
      }
    }
    while (!queue_.empty()) {
      std::int64_t id = queue_.front();
      queue_.pop_front();
      expand(id);
    }
    std::vector<MultitypeTree> out;
    out.reserve(root_ids.size());
    for (auto id : root_ids) out.push_back(emit(id));
    return out;
  }

  bool fully_consumed() const {
    for (int i = 1; i <= d_; ++i) {
      if (cursor_[static_cast<std::size_t>(i - 1)] != bundles_[static_cast<std::size_t>(i - 1)].steps()) return false;
    }
    return true;
  }

 private:
  struct Node {
    int type;
    std::vector<std::int64_t> children;
  };

  std::int64_t new_node(int type) {
    nodes_.push_back(Node{type, {}});
    return static_cast<std::int64_t>(nodes_.size()) - 1;
  }

  // Reads the next excursion of X^{i,i} as the component rooted at `id`.
  void expand(std::int64_t id) {
    const int i = nodes_[static_cast<std::size_t>(id)].type;
    const auto& b = bundles_[static_cast<std::size_t>(i - 1)];
    const auto& xi = b.coord(i);
    const std::int64_t start = cursor_[static_cast<std::size_t>(i - 1)];
    const std::int64_t n = b.steps();
    std::int64_t end = -1;
    for (std::int64_t m = start + 1; m <= n; ++m) {
      if (xi[static_cast<std::size_t>(m)] == xi[static_cast<std::size_t>(start)] - 1) {
        end = m;
        break;
      }
    }
    if (end < 0) {
      throw InvalidInput("type-" + std::to_string(i) + " walk exhausted before the forest closed");
    }
    cursor_[static_cast<std::size_t>(i - 1)] = end;
    const std::int64_t size = end - start;

    std::vector<std::int64_t> members(static_cast<std::size_t>(size));
    members[0] = id;
    for (std::int64_t k = 1; k < size; ++k) members[static_cast<std::size_t>(k)] = new_node(i);

    // Same-type parent links, depth-first.
    std::vector<std::vector<std::int64_t>> same(static_cast<std::size_t>(size));
    std::vector<std::pair<std::int64_t, std::int64_t>> stack;  // (member, open slots)
    for (std::int64_t k = 0; k < size; ++k) {
      if (k > 0) {
        while (!stack.empty() && stack.back().second == 0) stack.pop_back();
        auto& top = stack.back();
        same[static_cast<std::size_t>(top.first)].push_back(members[static_cast<std::size_t>(k)]);
        --top.second;
      }
      auto s = static_cast<std::size_t>(start + k);
      stack.emplace_back(k, xi[s + 1] - xi[s] + 1);
    }

    for (std::int64_t k = 0; k < size; ++k) {
      auto s = static_cast<std::size_t>(start + k);
      std::vector<std::int64_t> kids;
      for (int j = 1; j <= d_; ++j) {
        if (j == i) {
          kids.insert(kids.end(), same[static_cast<std::size_t>(k)].begin(), same[static_cast<std::size_t>(k)].end());
          continue;
        }
        const auto& xj = b.coord(j);
        for (std::int64_t c = 0; c < xj[s + 1] - xj[s]; ++c) kids.push_back(new_node(j));
      }
      nodes_[static_cast<std::size_t>(members[static_cast<std::size_t>(k)])].children = std::move(kids);
    }

    // Cross children enter the queue in planar order: a depth-first walk of
    // the component treating them as leaves.
    std::vector<std::int64_t> dfs{id};
    while (!dfs.empty()) {
      std::int64_t u = dfs.back();
      dfs.pop_back();
      if (u != id && nodes_[static_cast<std::size_t>(u)].type != i) {
        queue_.push_back(u);
        continue;
      }
      const auto& kids = nodes_[static_cast<std::size_t>(u)].children;
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) dfs.push_back(*it);
    }
  }

  MultitypeTree emit(std::int64_t root) const {
    std::vector<int> types;
    std::vector<std::int64_t> counts;
    std::vector<std::int64_t> stack{root};
    while (!stack.empty()) {
      std::int64_t u = stack.back();
      stack.pop_back();
      const auto& node = nodes_[static_cast<std::size_t>(u)];
      types.push_back(node.type);
      std::vector<std::int64_t> row(static_cast<std::size_t>(d_), 0);
      for (auto c : node.children) ++row[static_cast<std::size_t>(nodes_[static_cast<std::size_t>(c)].type - 1)];
      counts.insert(counts.end(), row.begin(), row.end());
      for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) stack.push_back(*it);
    }
    return MultitypeTree(d_, std::move(types), std::move(counts));
  }

  const std::vector<TypedWalkBundle>& bundles_;
  int d_ = 1;
  std::vector<std::int64_t> cursor_;
  std::vector<Node> nodes_;
  std::deque<std::int64_t> queue_;
};

}  // namespace

MultitypeTree decode_multitype(const std::vector<TypedWalkBundle>& bundles, int root_type) {
  const int d = static_cast<int>(bundles.size());
  if (root_type < 1 || root_type > d) throw InvalidInput("root type out of range");
  ForestDecoder dec(bundles);
  std::vector<std::int64_t> roots(static_cast<std::size_t>(d), 0);
  roots[static_cast<std::size_t>(root_type - 1)] = 1;
  auto forest = dec.run(roots);
  if (!dec.fully_consumed()) throw InvalidInput("bundle has steps left after the tree closed");
  return std::move(forest.front());
}

std::vector<MultitypeTree> decode_multitype_forest(const std::vector<TypedWalkBundle>& bundles,
                                                   const std::vector<std::int64_t>& roots) {
  ForestDecoder dec(bundles);
  return dec.run(roots);
}

void write_walk_csv(std::ostream& os, const TypedWalkBundle& b) {
  os << "# base_type=" << b.base_type << '\n';
  os << "step";
  for (int j = 1; j <= b.type_count(); ++j) os << ",x" << j;
  os << '\n';
  for (std::int64_t m = 0; m <= b.steps(); ++m) {
    os << m;
    for (int j = 1; j <= b.type_count(); ++j) os << ',' << b.coord(j)[static_cast<std::size_t>(m)];
    os << '\n';
  }
}

TypedWalkBundle read_walk_csv(std::istream& is) {
  std::string line;
  TypedWalkBundle b;
  if (!std::getline(is, line) || line.rfind("# base_type=", 0) != 0) {
    throw InvalidInput("WALK CSV: missing base_type line");
  }
  try {
    b.base_type = std::stoi(line.substr(12));
  } catch (const std::exception&) {
    throw InvalidInput("WALK CSV: bad base_type");
  }
  if (!std::getline(is, line) || line.rfind("step", 0) != 0) throw InvalidInput("WALK CSV: missing header");
  int d = 0;
  for (char c : line) d += (c == ',');
  if (d < 1) throw InvalidInput("WALK CSV: no coordinates");
  b.paths.assign(static_cast<std::size_t>(d), {});
  std::int64_t expected = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::int64_t> cells;
    while (std::getline(row, cell, ',')) {
      try {
        std::size_t used = 0;
        cells.push_back(std::stoll(cell, &used));
        if (used != cell.size()) throw InvalidInput("WALK CSV: bad cell '" + cell + "'");
      } catch (const std::logic_error&) {
        throw InvalidInput("WALK CSV: bad cell '" + cell + "'");
      }
    }
    if (static_cast<int>(cells.size()) != d + 1) throw InvalidInput("WALK CSV: wrong column count");
    if (cells[0] != expected++) throw InvalidInput("WALK CSV: steps must count up from 0");
    for (int j = 0; j < d; ++j) b.paths[static_cast<std::size_t>(j)].push_back(cells[static_cast<std::size_t>(j + 1)]);
  }
  b.validate();
  return b;
}

}  // namespace mgw
