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

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>

namespace mgw {

namespace {

// Type of the `slot`-th child (0-based) of a vertex with these counts.
int slot_type(std::span<const std::int64_t> counts, std::int64_t slot) {
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (slot < counts[j]) return static_cast<int>(j) + 1;
    slot -= counts[j];
  }
  return -1;
}

IntMatrix distances_from_parents(const std::vector<std::int64_t>& parent, std::size_t cap) {
  const std::size_t n = parent.size();
  if (n > cap) {
    throw CapExceeded("distance matrix of " + std::to_string(n) + " points exceeds cap " +
                      std::to_string(cap));
  }
  std::vector<std::size_t> degree(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (parent[v] >= 0) {
      ++degree[v];
      ++degree[static_cast<std::size_t>(parent[v])];
    }
  }
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) offset[v + 1] = offset[v] + degree[v];
  std::vector<std::size_t> adj(offset[n]);
  std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
  for (std::size_t v = 0; v < n; ++v) {
    if (parent[v] >= 0) {
      auto p = static_cast<std::size_t>(parent[v]);
      adj[fill[v]++] = p;
      adj[fill[p]++] = v;
    }
  }
  IntMatrix out(n, -1);
  std::vector<std::size_t> queue(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::size_t head = 0, tail = 0;
    queue[tail++] = s;
    out(s, s) = 0;
    while (head < tail) {
      std::size_t u = queue[head++];
      for (std::size_t e = offset[u]; e < offset[u + 1]; ++e) {
        std::size_t w = adj[e];
        if (out(s, w) < 0) {
          out(s, w) = out(s, u) + 1;
          queue[tail++] = w;
        }
      }
    }
  }
  return out;
}

}  // namespace

MultitypeTree::MultitypeTree(int type_count, std::vector<int> types,
                             std::vector<std::int64_t> child_counts)
    : d_(type_count), types_(std::move(types)), counts_(std::move(child_counts)) {
  if (d_ < 1) throw InvalidInput("type count must be positive");
  const std::size_t n = types_.size();
  if (n == 0) throw InvalidInput("a tree needs at least one vertex");
  if (counts_.size() != n * static_cast<std::size_t>(d_)) {
    throw InvalidInput("child count table has wrong shape");
  }
  for (int t : types_) {
    if (t < 1 || t > d_) throw InvalidInput("vertex type out of range");
  }
  for (auto c : counts_) {
    if (c < 0) throw InvalidInput("negative child count");
  }

  child_offset_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    std::int64_t total = 0;
    for (int j = 0; j < d_; ++j) total = checked_add(total, counts_[v * d_ + j]);
    child_offset_[v + 1] = checked_add(child_offset_[v], total);
  }
  if (child_offset_[n] != static_cast<std::int64_t>(n) - 1) {
    throw InvalidInput("total child count must equal vertex count minus one");
  }
  child_list_.assign(n - 1, 0);
  parent_.assign(n, 0);
  height_.assign(n, 0);

  // (vertex index, next child slot)
  std::vector<std::pair<std::size_t, std::int64_t>> stack;
  stack.emplace_back(0, 0);
  for (std::size_t v = 1; v < n; ++v) {
    while (!stack.empty()) {
      auto [top, slot] = stack.back();
      if (slot < child_offset_[top + 1] - child_offset_[top]) break;
      stack.pop_back();
    }
    if (stack.empty()) throw InvalidInput("depth-first sequence closes before the last vertex");
    auto& [p, slot] = stack.back();
    int expected = slot_type(this->child_counts(static_cast<VertexId>(p + 1)), slot);
    if (types_[v] != expected) {
      throw InvalidInput("vertex " + std::to_string(v + 1) + " has type " +
                         std::to_string(types_[v]) + " but fills a type-" +
                         std::to_string(expected) + " slot");
    }
    child_list_[static_cast<std::size_t>(child_offset_[p] + slot)] = static_cast<VertexId>(v + 1);
    ++slot;
    parent_[v] = static_cast<VertexId>(p + 1);
    height_[v] = height_[p] + 1;
    stack.emplace_back(v, 0);
  }
}

MultitypeTree MultitypeTree::single_vertex(int type_count, int type) {
  return MultitypeTree(type_count, {type}, std::vector<std::int64_t>(type_count, 0));
}

std::int64_t MultitypeTree::total_children(VertexId v) const {
  return child_offset_[index(v) + 1] - child_offset_[index(v)];
}

std::span<const VertexId> MultitypeTree::children(VertexId v) const {
  auto b = static_cast<std::size_t>(child_offset_[index(v)]);
  auto e = static_cast<std::size_t>(child_offset_[index(v) + 1]);
  return {child_list_.data() + b, e - b};
}

std::int64_t MultitypeTree::max_height() const {
  return *std::max_element(height_.begin(), height_.end());
}

std::vector<VertexId> depth_first_order(const MultitypeTree& t) {
  std::vector<VertexId> out(static_cast<std::size_t>(t.size()));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = static_cast<VertexId>(k + 1);
  return out;
}

std::vector<VertexId> breadth_first_order(const MultitypeTree& t) {
  std::vector<VertexId> out;
  out.reserve(static_cast<std::size_t>(t.size()));
  out.push_back(1);
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (VertexId c : t.children(out[head])) out.push_back(c);
  }
  return out;
}

std::int64_t vertex_height(const MultitypeTree& t, VertexId v) {
  if (!t.contains(v)) throw InvalidInput("unknown vertex id " + std::to_string(v));
  return t.height(v);
}

PlantedTree plant(MultitypeTree t) { return PlantedTree{std::move(t)}; }

IntMatrix graph_distance_matrix(const MultitypeTree& t, std::size_t cap) {
  std::vector<std::int64_t> parent(static_cast<std::size_t>(t.size()));
  for (VertexId v = 1; v <= t.size(); ++v) parent[static_cast<std::size_t>(v - 1)] = t.parent(v) - 1;
  return distances_from_parents(parent, cap);
}

IntMatrix graph_distance_matrix(const PlantedTree& t, std::size_t cap) {
  std::vector<std::int64_t> parent(static_cast<std::size_t>(t.point_count()));
  for (std::int64_t p = 0; p < t.point_count(); ++p) parent[static_cast<std::size_t>(p)] = t.parent_point(p);
  return distances_from_parents(parent, cap);
}

ReducedTree::ReducedTree(int type_count, std::vector<ReducedVertex> vertices,
                         std::vector<std::int64_t> component_of)
    : d_(type_count), vertices_(std::move(vertices)), component_(std::move(component_of)) {
  for (std::size_t k = 0; k < vertices_.size(); ++k) {
    by_label_.emplace(vertices_[k].label, static_cast<std::int64_t>(k));
  }
}

std::int64_t ReducedTree::find(const UlamLabel& label) const {
  auto it = by_label_.find(label);
  return it == by_label_.end() ? -1 : it->second;
}

MultitypeTree ReducedTree::shape() const {
  // Depth-first walk with children visited in type order (stable).
  std::vector<int> types;
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> stack{0};
  while (!stack.empty()) {
    std::int64_t w = stack.back();
    stack.pop_back();
    const auto& rv = vertices_[static_cast<std::size_t>(w)];
    types.push_back(rv.type);
    std::vector<std::int64_t> row(static_cast<std::size_t>(d_), 0);
    std::vector<std::int64_t> ordered = rv.children;
    std::stable_sort(ordered.begin(), ordered.end(), [&](auto a, auto b) {
      return vertices_[static_cast<std::size_t>(a)].type < vertices_[static_cast<std::size_t>(b)].type;
    });
    for (auto c : ordered) ++row[static_cast<std::size_t>(vertices_[static_cast<std::size_t>(c)].type - 1)];
    counts.insert(counts.end(), row.begin(), row.end());
    for (auto it = ordered.rbegin(); it != ordered.rend(); ++it) stack.push_back(*it);
  }
  return MultitypeTree(d_, std::move(types), std::move(counts));
}

ReducedTree reduce(const MultitypeTree& t) {
  const int d = t.type_count();
  const auto n = static_cast<std::size_t>(t.size());

  // Components are discovered in depth-first order of their roots, which is
  // also the inherited planar order among siblings.
  std::vector<std::int64_t> comp(n);
  std::vector<ReducedVertex> found;
  for (VertexId v = 1; v <= t.size(); ++v) {
    VertexId p = t.parent(v);
    if (p != 0 && t.type(p) == t.type(v)) {
      comp[static_cast<std::size_t>(v - 1)] = comp[static_cast<std::size_t>(p - 1)];
    } else {
      auto c = static_cast<std::int64_t>(found.size());
      comp[static_cast<std::size_t>(v - 1)] = c;
      ReducedVertex rv;
      rv.type = t.type(v);
      rv.attach_vertex = p;
      if (p != 0) {
        rv.parent = comp[static_cast<std::size_t>(p - 1)];
        found[static_cast<std::size_t>(rv.parent)].children.push_back(c);
      }
      found.push_back(std::move(rv));
    }
    found[static_cast<std::size_t>(comp[static_cast<std::size_t>(v - 1)])].members.push_back(v);
  }

  // Breadth-first renumbering.
  std::vector<std::int64_t> order{0};
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (auto c : found[static_cast<std::size_t>(order[head])].children) order.push_back(c);
  }
  std::vector<std::int64_t> renum(found.size());
  for (std::size_t k = 0; k < order.size(); ++k) renum[static_cast<std::size_t>(order[k])] = static_cast<std::int64_t>(k);

  std::vector<ReducedVertex> bfs(found.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    ReducedVertex rv = std::move(found[static_cast<std::size_t>(order[k])]);
    if (rv.parent >= 0) rv.parent = renum[static_cast<std::size_t>(rv.parent)];
    for (auto& c : rv.children) c = renum[static_cast<std::size_t>(c)];
    bfs[k] = std::move(rv);
  }
  for (auto& c : comp) c = renum[static_cast<std::size_t>(c)];

  // Labels: decreasing cardinality within each child type, stable.
  bfs[0].label = UlamLabel::root();
  for (std::size_t k = 0; k < bfs.size(); ++k) {
    const ReducedVertex& w = bfs[k];
    for (int j = 1; j <= d; ++j) {
      std::vector<std::int64_t> of_type;
      for (auto c : w.children) {
        if (bfs[static_cast<std::size_t>(c)].type == j) of_type.push_back(c);
      }
      std::stable_sort(of_type.begin(), of_type.end(), [&](auto a, auto b) {
        return bfs[static_cast<std::size_t>(a)].members.size() > bfs[static_cast<std::size_t>(b)].members.size();
      });
      for (std::size_t m = 0; m < of_type.size(); ++m) {
        auto& child = bfs[static_cast<std::size_t>(of_type[m])];
        child.label = w.label.child(label_letter(j, static_cast<std::int64_t>(m + 1), d));
        child.depth = w.depth + 1;
      }
    }
  }
  return ReducedTree(d, std::move(bfs), std::move(comp));
}

std::optional<MultitypeTree> type_subtree(const MultitypeTree& t, const ReducedTree& reduced,
                                          const UlamLabel& label) {
  std::int64_t k = reduced.find(label);
  if (k < 0) return std::nullopt;
  const auto& rv = reduced.vertices()[static_cast<std::size_t>(k)];
  const int d = t.type_count();
  std::vector<int> types(rv.members.size(), rv.type);
  std::vector<std::int64_t> counts(rv.members.size() * static_cast<std::size_t>(d), 0);
  for (std::size_t m = 0; m < rv.members.size(); ++m) {
    counts[m * d + static_cast<std::size_t>(rv.type - 1)] = t.child_count(rv.members[m], rv.type);
  }
  return MultitypeTree(d, std::move(types), std::move(counts));
}

std::optional<MultitypeTree> type_subtree(const MultitypeTree& t, const UlamLabel& label) {
  return type_subtree(t, reduce(t), label);
}

std::int64_t root_subtree_size(const MultitypeTree& t) {
  const int root_type = t.type(1);
  std::int64_t count = 0;
  std::vector<VertexId> stack{1};
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    ++count;
    for (VertexId c : t.children(v)) {
      if (t.type(c) == root_type) stack.push_back(c);
    }
  }
  return count;
}

void write_mtree(std::ostream& os, const MultitypeTree& t, bool planted) {
  os << "MTREE 1 d=" << t.type_count();
  if (planted) os << " planted=1";
  os << '\n';
  for (VertexId v = 1; v <= t.size(); ++v) {
    os << t.type(v);
    for (auto c : t.child_counts(v)) os << ' ' << c;
    os << '\n';
  }
}

std::string to_mtree(const MultitypeTree& t, bool planted) {
  std::ostringstream os;
  write_mtree(os, t, planted);
  return os.str();
}

MtreeDocument read_mtree(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("MTREE: missing header");
  std::istringstream header(line);
  std::string magic, version, dfield, extra;
  header >> magic >> version >> dfield;
  if (magic != "MTREE" || version != "1" || dfield.rfind("d=", 0) != 0) {
    throw InvalidInput("MTREE: bad header '" + line + "'");
  }
  int d = 0;
  try {
    d = std::stoi(dfield.substr(2));
  } catch (const std::exception&) {
    throw InvalidInput("MTREE: bad type count");
  }
  bool planted = false;
  while (header >> extra) {
    if (extra == "planted=1") {
      planted = true;
    } else if (extra != "planted=0") {
      throw InvalidInput("MTREE: unknown header field '" + extra + "'");
    }
  }
  if (d < 1) throw InvalidInput("MTREE: type count must be positive");

  std::vector<int> types;
  std::vector<std::int64_t> counts;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    int type = 0;
    if (!(row >> type)) throw InvalidInput("MTREE: bad vertex line '" + line + "'");
    types.push_back(type);
    for (int j = 0; j < d; ++j) {
      std::int64_t c = 0;
      if (!(row >> c)) throw InvalidInput("MTREE: expected " + std::to_string(d) + " child counts");
      counts.push_back(c);
    }
    std::string trailing;
    if (row >> trailing) throw InvalidInput("MTREE: trailing data on vertex line");
  }
  return MtreeDocument{MultitypeTree(d, std::move(types), std::move(counts)), planted};
}

MtreeDocument parse_mtree(const std::string& text) {
  std::istringstream is(text);
  return read_mtree(is);
}

}  // namespace mgw
