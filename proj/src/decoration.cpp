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

#include "mgw/decoration.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include <json.hpp>

namespace mgw {

Subdecoration Subdecoration::trivial_of(int type, int type_count) {
  if (type_count < 1 || type < 1 || type > type_count) throw InvalidInput("subdecoration type out of range");
  Subdecoration s;
  s.type = type;
  s.type_count = type_count;
  return s;
}

std::vector<std::int64_t> mark_counts(const Subdecoration& s) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(s.type_count), 0);
  out[static_cast<std::size_t>(s.type - 1)] = s.point_count();
  for (std::size_t l = 1; l <= s.marks.size(); ++l) {
    const int j = letter_type(static_cast<std::int64_t>(l), s.type_count);
    if (j != s.type && s.marks[l - 1] != 0) ++out[static_cast<std::size_t>(j - 1)];
  }
  return out;
}

void validate(const Subdecoration& s) {
  if (s.type_count < 1 || s.type < 1 || s.type > s.type_count) throw InvalidInput("subdecoration type out of range");
  if (s.tree) {
    const MultitypeTree& t = *s.tree;
    if (t.type_count() != s.type_count) throw InvalidInput("subdecoration tree has wrong type count");
    for (VertexId v = 1; v <= t.size(); ++v) {
      if (t.type(v) != s.type) throw InvalidInput("subdecoration tree is not monochromatic");
    }
  }
  const std::int64_t n = s.point_count();
  for (std::size_t l = 1; l <= s.marks.size(); ++l) {
    const std::int64_t x = s.marks[l - 1];
    if (x < 0 || x >= n) throw InvalidInput("mark out of range");
    if (x != 0 && letter_type(static_cast<std::int64_t>(l), s.type_count) == s.type) {
      throw InvalidInput("marks of the own residue class must be the planted root");
    }
  }
}

Subdecoration build_subdecoration(const TypedWalkBundle& excursion, const RngSpec& rng) {
  excursion.validate();
  const int i = excursion.base_type;
  const int d = excursion.type_count();
  const LatticePath& diag = excursion.coord(i);
  const std::int64_t n = excursion.steps();
  if (n < 1 || diag.back() != -1) throw InvalidInput("bundle is not a single excursion");
  for (std::int64_t m = 0; m < n; ++m) {
    if (diag[static_cast<std::size_t>(m)] < 0) throw InvalidInput("bundle is not a single excursion");
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n * d), 0);
  for (std::int64_t v = 1; v <= n; ++v) {
    counts[static_cast<std::size_t>((v - 1) * d + (i - 1))] =
        diag[static_cast<std::size_t>(v)] - diag[static_cast<std::size_t>(v - 1)] + 1;
  }
  Subdecoration s;
  s.type = i;
  s.type_count = d;
  s.tree = MultitypeTree(d, std::vector<int>(static_cast<std::size_t>(n), i), std::move(counts));
  for (int j = 1; j <= d; ++j) {
    if (j == i) continue;
    const LatticePath& x = excursion.coord(j);
    std::vector<std::int64_t> list;
    for (std::int64_t v = 1; v <= n; ++v) {
      const std::int64_t k = x[static_cast<std::size_t>(v)] - x[static_cast<std::size_t>(v - 1)];
      list.insert(list.end(), static_cast<std::size_t>(k), v);
    }
    RngStream stream(rng.derive(RngTag::kPermutation, static_cast<std::uint64_t>(j)));
    const auto perm = uniform_permutation(list.size(), stream);
    for (std::size_t m = 0; m < list.size(); ++m) {
      const auto l = static_cast<std::size_t>(label_letter(j, static_cast<std::int64_t>(m) + 1, d));
      if (s.marks.size() < l) s.marks.resize(l, 0);
      s.marks[l - 1] = list[perm[m]];
    }
  }
  return s;
}

namespace {

RngSpec label_rng(const RngSpec& rng, const UlamLabel& p) {
  RngSpec r = rng.derive(RngTag::kDecorationChild, p.generation());
  for (std::int64_t letter : p.entries()) r = r.derive({static_cast<std::uint64_t>(letter)});
  return r;
}

void validate_decoration(const Decoration& dec) {
  int d = 0;
  for (const auto& [p, s] : dec) {
    validate(s);
    if (s.trivial()) throw InvalidInput("trivial subdecorations are not stored");
    if (d == 0) d = s.type_count;
    if (s.type_count != d) throw InvalidInput("decoration mixes type counts");
    if (p.is_root()) continue;
    auto parent = dec.find(p.parent());
    if (parent == dec.end()) throw InvalidInput("label set is not prefix-closed: " + p.to_string());
    if (letter_type(p.last(), d) != s.type) throw InvalidInput("label letter does not match type at " + p.to_string());
    if (parent->second.mark(p.last()) == 0) throw InvalidInput("nontrivial child glued at a planted root: " + p.to_string());
  }
}

std::int64_t local_depth(const Subdecoration& s, std::int64_t v) {
  return v == 0 ? 0 : s.tree->height(v) + 1;
}

std::int64_t local_distance(const Decoration& dec, const UlamLabel& p, std::int64_t a, std::int64_t b) {
  auto it = dec.find(p);
  if (it == dec.end()) {
    if (a != 0 || b != 0) throw InvalidInput("point outside a trivial subdecoration");
    return 0;
  }
  const Subdecoration& s = it->second;
  if (a < 0 || b < 0 || a >= s.point_count() || b >= s.point_count()) throw InvalidInput("local point out of range");
  std::int64_t da = local_depth(s, a), db = local_depth(s, b);
  std::int64_t out = 0;
  while (da > db) { a = s.parent_point(a); --da; ++out; }
  while (db > da) { b = s.parent_point(b); --db; ++out; }
  while (a != b) { a = s.parent_point(a); b = s.parent_point(b); out += 2; }
  return out;
}

std::int64_t mark_of(const Decoration& dec, const UlamLabel& p, std::int64_t letter) {
  auto it = dec.find(p);
  return it == dec.end() ? 0 : it->second.mark(letter);
}

// p a proper prefix of q.
std::int64_t chain_distance(const Decoration& dec, const UlamLabel& p, std::int64_t z, const UlamLabel& q,
                            std::int64_t y) {
  const std::size_t n = p.generation();
  const std::size_t k = q.generation() - n;
  const auto& e = q.entries();
  std::int64_t sum = local_distance(dec, p, z, mark_of(dec, p, e[n]));
  for (std::size_t l = 1; l < k; ++l) {
    const UlamLabel w = q.prefix(n + l);
    sum += local_distance(dec, w, 0, mark_of(dec, w, e[n + l]));
  }
  return sum + local_distance(dec, q, 0, y);
}

}  // namespace

Decoration build_decoration_from_root(const OffspringSpec& spec, Subdecoration root, int depth, const RngSpec& rng,
                                      const DecorationCaps& caps) {
  const int d = spec.type_count();
  validate(root);
  if (root.type_count != d) throw InvalidInput("root subdecoration has wrong type count");
  if (depth < 0) throw InvalidInput("depth must be >= 0");
  Decoration dec;
  if (root.trivial()) return dec;
  std::int64_t total = root.point_count() - 1;
  dec.emplace(UlamLabel::root(), std::move(root));
  std::vector<UlamLabel> frontier{UlamLabel::root()};
  for (int g = 0; g < depth && !frontier.empty(); ++g) {
    std::vector<UlamLabel> next;
    for (const UlamLabel& p : frontier) {
      const RngSpec rp = label_rng(rng, p);
      // Copy: inserting into the map below does not move nodes, but keep it simple.
      const Subdecoration parent = dec.at(p);
      for (int j = 1; j <= d; ++j) {
        if (j == parent.type) continue;
        std::vector<Subdecoration> kids;
        for (std::int64_t m = 1;; ++m) {
          const std::int64_t l = label_letter(j, m, d);
          if (l > static_cast<std::int64_t>(parent.marks.size())) break;
          if (parent.mark(l) == 0) continue;
          const RngSpec rc = rp.derive(RngTag::kDecorationChild, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(m));
          ExcursionSample e = sample_excursion_subtree(spec, j, rc, caps.max_vertices_per_subdecoration);
          kids.push_back(build_subdecoration(e.bundle, rc));
          total += kids.back().point_count() - 1;
          if (total > caps.max_total_vertices) {
            throw CapExceeded("decoration exceeds " + std::to_string(caps.max_total_vertices) + " vertices");
          }
        }
        std::stable_sort(kids.begin(), kids.end(), [](const Subdecoration& a, const Subdecoration& b) {
          return a.point_count() > b.point_count();
        });
        for (std::size_t m = 0; m < kids.size(); ++m) {
          UlamLabel q = p.child(label_letter(j, static_cast<std::int64_t>(m) + 1, d));
          if (parent.mark(q.last()) == 0) {
            throw InvalidInput("mark sequence of " + p.to_string() + " is not contiguous in residue " + std::to_string(j));
          }
          next.push_back(q);
          dec.emplace(std::move(q), std::move(kids[m]));
        }
      }
    }
    frontier = std::move(next);
  }
  return dec;
}

Decoration build_decoration(const OffspringSpec& spec, int root_type, int depth, const RngSpec& rng,
                            const DecorationCaps& caps) {
  if (classify(spec).kind == Criticality::kSupercritical) throw InvalidInput("spec is supercritical");
  const RngSpec r0 = label_rng(rng, UlamLabel::root());
  ExcursionSample e = sample_excursion_subtree(spec, root_type, r0, caps.max_vertices_per_subdecoration);
  return build_decoration_from_root(spec, build_subdecoration(e.bundle, r0), depth, rng, caps);
}

std::int64_t GluedTree::resolve(const UlamLabel& label, std::int64_t local) const {
  UlamLabel p = label;
  while (local == 0 && !p.is_root()) {
    const std::int64_t letter = p.last();
    p = p.parent();
    auto it = mark_of_.find(p);
    local = it == mark_of_.end() || letter > static_cast<std::int64_t>(it->second.size())
                ? 0
                : it->second[static_cast<std::size_t>(letter - 1)];
  }
  if (local == 0) return 0;
  auto it = point_of.find({p, local});
  if (it == point_of.end()) throw InvalidInput("no glued point for " + p.to_string() + ":" + std::to_string(local));
  return it->second;
}

GluedTree glue_tree(const Decoration& dec) {
  validate_decoration(dec);
  GluedTree g;
  g.type_count = dec.empty() ? 1 : dec.begin()->second.type_count;
  const auto d = static_cast<std::size_t>(g.type_count);
  g.provenance.push_back({UlamLabel::root(), 0});
  g.point_of[{UlamLabel::root(), 0}] = 0;
  for (const auto& [p, s] : dec) {
    g.mark_of_[p] = s.marks;
    for (std::int64_t v = 1; v < s.point_count(); ++v) {
      g.point_of[{p, v}] = static_cast<std::int64_t>(g.provenance.size());
      g.provenance.push_back({p, v});
    }
  }
  const std::size_t n = g.provenance.size();
  g.parent.assign(n, -1);
  g.measure.assign(n * d, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const auto& [p, v] = g.provenance[k];
    const Subdecoration& s = dec.at(p);
    g.parent[k] = g.resolve(p, s.parent_point(v));
    g.measure[k * d + static_cast<std::size_t>(s.type - 1)] = 1.0;
  }
  return g;
}

namespace {

std::vector<std::vector<std::int64_t>> adjacency(const GluedTree& g) {
  std::vector<std::vector<std::int64_t>> adj(g.size());
  for (std::size_t k = 1; k < g.size(); ++k) {
    const auto p = static_cast<std::size_t>(g.parent[k]);
    adj[k].push_back(g.parent[k]);
    adj[p].push_back(static_cast<std::int64_t>(k));
  }
  return adj;
}

std::vector<std::int64_t> bfs(const std::vector<std::vector<std::int64_t>>& adj, const std::vector<std::int64_t>& sources) {
  std::vector<std::int64_t> dist(adj.size(), -1);
  std::deque<std::int64_t> queue;
  for (std::int64_t s : sources) {
    if (dist[static_cast<std::size_t>(s)] != 0) {
      dist[static_cast<std::size_t>(s)] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const std::int64_t u = queue.front();
    queue.pop_front();
    for (std::int64_t w : adj[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

}  // namespace

std::vector<std::int64_t> distances_from(const GluedTree& g, std::int64_t source) {
  if (source < 0 || static_cast<std::size_t>(source) >= g.size()) throw InvalidInput("source point out of range");
  return bfs(adjacency(g), {source});
}

GluedSpace glue(const Decoration& dec, std::size_t cap) {
  GluedSpace out{glue_tree(dec), {}};
  const std::size_t n = out.tree.size();
  if (n > cap) throw CapExceeded("glued space has " + std::to_string(n) + " points, cap " + std::to_string(cap));
  const auto adj = adjacency(out.tree);
  out.dist = IntMatrix(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    const auto row = bfs(adj, {static_cast<std::int64_t>(a)});
    for (std::size_t b = 0; b < n; ++b) out.dist(a, b) = static_cast<std::int32_t>(row[b]);
  }
  return out;
}

FiniteMMSpace GluedSpace::space() const {
  const std::size_t n = dist.size();
  RealMatrix real(n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) real(a, b) = dist(a, b);
  FiniteMMSpace s = FiniteMMSpace::from_distances(std::move(real), 0, tree.type_count);
  s.measure = tree.measure;
  return s;
}

std::int64_t glued_distance_formula(const Decoration& dec, const UlamLabel& p, std::int64_t z, const UlamLabel& q,
                                    std::int64_t y) {
  if (p == q) return local_distance(dec, p, z, y);
  if (p.is_prefix_of(q)) return chain_distance(dec, p, z, q, y);
  if (q.is_prefix_of(p)) return chain_distance(dec, q, y, p, z);
  const UlamLabel w = common_ancestor(p, q);
  const std::size_t g = w.generation();
  const std::int64_t xa = mark_of(dec, w, p.entries()[g]);
  const std::int64_t xb = mark_of(dec, w, q.entries()[g]);
  return local_distance(dec, w, xa, xb) + chain_distance(dec, w, xa, p, z) + chain_distance(dec, w, xb, q, y);
}

Decomposition decompose(const PlantedTree& t) {
  const MultitypeTree& base = t.base;
  const ReducedTree reduced = reduce(base);
  const auto& rv = reduced.vertices();
  std::vector<std::int64_t> local(static_cast<std::size_t>(base.size()) + 1, 0);
  for (const ReducedVertex& c : rv) {
    for (std::size_t k = 0; k < c.members.size(); ++k) local[static_cast<std::size_t>(c.members[k])] = static_cast<std::int64_t>(k) + 1;
  }
  Decomposition out;
  for (const ReducedVertex& c : rv) {
    Subdecoration s;
    s.type = c.type;
    s.type_count = base.type_count();
    s.tree = type_subtree(base, reduced, c.label);
    for (std::int64_t ch : c.children) {
      const ReducedVertex& kid = rv[static_cast<std::size_t>(ch)];
      const auto l = static_cast<std::size_t>(kid.label.last());
      if (s.marks.size() < l) s.marks.resize(l, 0);
      s.marks[l - 1] = local[static_cast<std::size_t>(kid.attach_vertex)];
    }
    out.decoration.emplace(c.label, std::move(s));
  }
  out.provenance.push_back({UlamLabel::root(), 0});
  for (VertexId v = 1; v <= base.size(); ++v) {
    out.provenance.push_back({rv[static_cast<std::size_t>(reduced.component_of(v))].label, local[static_cast<std::size_t>(v)]});
  }
  return out;
}

Decoration truncate(const Decoration& dec, std::size_t depth) {
  Decoration out;
  for (const auto& [p, s] : dec) {
    if (p.generation() <= depth) out.emplace(p, s);
  }
  return out;
}

Decoration restrict_to(const Decoration& dec, const std::set<UlamLabel>& labels) {
  Decoration out;
  for (const auto& [p, s] : dec) {
    bool keep = true;
    for (std::size_t g = 0; g <= p.generation() && keep; ++g) keep = labels.count(p.prefix(g)) > 0;
    if (keep) out.emplace(p, s);
  }
  return out;
}

std::size_t decoration_depth(const Decoration& dec) {
  std::size_t out = 0;
  for (const auto& entry : dec) out = std::max(out, entry.first.generation());
  return out;
}

double truncation_gap(const GluedTree& g, std::size_t depth) {
  std::vector<std::int64_t> kept;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.provenance[k].first.generation() <= depth) kept.push_back(static_cast<std::int64_t>(k));
  }
  const auto dist = bfs(adjacency(g), kept);
  return static_cast<double>(*std::max_element(dist.begin(), dist.end()));
}

std::string to_decor_json(const Decoration& dec) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [p, s] : dec) {
    nlohmann::json rec;
    rec["label"] = p.entries();
    rec["type"] = s.type;
    rec["mtree"] = to_mtree(*s.tree, true);
    rec["marks"] = s.marks;
    out.push_back(rec);
  }
  return out.dump() + "\n";
}

Decoration parse_decor_json(const std::string& text) {
  Decoration dec;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_array()) throw InvalidInput("DECOR JSON: expected a list");
    for (const auto& rec : j) {
      UlamLabel p(rec.at("label").get<std::vector<std::int64_t>>());
      MtreeDocument doc = parse_mtree(rec.at("mtree").get<std::string>());
      Subdecoration s;
      s.type = rec.at("type").get<int>();
      s.type_count = doc.tree.type_count();
      s.tree = std::move(doc.tree);
      s.marks = rec.at("marks").get<std::vector<std::int64_t>>();
      if (!dec.emplace(p, std::move(s)).second) throw InvalidInput("DECOR JSON: duplicate label " + p.to_string());
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("DECOR JSON: ") + e.what());
  }
  validate_decoration(dec);
  return dec;
}

std::string provenance_json(const GluedTree& g) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [p, v] : g.provenance) out.push_back({{"label", p.entries()}, {"local", v}});
  return out.dump() + "\n";
}

}  // namespace mgw
