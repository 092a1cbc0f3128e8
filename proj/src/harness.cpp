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


#include "mgw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mgw/decoration.hpp"
#include "mgw/passage.hpp"
#include "mgw/walk.hpp"

namespace mgw {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
  if (!out) throw InvalidInput("write failed for " + path);
}

// ---------------------------------------------------------------- config

namespace {

template <typename T>
bool increasing(const std::vector<T>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] > v[k - 1])) return false;
  }
  return true;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (replicas < 1) throw InvalidInput("config: replicas must be >= 1");
  if (a_n.size() != n.size()) throw InvalidInput("config: n and a_n differ in length");
  for (const auto& row : b_n) {
    if (row.size() != n.size()) throw InvalidInput("config: b_n lists differ in length from n");
    for (double v : row) {
      if (!(v > 0)) throw InvalidInput("config: b_n must be positive");
    }
    if (!increasing(row)) throw InvalidInput("config: b_n must be increasing");
  }
  for (double v : a_n) {
    if (!(v > 0)) throw InvalidInput("config: a_n must be positive");
  }
  for (std::int64_t v : n) {
    if (v < 1) throw InvalidInput("config: n must be positive");
  }
  if (!increasing(a_n) || !increasing(n)) throw InvalidInput("config: n and a_n must be increasing");
  if (!n.empty() && b_n.empty()) throw InvalidInput("config: b_n missing");
  if (!(r > 0)) throw InvalidInput("config: r must be positive");
  if (condition < 0) throw InvalidInput("config: condition must be >= 0");
  if (max_vertices < 1 || max_attempts < 1 || cap_factor < 1) throw InvalidInput("config: caps must be >= 1");
  if (!(x > 0) || !(eps > 0)) throw InvalidInput("config: x and eps must be positive");
  if (k_longest < 0 || ghp_depth < 0 || ghp_replicas < 0) throw InvalidInput("config: negative count");
  if (ghp_points < 1 || ghp_points > 5) throw InvalidInput("config: ghp_points must be in [1, 5]");
  if (field_steps < 1 || max_field_steps < field_steps) throw InvalidInput("config: bad field lengths");
  if (spec) {
    const int d = spec->type_count();
    if (root_type < 1 || root_type > d) throw InvalidInput("config: root_type out of range");
    if (!b_n.empty() && static_cast<int>(b_n.size()) != d) throw InvalidInput("config: need one b_n list per type");
    if (!roots.empty() && static_cast<int>(roots.size()) != d) throw InvalidInput("config: roots has wrong length");
  }
  for (std::int64_t v : roots) {
    if (v < 0) throw InvalidInput("config: roots must be >= 0");
  }
  if (corpus_types < 1 || corpus_max_vertices < 1) throw InvalidInput("config: bad corpus settings");
}

const OffspringSpec& ExperimentConfig::offspring() const {
  if (!spec) throw InvalidInput("config: no offspring spec given");
  return *spec;
}

ExperimentConfig parse_config_json(const std::string& text, const std::string& base_dir) {
  static const std::set<std::string> known{
      "spec",      "root_type",  "n",           "a_n",          "b_n",          "r",
      "condition", "replicas",   "seed",        "max_vertices", "max_attempts", "cap_factor",
      "out",       "x",          "eps",         "k_longest",    "field_steps",  "max_field_steps",
      "roots",     "ghp_depth",  "ghp_replicas", "ghp_points",  "corpus",       "corpus_types",
      "corpus_max_vertices"};
  ExperimentConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw InvalidInput("config: expected an object");
    for (const auto& item : j.items()) {
      if (!known.count(item.key())) throw InvalidInput("config: unknown key '" + item.key() + "'");
    }
    if (j.contains("spec")) {
      const auto& s = j["spec"];
      if (s.is_string()) {
        fs::path p(s.get<std::string>());
        if (p.is_relative()) p = fs::path(base_dir) / p;
        c.spec_source = p.string();
        c.spec = parse_spec_json(read_file(p.string()));
      } else {
        c.spec_source = "inline";
        c.spec = parse_spec_json(s.dump());
      }
    }
    c.root_type = j.value("root_type", c.root_type);
    c.n = j.value("n", c.n);
    c.a_n = j.value("a_n", c.a_n);
    if (j.contains("b_n")) {
      const auto& b = j["b_n"];
      if (!b.is_array()) throw InvalidInput("config: b_n must be a list");
      if (!b.empty() && b[0].is_array()) {
        c.b_n = b.get<std::vector<std::vector<double>>>();
      } else {
        const auto flat = b.get<std::vector<double>>();
        const int d = c.spec ? c.spec->type_count() : 1;
        c.b_n.assign(static_cast<std::size_t>(d), flat);
      }
    }
    c.r = j.value("r", c.r);
    c.condition = j.value("condition", c.condition);
    c.replicas = j.value("replicas", c.replicas);
    c.seed = j.value("seed", c.seed);
    c.max_vertices = j.value("max_vertices", c.max_vertices);
    c.max_attempts = j.value("max_attempts", c.max_attempts);
    c.cap_factor = j.value("cap_factor", c.cap_factor);
    c.out = j.value("out", c.out);
    c.x = j.value("x", c.x);
    c.eps = j.value("eps", c.eps);
    c.k_longest = j.value("k_longest", c.k_longest);
    c.field_steps = j.value("field_steps", c.field_steps);
    c.max_field_steps = j.value("max_field_steps", c.max_field_steps);
    c.roots = j.value("roots", c.roots);
    c.ghp_depth = j.value("ghp_depth", c.ghp_depth);
    c.ghp_replicas = j.value("ghp_replicas", c.ghp_replicas);
    c.ghp_points = j.value("ghp_points", c.ghp_points);
    c.corpus = j.value("corpus", c.corpus);
    c.corpus_types = j.value("corpus_types", c.corpus_types);
    c.corpus_max_vertices = j.value("corpus_max_vertices", c.corpus_max_vertices);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config_json(read_file(path), fs::path(path).parent_path().string().empty()
                                                ? std::string(".")
                                                : fs::path(path).parent_path().string());
}

// ---------------------------------------------------------------- tables

void SummaryTable::add_row(std::vector<double> row) {
  if (row.size() != columns_.size()) throw InvalidInput("table row has wrong width");
  rows_.push_back(std::move(row));
}

std::size_t SummaryTable::column(const std::string& name) const {
  auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw InvalidInput("no column " + name);
  return static_cast<std::size_t>(it - columns_.begin());
}

void SummaryTable::write_csv(std::ostream& os) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) os << (c ? "," : "") << columns_[c];
  os << '\n';
  char buf[64];
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      os << (c ? "," : "") << buf;
    }
    os << '\n';
  }
}

std::string SummaryTable::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (!(q >= 0 && q <= 1)) throw InvalidInput("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<double> quantiles(const std::vector<double>& values, const std::vector<double>& grid) {
  std::vector<double> out;
  for (double q : grid) out.push_back(quantile(values, q));
  return out;
}

// ---------------------------------------------------------------- threads

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MGW_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::int64_t>(worker_count(), std::max<std::int64_t>(count, 1)));
  if (workers <= 1) {
    for (std::int64_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::int64_t k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------- corpus

namespace {

void enumerate_rec(int d, int max_vertices, std::vector<int>& types, std::vector<std::int64_t>& counts,
                   std::vector<int>& pending, std::vector<MultitypeTree>& out) {
  if (pending.empty()) {
    out.emplace_back(d, types, counts);
    return;
  }
  const int type = pending.back();
  pending.pop_back();
  const int used = static_cast<int>(types.size()) + 1 + static_cast<int>(pending.size());
  const int room = max_vertices - used;
  // Every child-count vector with total <= room.
  std::vector<std::int64_t> c(static_cast<std::size_t>(d), 0);
  std::function<void(int, int)> choose = [&](int j, int left) {
    if (j == d) {
      types.push_back(type);
      counts.insert(counts.end(), c.begin(), c.end());
      const std::size_t mark = pending.size();
      // Depth-first: the first child (lowest type) must come off the stack next.
      for (int t = d; t >= 1; --t)
        for (std::int64_t m = 0; m < c[static_cast<std::size_t>(t - 1)]; ++m) pending.push_back(t);
      enumerate_rec(d, max_vertices, types, counts, pending, out);
      pending.resize(mark);
      types.pop_back();
      counts.resize(counts.size() - static_cast<std::size_t>(d));
      return;
    }
    for (int k = 0; k <= left; ++k) {
      c[static_cast<std::size_t>(j)] = k;
      choose(j + 1, left - k);
    }
    c[static_cast<std::size_t>(j)] = 0;
  };
  choose(0, room);
  pending.push_back(type);
}

}  // namespace

std::vector<MultitypeTree> enumerate_trees(int type_count, int max_vertices) {
  if (type_count < 1 || max_vertices < 1) throw InvalidInput("enumeration needs d >= 1 and a positive size");
  std::vector<MultitypeTree> out;
  for (int root = 1; root <= type_count; ++root) {
    std::vector<int> types;
    std::vector<std::int64_t> counts;
    std::vector<int> pending{root};
    enumerate_rec(type_count, max_vertices, types, counts, pending, out);
  }
  return out;
}

void RunReport::fail(std::string message) {
  ok = false;
  failures.push_back(std::move(message));
}

// ---------------------------------------------------------------- checks

namespace {

std::vector<std::int64_t> bfs_heights(const MultitypeTree& t) {
  std::vector<std::int64_t> h(static_cast<std::size_t>(t.size()) + 1, 0);
  std::vector<VertexId> queue{1};
  for (std::size_t k = 0; k < queue.size(); ++k) {
    for (VertexId c : t.children(queue[k])) {
      h[static_cast<std::size_t>(c)] = h[static_cast<std::size_t>(queue[k])] + 1;
      queue.push_back(c);
    }
  }
  return h;
}

}  // namespace

RoundTripCheck check_round_trip(const MultitypeTree& t, std::size_t distance_cap) {
  RoundTripCheck out;
  auto note = [&](const std::string& m) {
    if (out.message.empty()) out.message = m;
  };
  const int d = t.type_count();
  const auto bundles = encode_multitype(t);
  try {
    if (!(decode_multitype(bundles, t.type(1)) == t)) {
      out.encode_ok = false;
      note("decode(encode(t)) differs from t");
    }
  } catch (const InvalidInput& e) {
    out.encode_ok = false;
    note(std::string("decode threw: ") + e.what());
  }

  const ReducedTree reduced = reduce(t);
  for (int i = 1; i <= d; ++i) {
    std::vector<std::int64_t> sizes;
    for (const ReducedVertex& c : reduced.vertices()) {
      if (c.type == i) sizes.push_back(static_cast<std::int64_t>(c.members.size()));
    }
    const LatticePath& x = bundles[static_cast<std::size_t>(i - 1)].coord(i);
    PassageIndex index(x);
    if (index.levels_reached() != static_cast<std::int64_t>(sizes.size())) {
      out.size_ok = false;
      note("type-" + std::to_string(i) + " walk has the wrong number of excursions");
      continue;
    }
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      if (*index.tau(static_cast<std::int64_t>(k) + 1) - *index.tau(static_cast<std::int64_t>(k)) != sizes[k]) {
        out.size_ok = false;
        note("typed subtree size differs from its excursion length");
      }
    }
  }

  const auto h = height_process(encode_single(t));
  const auto order = depth_first_order(t);
  const auto bfs = bfs_heights(t);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (h[k] != bfs[static_cast<std::size_t>(order[k])]) {
      out.height_ok = false;
      note("height process differs from vertex heights");
      break;
    }
  }

  const PlantedTree planted = plant(t);
  if (static_cast<std::size_t>(planted.point_count()) <= distance_cap) {
    out.glue_checked = true;
    const Decomposition dc = decompose(planted);
    const GluedSpace g = glue(dc.decoration, distance_cap);
    const IntMatrix direct = graph_distance_matrix(planted, distance_cap);
    const std::size_t n = static_cast<std::size_t>(planted.point_count());
    if (g.tree.size() != n) {
      out.glue_ok = false;
      note("glued space has the wrong number of points");
    } else {
      std::vector<std::size_t> at(n);
      std::vector<bool> hit(n, false);
      for (std::size_t v = 0; v < n; ++v) {
        at[v] = static_cast<std::size_t>(g.tree.resolve(dc.provenance[v].first, dc.provenance[v].second));
        if (hit[at[v]]) {
          out.glue_ok = false;
          note("provenance is not a bijection");
        }
        hit[at[v]] = true;
      }
      for (std::size_t a = 0; a < n && out.glue_ok; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          if (g.dist(at[a], at[b]) != direct(a, b)) {
            out.glue_ok = false;
            note("glued distance differs from the tree distance");
            break;
          }
        }
        for (int j = 1; j <= d; ++j) {
          const double want = a == 0 ? 0.0 : (t.type(static_cast<VertexId>(a)) == j ? 1.0 : 0.0);
          if (g.tree.measure[at[a] * static_cast<std::size_t>(d) + static_cast<std::size_t>(j - 1)] != want) {
            out.glue_ok = false;
            note("glued measure differs from the counting measure");
          }
        }
      }
      const FiniteMMSpace space = g.space();
      for (int j = 1; j <= d; ++j) {
        std::int64_t count = 0;
        for (VertexId v = 1; v <= t.size(); ++v) count += t.type(v) == j;
        if (space.total_mass(j) != static_cast<double>(count)) {
          out.glue_ok = false;
          note("glued measure total differs");
        }
      }
    }
  }
  return out;
}

namespace {

MultitypeTree sample_for(const ExperimentConfig& c, const RngSpec& rng, std::int64_t* attempts,
                         std::int64_t* overflows) {
  SampleOptions options{c.max_vertices, false};
  if (c.condition > 0) {
    ConditionedSample s = sample_conditioned(c.offspring(), c.root_type, c.condition, rng, c.max_attempts, options);
    if (attempts) *attempts = s.attempts;
    if (overflows) *overflows = s.overflows;
    return std::move(s.tree);
  }
  if (attempts) *attempts = 1;
  if (overflows) *overflows = 0;
  return sample_mbgw(c.offspring(), c.root_type, rng, options);
}

std::string replica_dir(const ExperimentConfig& c, const std::string& kind, std::int64_t r) {
  return (fs::path(c.out) / kind / ("replica_" + std::to_string(r))).string();
}

void dump_tree(const std::string& dir, const MultitypeTree& t) {
  write_file((fs::path(dir) / "tree.mtree").string(), to_mtree(t));
  const auto bundles = encode_multitype(t);
  for (const auto& b : bundles) {
    std::ostringstream os;
    write_walk_csv(os, b);
    write_file((fs::path(dir) / ("walk_" + std::to_string(b.base_type) + ".csv")).string(), os.str());
  }
}

}  // namespace

SimulateResult run_simulate(const ExperimentConfig& config) {
  config.validate();
  const OffspringSpec& spec = config.offspring();
  const int d = spec.type_count();
  std::vector<std::string> columns{"replica", "status", "size"};
  for (int j = 1; j <= d; ++j) columns.push_back("size_" + std::to_string(j));
  for (const char* c : {"height", "reduced_height", "attempts", "overflows"}) columns.push_back(c);
  SimulateResult result;
  result.table = SummaryTable(columns);
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(config.replicas));
  std::vector<std::string> errors(static_cast<std::size_t>(config.replicas));
  const RngSpec master(config.seed);
  parallel_for(config.replicas, [&](std::int64_t r) {
    auto& row = rows[static_cast<std::size_t>(r)];
    std::int64_t attempts = 0, overflows = 0;
    try {
      MultitypeTree t = sample_for(config, master.replica(static_cast<std::uint64_t>(r)), &attempts, &overflows);
      write_file((fs::path(config.out) / "trees" / ("replica_" + std::to_string(r) + ".mtree")).string(), to_mtree(t));
      std::vector<double> per(static_cast<std::size_t>(d), 0.0);
      for (VertexId v = 1; v <= t.size(); ++v) per[static_cast<std::size_t>(t.type(v) - 1)] += 1;
      std::int64_t reduced_height = 0;
      const ReducedTree reduced = reduce(t);
      for (const auto& c : reduced.vertices()) reduced_height = std::max(reduced_height, c.depth);
      row = {static_cast<double>(r), 0, static_cast<double>(t.size())};
      row.insert(row.end(), per.begin(), per.end());
      row.insert(row.end(), {static_cast<double>(t.max_height()), static_cast<double>(reduced_height),
                             static_cast<double>(attempts), static_cast<double>(overflows)});
    } catch (const CapExceeded& e) {
      row.assign(columns.size(), 0.0);
      row[0] = static_cast<double>(r);
      row[1] = 1;
      errors[static_cast<std::size_t>(r)] = e.what();
    }
  });
  for (std::size_t r = 0; r < rows.size(); ++r) {
    result.table.add_row(rows[r]);
    if (!errors[r].empty()) result.report.notes.push_back("replica " + std::to_string(r) + ": " + errors[r]);
  }
  write_file((fs::path(config.out) / "summary.csv").string(), result.table.to_csv());
  return result;
}

RoundTripResult run_roundtrip(const ExperimentConfig& config) {
  config.validate();
  RoundTripResult result;
  SummaryTable table({"replica", "size", "encode_ok", "size_ok", "height_ok", "glue_ok"});
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(config.replicas));
  std::vector<std::string> errors(static_cast<std::size_t>(config.replicas));
  const RngSpec master(config.seed);
  if (config.spec) {
    parallel_for(config.replicas, [&](std::int64_t r) {
      auto& row = rows[static_cast<std::size_t>(r)];
      MultitypeTree t = MultitypeTree::single_vertex(1, 1);
      try {
        t = sample_for(config, master.replica(static_cast<std::uint64_t>(r)), nullptr, nullptr);
      } catch (const CapExceeded&) {
        row = {static_cast<double>(r), -1, -1, -1, -1, -1};
        return;
      }
      const RoundTripCheck check = check_round_trip(t);
      row = {static_cast<double>(r), static_cast<double>(t.size()), double(check.encode_ok), double(check.size_ok),
             double(check.height_ok), check.glue_checked ? double(check.glue_ok) : -1.0};
      if (!check.ok()) {
        errors[static_cast<std::size_t>(r)] = check.message;
        dump_tree(replica_dir(config, "failures", r), t);
      }
    });
  }
  for (std::size_t r = 0; r < rows.size() && config.spec; ++r) {
    table.add_row(rows[r]);
    if (rows[r][1] < 0) {
      ++result.skipped;
    } else {
      ++result.checked;
    }
    if (!errors[r].empty()) result.report.fail("replica " + std::to_string(r) + ": " + errors[r]);
  }
  if (config.corpus) {
    const auto corpus = enumerate_trees(config.corpus_types, config.corpus_max_vertices);
    for (std::size_t k = 0; k < corpus.size(); ++k) {
      const RoundTripCheck check = check_round_trip(corpus[k]);
      ++result.corpus_checked;
      if (!check.ok()) {
        result.report.fail("corpus tree " + std::to_string(k) + ": " + check.message);
        dump_tree((fs::path(config.out) / "failures" / ("corpus_" + std::to_string(k))).string(), corpus[k]);
      }
    }
  }
  // Negative control: a corrupted walk must not decode to the same tree.
  {
    MultitypeTree t = enumerate_trees(2, 3).back();
    auto bundles = encode_multitype(t);
    auto& diag = bundles[static_cast<std::size_t>(t.type(1) - 1)].coord(t.type(1));
    diag.back() += 1;
    try {
      result.negative_control_detected = !(decode_multitype(bundles, t.type(1)) == t);
    } catch (const InvalidInput&) {
      result.negative_control_detected = true;
    }
    if (!result.negative_control_detected) result.report.fail("negative control: corrupted walk went unnoticed");
  }
  if (result.skipped > 0) {
    result.report.notes.push_back(std::to_string(result.skipped) + " replicas skipped at the vertex cap");
  }
  write_file((fs::path(config.out) / "roundtrip.csv").string(), table.to_csv());
  return result;
}

std::string check_coupling(const OffspringSpec& spec, const std::vector<std::int64_t>& roots, const RngSpec& rng,
                           std::int64_t field_steps, std::int64_t max_field_steps, std::int64_t* rows) {
  const int d = spec.type_count();
  *rows = 0;
  for (std::int64_t steps = field_steps;; steps *= 2) {
    const DiscreteField field = sample_field(spec, std::min(steps, max_field_steps), rng);
    const PassageState s = minimal_hitting(field, roots);
    if (!s.stabilized) {
      if (steps >= max_field_steps) return "";
      continue;
    }
    const auto forest = decode_multitype_forest(field, roots);
    const ReducedHeightCounts c = reduced_height_counts(forest, d, static_cast<std::int64_t>(s.U.size()) - 1);
    for (std::size_t h = 0; h < s.U.size(); ++h) {
      if (c.vertices[h] != s.U[h]) return "vertex counts differ from U at h=" + std::to_string(h);
      if (c.components[h] != s.R[h]) return "reduced counts differ from R at h=" + std::to_string(h);
    }
    *rows = static_cast<std::int64_t>(s.U.size());
    return "";
  }
}

CouplingResult run_coupling(const ExperimentConfig& config) {
  config.validate();
  const OffspringSpec& spec = config.offspring();
  const int d = spec.type_count();
  std::vector<std::int64_t> roots = config.roots;
  if (roots.empty()) {
    roots.assign(static_cast<std::size_t>(d), 0);
    roots[static_cast<std::size_t>(config.root_type - 1)] = 1;
  }
  std::vector<std::string> columns{"replica", "rows", "ok"};
  for (int j = 1; j <= d; ++j) columns.push_back("T_" + std::to_string(j));
  CouplingResult result;
  result.table = SummaryTable(columns);
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(config.replicas));
  std::vector<std::string> errors(static_cast<std::size_t>(config.replicas));
  const RngSpec master(config.seed);
  parallel_for(config.replicas, [&](std::int64_t r) {
    const RngSpec rng = master.replica(static_cast<std::uint64_t>(r));
    std::int64_t n_rows = 0;
    const std::string err = check_coupling(spec, roots, rng, config.field_steps, config.max_field_steps, &n_rows);
    std::vector<double> row{static_cast<double>(r), static_cast<double>(n_rows), err.empty() ? 1.0 : 0.0};
    std::vector<double> totals(static_cast<std::size_t>(d), -1.0);
    if (n_rows > 0) {
      // Same field again (it is a pure function of the seed) for the T values.
      for (std::int64_t steps = config.field_steps;; steps *= 2) {
        const DiscreteField field = sample_field(spec, std::min(steps, config.max_field_steps), rng);
        const PassageState s = minimal_hitting(field, roots);
        if (s.stabilized) {
          for (int j = 0; j < d; ++j) totals[static_cast<std::size_t>(j)] = static_cast<double>(*s.T[static_cast<std::size_t>(j)]);
          if (r == 0) {
            std::ostringstream os;
            write_passage_csv(os, s);
            write_file((fs::path(config.out) / "passage_0.csv").string(), os.str());
          }
          break;
        }
      }
    }
    row.insert(row.end(), totals.begin(), totals.end());
    rows[static_cast<std::size_t>(r)] = std::move(row);
    errors[static_cast<std::size_t>(r)] = err;
  });
  for (std::size_t r = 0; r < rows.size(); ++r) {
    result.table.add_row(rows[r]);
    if (!errors[r].empty()) {
      result.report.fail("replica " + std::to_string(r) + ": " + errors[r]);
    } else if (rows[r][1] == 0) {
      ++result.unreached;
    } else {
      ++result.checked;
    }
  }
  if (result.unreached > 0) {
    result.report.notes.push_back(std::to_string(result.unreached) + " replicas did not stabilize within the field cap");
  }
  write_file((fs::path(config.out) / "coupling.csv").string(), result.table.to_csv());
  return result;
}

// ---------------------------------------------------------------- scaling

std::int64_t sampled_gamma(const OffspringSpec& spec, int type, double x, double eps, double a, double b,
                           const RngSpec& rng) {
  const auto count = static_cast<std::int64_t>(std::floor(b * x / a));
  const auto max_size = static_cast<std::int64_t>(std::floor(eps * b));
  std::int64_t out = 0;
  for (std::int64_t k = 0; k < count; ++k) {
    if (max_size < 1) {
      ++out;
      continue;
    }
    try {
      const ExcursionSample e = sample_excursion_subtree(spec, type, rng.derive({static_cast<std::uint64_t>(k)}), max_size);
      if (static_cast<double>(e.tree.max_height()) / a > eps) ++out;
    } catch (const TreeTooLarge&) {
      ++out;
    }
  }
  return out;
}

std::vector<double> ghp_truncation_profile(const MultitypeTree& t, std::int64_t depth, double a,
                                           const std::vector<double>& b, const RngSpec& rng, std::size_t points) {
  const int d = t.type_count();
  if (static_cast<int>(b.size()) != d) throw InvalidInput("need one mass scale per type");
  const Decomposition dc = decompose(plant(t));
  const GluedTree g = glue_tree(dc.decoration);
  std::vector<FiniteMMSpace> spaces;
  for (std::int64_t h = 0; h <= depth; ++h) {
    // Points of the truncation, grouped by label generation.
    std::vector<std::vector<std::int64_t>> by_gen(static_cast<std::size_t>(h) + 1);
    for (std::size_t p = 1; p < g.size(); ++p) {
      const std::size_t gen = g.provenance[p].first.generation();
      if (gen <= static_cast<std::size_t>(h)) by_gen[gen].push_back(static_cast<std::int64_t>(p));
    }
    while (!by_gen.empty() && by_gen.back().empty()) by_gen.pop_back();
    std::vector<std::int64_t> chosen{0};
    RngStream stream(rng);
    for (std::size_t s = 1; s < points && !by_gen.empty(); ++s) {
      const auto& pool = by_gen[(s - 1) % by_gen.size()];
      if (pool.empty()) continue;
      const std::int64_t p = pool[stream.next_below(pool.size())];
      if (std::find(chosen.begin(), chosen.end(), p) == chosen.end()) chosen.push_back(p);
    }
    std::vector<std::vector<std::int64_t>> dist;
    for (std::int64_t p : chosen) dist.push_back(distances_from(g, p));
    const std::size_t m = chosen.size();
    RealMatrix dm(m, 0.0);
    for (std::size_t u = 0; u < m; ++u)
      for (std::size_t v = 0; v < m; ++v) dm(u, v) = static_cast<double>(dist[u][static_cast<std::size_t>(chosen[v])]) / a;
    FiniteMMSpace s = FiniteMMSpace::from_distances(std::move(dm), 0, d);
    for (std::size_t p = 1; p < g.size(); ++p) {
      if (g.provenance[p].first.generation() > static_cast<std::size_t>(h)) continue;
      std::size_t best = 0;
      for (std::size_t u = 1; u < m; ++u) {
        if (dist[u][p] < dist[best][p]) best = u;
      }
      for (int j = 1; j <= d; ++j) {
        s.measure[best * static_cast<std::size_t>(d) + static_cast<std::size_t>(j - 1)] +=
            g.measure[p * static_cast<std::size_t>(d) + static_cast<std::size_t>(j - 1)] / b[static_cast<std::size_t>(j - 1)];
      }
    }
    spaces.push_back(std::move(s));
  }
  std::vector<double> out;
  for (std::int64_t h = 0; h < depth; ++h) {
    out.push_back(ghp_estimate(spaces[static_cast<std::size_t>(h)], spaces[static_cast<std::size_t>(h) + 1], 0));
  }
  return out;
}

ScalingResult run_scaling(const ExperimentConfig& config) {
  config.validate();
  const OffspringSpec& spec = config.offspring();
  const int d = spec.type_count();
  const int i0 = config.root_type;
  if (config.n.empty()) throw InvalidInput("config: scaling needs n, a_n and b_n");
  const auto K = static_cast<std::size_t>(config.k_longest);
  const auto depth = static_cast<std::size_t>(config.ghp_depth);

  std::vector<std::string> columns{"n", "a_n", "r_n", "replicas", "attempts_mean", "overflows", "failures"};
  auto add_q = [&](const std::string& stem) {
    for (double q : kQuantileGrid) columns.push_back(stem + "_q" + std::to_string(static_cast<int>(std::lround(q * 100))));
    columns.push_back(stem + "_mean");
  };
  add_q("height");
  for (int j = 1; j <= d; ++j) add_q("count" + std::to_string(j));
  add_q("gamma");
  for (std::size_t k = 1; k <= K; ++k) add_q("longest" + std::to_string(k));
  for (std::size_t h = 0; h < depth; ++h) add_q("ghp_h" + std::to_string(h));

  ScalingResult result;
  result.table = SummaryTable(columns);
  const RngSpec master(config.seed);
  for (std::size_t idx = 0; idx < config.n.size(); ++idx) {
    const std::int64_t n = config.n[idx];
    const double a = config.a_n[idx];
    std::vector<double> b(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) b[static_cast<std::size_t>(j)] = config.b_n[static_cast<std::size_t>(j)][idx];
    const double b0 = b[static_cast<std::size_t>(i0 - 1)];
    const std::int64_t r_n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(b0 * config.r)));
    const std::int64_t reps = config.replicas;
    struct Rep {
      bool ok = false;
      std::string error;
      double height = 0, gamma = 0, attempts = 0, overflows = 0;
      std::vector<double> counts, longest, ghp;
    };
    std::vector<Rep> out(static_cast<std::size_t>(reps));
    parallel_for(reps, [&](std::int64_t rep) {
      Rep& o = out[static_cast<std::size_t>(rep)];
      const RngSpec rng = master.derive(RngTag::kReplica, idx, static_cast<std::uint64_t>(rep));
      try {
        ConditionedSample c = sample_conditioned(spec, i0, r_n, rng.derive({1}), config.max_attempts,
                                                 {config.cap_factor * n, false});
        const MultitypeTree& t = c.tree;
        o.attempts = static_cast<double>(c.attempts);
        o.overflows = static_cast<double>(c.overflows);
        RngStream pick(rng.derive({2}));
        const auto v = static_cast<VertexId>(pick.next_below(static_cast<std::uint64_t>(t.size())) + 1);
        o.height = static_cast<double>(t.height(v)) / a;
        o.counts.assign(static_cast<std::size_t>(d), 0.0);
        for (VertexId u = 1; u <= t.size(); ++u) o.counts[static_cast<std::size_t>(t.type(u) - 1)] += 1;
        for (int j = 0; j < d; ++j) o.counts[static_cast<std::size_t>(j)] /= b[static_cast<std::size_t>(j)];
        o.gamma = static_cast<double>(sampled_gamma(spec, i0, config.x, config.eps, a, b0, rng.derive({3})));
        if (K > 0) {
          const auto bundles = encode_multitype(t);
          const LatticePath& diag = bundles[static_cast<std::size_t>(i0 - 1)].coord(i0);
          std::vector<double> lengths;
          for (const auto& e : excursion_intervals(diag, static_cast<std::int64_t>(diag.size()) - 1)) {
            lengths.push_back(static_cast<double>(e.length()) / b0);
          }
          std::sort(lengths.begin(), lengths.end(), std::greater<>());
          lengths.resize(K, 0.0);
          o.longest = lengths;
        }
        if (rep < config.ghp_replicas && depth > 0) {
          o.ghp = ghp_truncation_profile(t, static_cast<std::int64_t>(depth), a, b, rng.derive({4}),
                                         static_cast<std::size_t>(config.ghp_points));
        }
        o.ok = true;
      } catch (const CapExceeded& e) {
        o.error = e.what();
      }
    });
    std::vector<double> height, gamma, attempts;
    std::vector<std::vector<double>> counts(static_cast<std::size_t>(d)), longest(K), ghp(depth);
    double overflows = 0, failures = 0;
    for (std::size_t rep = 0; rep < out.size(); ++rep) {
      const Rep& o = out[rep];
      if (!o.ok) {
        ++failures;
        result.report.fail("n=" + std::to_string(n) + " replica " + std::to_string(rep) + ": " + o.error);
        continue;
      }
      height.push_back(o.height);
      gamma.push_back(o.gamma);
      attempts.push_back(o.attempts);
      overflows += o.overflows;
      for (int j = 0; j < d; ++j) counts[static_cast<std::size_t>(j)].push_back(o.counts[static_cast<std::size_t>(j)]);
      for (std::size_t k = 0; k < K; ++k) longest[k].push_back(o.longest[k]);
      for (std::size_t h = 0; h < o.ghp.size(); ++h) ghp[h].push_back(o.ghp[h]);
    }
    auto mean = [](const std::vector<double>& v) {
      if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
      double s = 0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    std::vector<double> row{static_cast<double>(n), a, static_cast<double>(r_n), static_cast<double>(reps),
                            mean(attempts), overflows, failures};
    auto push = [&](const std::vector<double>& v) {
      const auto q = quantiles(v);
      row.insert(row.end(), q.begin(), q.end());
      row.push_back(mean(v));
    };
    push(height);
    for (const auto& c : counts) push(c);
    push(gamma);
    for (const auto& l : longest) push(l);
    for (const auto& g : ghp) push(g);
    result.table.add_row(std::move(row));
  }
  write_file((fs::path(config.out) / "scaling.csv").string(), result.table.to_csv());
  nlohmann::json meta;
  meta["quantile_grid"] = kQuantileGrid;
  meta["ghp_subsample_points"] = config.ghp_points;
  meta["ghp_replicas"] = config.ghp_replicas;
  meta["ghp_subsample"] = "root plus points stratified by label generation; masses moved to the nearest sampled point";
  meta["vertex_cap_per_attempt"] = "cap_factor * n";
  meta["cap_factor"] = config.cap_factor;
  meta["gamma"] = {{"x", config.x}, {"eps", config.eps}};
  meta["seed"] = config.seed;
  write_file((fs::path(config.out) / "scaling_meta.json").string(), meta.dump(2) + "\n");
  return result;
}

GhpResult run_ghp(const FiniteMMSpace& a, const FiniteMMSpace& b, std::size_t marks, std::size_t cap) {
  a.validate();
  b.validate();
  if (a.type_count != b.type_count) throw InvalidInput("spaces carry different numbers of measures");
  return GhpResult{ghp_estimate(a, b, marks, cap), gh_marked(a, b, marks, cap)};
}

}  // namespace mgw
