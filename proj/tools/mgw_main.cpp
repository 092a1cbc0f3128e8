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


// mgw command-line front end.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "mgw/decoration.hpp"
#include "mgw/harness.hpp"
#include "mgw/walk.hpp"

namespace {

namespace fs = std::filesystem;
using namespace mgw;

struct CommonFlags {
  std::string config;
  std::string spec;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> replicas;
  std::string out;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "Experiment config (JSON)");
  app->add_option("--spec", f.spec, "Offspring spec (SPEC JSON)");
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--replicas", f.replicas, "Number of replicas");
  app->add_option("--out", f.out, "Output directory");
}

ExperimentConfig make_config(const CommonFlags& f) {
  ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  if (!f.spec.empty()) {
    c.spec = parse_spec_json(read_file(f.spec));
    c.spec_source = f.spec;
  }
  if (f.seed) c.seed = *f.seed;
  if (f.replicas) c.replicas = *f.replicas;
  if (!f.out.empty()) c.out = f.out;
  if (c.spec && !c.b_n.empty() && static_cast<int>(c.b_n.size()) != c.spec->type_count() && c.b_n.size() == 1) {
    c.b_n.assign(static_cast<std::size_t>(c.spec->type_count()), c.b_n.front());
  }
  c.validate();
  return c;
}

int report(const std::string& name, const RunReport& r) {
  for (const auto& n : r.notes) std::cout << name << ": note: " << n << "\n";
  for (const auto& f : r.failures) std::cout << name << ": FAIL: " << f << "\n";
  std::cout << name << ": " << (r.ok ? "ok" : "failed") << "\n";
  return r.ok ? 0 : 1;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multitype Galton-Watson trees: simulation, walk codings, decorations and GHP checks"};
  app.require_subcommand(1);

  CommonFlags sim_f, rt_f, cp_f, sc_f;
  std::int64_t condition = -1;
  auto* simulate = app.add_subcommand("simulate", "Sample trees, write MTREE files and a summary table");
  add_common(simulate, sim_f);
  simulate->add_option("--condition", condition, "Condition the root subtree to have at least this many vertices");
  bool corpus = false;
  auto* roundtrip = app.add_subcommand("roundtrip", "Encode/decode and decompose/glue identity checks");
  add_common(roundtrip, rt_f);
  roundtrip->add_flag("--corpus", corpus, "Also check every 2-type tree with at most 5 vertices");
  auto* coupling = app.add_subcommand("coupling", "Forest/field coupling identity");
  add_common(coupling, cp_f);
  auto* scaling = app.add_subcommand("scaling", "Rescaled statistics of conditioned trees");
  add_common(scaling, sc_f);

  std::string space_a, space_b;
  std::size_t marks = 0, cap = kDefaultCorrespondenceCap;
  auto* ghp = app.add_subcommand("ghp", "GHP estimate and marked GH distance of two SPACE files");
  ghp->add_option("a", space_a, "First SPACE JSON")->required();
  ghp->add_option("b", space_b, "Second SPACE JSON")->required();
  ghp->add_option("--marks", marks, "Number of marks to match");
  ghp->add_option("--cap", cap, "Largest |X||Y| allowed");

  std::string tree_path, encode_out;
  auto* encode = app.add_subcommand("encode", "MTREE file to one WALK CSV per type");
  encode->add_option("tree", tree_path, "MTREE file")->required();
  encode->add_option("--out", encode_out, "Output directory (default: stdout)");

  std::vector<std::string> walk_paths;
  int root_type = 1;
  std::string decode_out;
  auto* decode = app.add_subcommand("decode", "WALK CSVs (one per type, in type order) to an MTREE file");
  decode->add_option("walks", walk_paths, "WALK CSV files")->required();
  decode->add_option("--root-type", root_type, "Type of the root");
  decode->add_option("--out", decode_out, "Output file (default: stdout)");

  std::string decor_path, glue_out;
  std::size_t glue_cap = kDefaultDistanceCap;
  auto* glue_cmd = app.add_subcommand("glue", "DECOR JSON to a SPACE JSON plus provenance");
  glue_cmd->add_option("decoration", decor_path, "DECOR JSON")->required();
  glue_cmd->add_option("--out", glue_out, "Output directory (default: stdout, space only)");
  glue_cmd->add_option("--cap", glue_cap, "Largest number of glued points");

  std::string family, preset_out;
  double param = 0.5;
  int preset_cap = 64;
  auto* preset = app.add_subcommand("preset", "Emit a single-type SPEC JSON");
  preset->add_option("family", family, "geometric or poisson-truncated")
      ->required()
      ->check(CLI::IsMember({"geometric", "poisson-truncated"}));
  preset->add_option("--param", param, "p for geometric, lambda for Poisson");
  preset->add_option("--cap", preset_cap, "Largest child count; the tail is lumped there");
  preset->add_option("--out", preset_out, "Output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      ExperimentConfig c = make_config(sim_f);
      if (condition >= 0) c.condition = condition;
      SimulateResult r = run_simulate(c);
      std::cout << "simulate: " << r.table.rows().size() << " replicas written to " << c.out << "\n";
      return report("simulate", r.report);
    }
    if (roundtrip->parsed()) {
      ExperimentConfig c = make_config(rt_f);
      if (corpus) c.corpus = true;
      RoundTripResult r = run_roundtrip(c);
      std::cout << "roundtrip: " << r.checked << " sampled trees, " << r.corpus_checked << " corpus trees, "
                << r.skipped << " skipped, negative control " << (r.negative_control_detected ? "detected" : "MISSED")
                << "\n";
      return report("roundtrip", r.report);
    }
    if (coupling->parsed()) {
      CouplingResult r = run_coupling(make_config(cp_f));
      std::cout << "coupling: " << r.checked << " checked, " << r.unreached << " unreached\n";
      return report("coupling", r.report);
    }
    if (scaling->parsed()) {
      ExperimentConfig c = make_config(sc_f);
      ScalingResult r = run_scaling(c);
      std::cout << r.table.to_csv();
      return report("scaling", r.report);
    }
    if (ghp->parsed()) {
      const GhpResult r = run_ghp(parse_space_json(read_file(space_a)), parse_space_json(read_file(space_b)), marks, cap);
      std::ostringstream os;
      os.precision(17);
      os << "ghp_estimate " << r.ghp << "\ngh_marked " << r.gh << "\n";
      std::cout << os.str();
      return 0;
    }
    if (encode->parsed()) {
      const MtreeDocument doc = parse_mtree(read_file(tree_path));
      for (const auto& b : encode_multitype(doc.tree)) {
        std::ostringstream os;
        write_walk_csv(os, b);
        if (encode_out.empty()) {
          std::cout << os.str();
        } else {
          write_file((fs::path(encode_out) / ("walk_" + std::to_string(b.base_type) + ".csv")).string(), os.str());
        }
      }
      return 0;
    }
    if (decode->parsed()) {
      std::vector<TypedWalkBundle> bundles;
      for (const auto& p : walk_paths) {
        std::istringstream is(read_file(p));
        bundles.push_back(read_walk_csv(is));
      }
      emit(decode_out, to_mtree(decode_multitype(bundles, root_type)));
      return 0;
    }
    if (glue_cmd->parsed()) {
      const Decoration dec = parse_decor_json(read_file(decor_path));
      const GluedSpace g = glue(dec, glue_cap);
      if (glue_out.empty()) {
        std::cout << to_space_json(g.space());
      } else {
        write_file((fs::path(glue_out) / "space.json").string(), to_space_json(g.space()));
        write_file((fs::path(glue_out) / "provenance.json").string(), provenance_json(g.tree));
      }
      return 0;
    }
    if (preset->parsed()) {
      const OffspringSpec s = family == "geometric" ? geometric_spec(param, preset_cap)
                                                    : poisson_truncated_spec(param, preset_cap);
      emit(preset_out, to_spec_json(s));
      return 0;
    }
  } catch (const CapExceeded& e) {
    std::cerr << "mgw: cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "mgw: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
