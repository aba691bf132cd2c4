/*
 * Copyright (C) 2026 The speclab authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// speclab: command-line workbench. See README.md for the manifest layout.

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "speclab/error.hpp"
#include "speclab/tables.hpp"
#include "speclab/workbench.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace speclab;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> workers;
  std::optional<std::string> out_dir;
  std::optional<std::string> manifest;
};

// Inline JSON, a JSON file, or "constant:C".
json parse_spec(const std::string& text) {
  if (!text.empty() && text.front() == '{') return json::parse(text);
  if (text.rfind("constant:", 0) == 0) return {{"kind", "constant"}, {"c", std::stod(text.substr(9))}};
  if (!fs::exists(text)) throw ValidationError("no such file: " + text);
  return read_json(text);
}

std::vector<double> parse_energies(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  const auto c1 = text.find(':');
  if (c1 != std::string::npos) {
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ValidationError("energies: expected lo:hi:step");
    const double lo = std::stod(text.substr(0, c1));
    const double hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(text.substr(c2 + 1));
    if (!(step > 0.0) || hi < lo) throw ValidationError("energies: need lo <= hi and step > 0");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) out.push_back(lo + static_cast<double>(k) * step);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

struct SingleShot {
  std::string kernel;
  std::string weights;
  std::string degrees;
  std::string law;
  std::vector<std::size_t> n;
  std::string eps;
  std::string pipeline;
  std::size_t bins = 0;
  int moments = -1;
  bool limit = false;
  bool raw = false;
};

void add_single_shot(CLI::App* cmd, SingleShot& s) {
  cmd->add_option("--kernel", s.kernel, "kernel: inline JSON, JSON file, or constant:C");
  cmd->add_option("--weights", s.weights, "Chung-Lu expected degrees, one per line");
  cmd->add_option("--degrees", s.degrees, "soft-configuration degree sequence, one per line");
  cmd->add_option("--law", s.law, "sociability law: inline JSON or JSON file");
  cmd->add_option("--n", s.n, "graph sizes");
  cmd->add_option("--eps", s.eps, "edge density: a number or inv_sqrt_n");
  cmd->add_option("--pipeline", s.pipeline,
                  "adjacency | laplacian | self_normalized | surrogate_adjacency | surrogate_laplacian");
  cmd->add_option("--bins", s.bins, "pooled histogram bins (0 disables)");
  cmd->add_option("--moments", s.moments, "highest moment order written");
  cmd->add_flag("--limit", s.limit, "also write the limiting moments and relative errors");
  cmd->add_flag("--raw", s.raw, "do not subtract the expected matrix");
}

ExperimentManifest load_manifest(const Globals& g, const SingleShot& s) {
  json doc;
  fs::path base = ".";
  if (g.manifest) {
    doc = read_json(*g.manifest);
    base = fs::path(*g.manifest).parent_path();
    if (base.empty()) base = ".";
  } else {
    json model;
    if (!s.weights.empty()) {
      model = {{"type", "chung_lu"}, {"weights_file", fs::absolute(s.weights).string()}};
    } else if (!s.degrees.empty()) {
      model = {{"type", "soft_config"}, {"degrees_file", fs::absolute(s.degrees).string()}};
    } else if (!s.law.empty()) {
      model = {{"type", "sociability"}, {"law", parse_spec(s.law)}};
    } else {
      model = {{"type", "kernel"}, {"kernel", parse_spec(s.kernel.empty() ? "constant:1" : s.kernel)}};
    }
    doc["model"] = model;
    if (!s.n.empty()) doc["N"] = s.n;
    doc["outputs"] = json::object();
  }
  if (!s.eps.empty()) {
    if (s.eps == "inv_sqrt_n") {
      doc["eps"] = s.eps;
    } else {
      doc["eps"] = std::stod(s.eps);
    }
  }
  if (!s.pipeline.empty()) doc["pipeline"] = s.pipeline;
  if (s.raw) doc["subtract_mean"] = false;
  auto& outputs = doc["outputs"];
  if (outputs.is_null()) outputs = json::object();
  if (s.bins > 0) outputs["histogram"] = {{"bins", s.bins}};
  if (s.moments >= 0) outputs["moments"] = s.moments;
  if (s.limit) outputs["limit"] = true;
  if (g.seed || g.replicates) {
    json seeds = doc.value("seeds", json::object());
    if (g.seed) seeds["base"] = *g.seed;
    if (g.replicates) seeds["count"] = *g.replicates;
    doc["seeds"] = seeds;
  }
  if (g.out_dir) doc["output_dir"] = *g.out_dir;
  auto m = ExperimentManifest::from_json(doc, base);
  if (!doc.contains("output_dir") && g.manifest) m.output_dir = base / m.output_dir;
  return m;
}

fs::path out_dir(const Globals& g) { return g.out_dir ? fs::path(*g.out_dir) : fs::path("speclab_out"); }

int report(const RunRecord& rec) {
  for (const auto& f : rec.files) std::cout << f << '\n';
  int failed = 0;
  for (const auto& r : rec.replicates) {
    for (const auto& f : r.files) std::cout << f << '\n';
    if (!r.error.empty()) {
      std::cerr << "speclab: " << r.error << '\n';
      ++failed;
    }
  }
  if (failed > 0) {
    std::cerr << "speclab: " << failed << " of " << rec.replicates.size() << " replicates failed\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra of inhomogeneous random graphs and their limiting laws"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "base seed; replicate r uses a seed derived from it");
  app.add_option("--replicates", g.replicates, "number of replicates");
  app.add_option("--workers", g.workers, "worker threads (default $SPECLAB_WORKERS or all cores)");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--manifest", g.manifest, "experiment manifest (JSON)");

  SingleShot sample_opts, spectrum_opts;
  auto* sample = app.add_subcommand("sample", "write edge lists and sample manifests");
  add_single_shot(sample, sample_opts);
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues, histograms and moments of scaled matrices");
  add_single_shot(spectrum, spectrum_opts);

  LimitRequest limit_req;
  std::string limit_kernel = "constant:1", energies;
  auto* limit = app.add_subcommand("limit", "limiting moments and density for a kernel");
  limit->add_option("--kernel", limit_kernel, "kernel: inline JSON, JSON file, or constant:C");
  limit->add_option("--mu-order", limit_req.mu_order, "highest adjacency moment order (<= 12)");
  limit->add_option("--nu-order", limit_req.nu_order, "highest Laplacian moment order (<= 8)");
  limit->add_option("--energies", energies, "lo:hi:step or a comma-separated list");
  limit->add_option("--eta", limit_req.eta, "imaginary part of z");
  limit->add_option("--grid", limit_req.grid, "kernel discretisation size");
  limit->add_option("--tol", limit_req.tol, "fixed-point tolerance");

  CompareRequest cmp;
  std::string cmp_empirical, cmp_limit, cmp_method, cmp_eigs, cmp_ref, cmp_density;
  std::optional<double> cmp_radius;
  auto* compare = app.add_subcommand("compare", "moment deltas and KS distance between two runs");
  compare->add_option("--empirical", cmp_empirical, "empirical moments CSV")->required();
  compare->add_option("--limit", cmp_limit, "limit moments CSV")->required();
  compare->add_option("--method", cmp_method, "method column to select from the limit table");
  compare->add_option("--eigenvalues", cmp_eigs, "eigenvalue file for a KS distance");
  compare->add_option("--reference", cmp_ref, "reference eigenvalue file");
  compare->add_option("--density", cmp_density, "reference density CSV");
  compare->add_option("--semicircle", cmp_radius, "reference semicircle radius");

  RecoverRequest rec_req;
  std::vector<std::string> rec_edges;
  auto* recover = app.add_subcommand("recover", "recover sociability moments from self-normalised spectra");
  recover->add_option("--edges", rec_edges, "edge-list files, one replicate each")->delimiter(',');
  SingleShot rec_opts;
  recover->add_option("--law", rec_opts.law, "sample from this sociability law instead of reading edges");
  recover->add_option("--n", rec_opts.n, "graph sizes when sampling");
  recover->add_option("--eps", rec_opts.eps, "edge density when sampling: a number or inv_sqrt_n");
  recover->add_option("--n-max", rec_req.n_max, "highest recovered moment (1..8)");
  bool keep_perron = false;
  recover->add_flag("--keep-perron", keep_perron, "take moments of the full spectrum, Perron eigenvalue included");

  MaxentRequest me;
  std::string me_degrees;
  auto* maxent = app.add_subcommand("maxent", "solve for max-entropy multipliers of a degree sequence");
  maxent->add_option("--degrees", me_degrees, "degree sequence, one per line")->required();
  maxent->add_option("--tol", me.tol, "degree residual tolerance");
  maxent->add_option("--max-iter", me.max_iter, "iteration cap");
  maxent->add_flag("--sample", me.sample, "also sample graphs from the solution");

  CLI11_PARSE(app, argc, argv);

  try {
    const std::size_t workers = resolve_workers(g.workers);
    omp_set_num_threads(static_cast<int>(workers));

    if (*sample || *spectrum) {
      const auto m = load_manifest(g, *sample ? sample_opts : spectrum_opts);
      fs::create_directories(m.output_dir);
      return report(*sample ? cmd_sample(m, workers) : cmd_spectrum(m, workers));
    }
    if (*limit) {
      limit_req.kernel = Kernel::from_json(parse_spec(limit_kernel));
      limit_req.energies = parse_energies(energies);
      limit_req.output_dir = out_dir(g);
      fs::create_directories(limit_req.output_dir);
      return report(cmd_limit(limit_req, workers));
    }
    if (*compare) {
      cmp.empirical = cmp_empirical;
      cmp.limit = cmp_limit;
      if (!cmp_method.empty()) cmp.method = cmp_method;
      if (!cmp_eigs.empty()) cmp.eigenvalues = cmp_eigs;
      if (!cmp_ref.empty()) cmp.reference_eigenvalues = cmp_ref;
      if (!cmp_density.empty()) cmp.density = cmp_density;
      cmp.semicircle_radius = cmp_radius;
      const json result = cmd_compare(cmp);
      if (g.out_dir) {
        fs::create_directories(*g.out_dir);
        write_json(fs::path(*g.out_dir) / "compare_report.json", result);
      }
      std::cout << json_text(result);
      return 0;
    }
    if (*recover) {
      for (const auto& e : rec_edges) rec_req.edge_files.emplace_back(e);
      rec_req.output_dir = out_dir(g);
      if (g.manifest || !rec_opts.law.empty()) {
        rec_opts.pipeline = "self_normalized";
        rec_req.manifest = load_manifest(g, rec_opts);
        rec_req.output_dir = rec_req.manifest->output_dir;
      }
      rec_req.drop_perron = !keep_perron;
      fs::create_directories(rec_req.output_dir);
      return report(cmd_recover(rec_req, workers));
    }
    if (*maxent) {
      me.degrees = read_degrees(me_degrees);
      if (g.seed) me.seed = *g.seed;
      if (g.replicates) me.replicates = *g.replicates;
      me.output_dir = out_dir(g);
      fs::create_directories(me.output_dir);
      return report(cmd_maxent(me, workers));
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "speclab: infeasible: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "speclab: error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
