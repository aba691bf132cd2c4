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

#include "speclab/workbench.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numeric>

#include "speclab/error.hpp"
#include "speclab/freeprob.hpp"
#include "speclab/maxent.hpp"
#include "speclab/rng.hpp"
#include "speclab/spectra.hpp"
#include "speclab/stieltjes.hpp"
#include "speclab/tables.hpp"

namespace speclab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string hex_digest(const json& doc) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(doc.dump())));
  return buf;
}

std::string_view to_string(Pipeline p) {
  switch (p) {
    case Pipeline::adjacency: return "adjacency";
    case Pipeline::laplacian: return "laplacian";
    case Pipeline::self_normalized: return "self_normalized";
    case Pipeline::surrogate_adjacency: return "surrogate_adjacency";
    case Pipeline::surrogate_laplacian: return "surrogate_laplacian";
  }
  return "unknown";
}

Pipeline pipeline_from_string(const std::string& name) {
  for (Pipeline p : {Pipeline::adjacency, Pipeline::laplacian, Pipeline::self_normalized,
                     Pipeline::surrogate_adjacency, Pipeline::surrogate_laplacian}) {
    if (to_string(p) == name) return p;
  }
  throw ValidationError("manifest: unknown pipeline \"" + name + "\"");
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  if (!fs::exists(path)) throw ValidationError("manifest: referenced file does not exist: " + path.string());
  return path;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string tag(std::size_t n, std::size_t r) { return "N" + std::to_string(n) + "_r" + std::to_string(r); }

// Runs job(i) for i in [0, count) on `workers` threads; exceptions are captured per job.
template <class Fn>
std::vector<std::string> run_jobs(std::size_t count, std::size_t workers, Fn&& job) {
  std::vector<std::string> errors(count);
  const auto total = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for num_threads(static_cast<int>(std::max<std::size_t>(workers, 1))) schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < total; ++i) {
    try {
      job(static_cast<std::size_t>(i));
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  return errors;
}

struct Job {
  std::size_t n;
  std::size_t replicate;
  std::uint64_t seed;
};

std::vector<Job> make_jobs(const ExperimentManifest& m) {
  std::vector<Job> jobs;
  for (std::size_t n : m.sizes) {
    for (std::size_t r = 0; r < m.seed_count; ++r) jobs.push_back({n, r, m.replicate_seed(r)});
  }
  return jobs;
}

GraphSample draw(const ModelSpec& ms, std::size_t n, double eps, std::uint64_t seed) {
  switch (ms.model) {
    case Model::inhomogeneous:
      return sample_adjacency(*ms.kernel, n, eps, seed);
    case Model::chung_lu:
      return sample_chung_lu(ms.weights, seed);
    case Model::soft_config:
      return sample_soft_config(ms.weights, seed);
    case Model::sociability:
      return sample_sociability(*ms.law, n, eps, seed);
  }
  throw Error("unreachable");
}

EdgeProbability expected_edges(const ModelSpec& ms, const GraphSample& g) {
  switch (ms.model) {
    case Model::inhomogeneous:
      return kernel_probability(*ms.kernel, g);
    case Model::chung_lu: {
      const double sigma = std::accumulate(ms.weights.begin(), ms.weights.end(), 0.0);
      return [&w = ms.weights, sigma](std::size_t i, std::size_t j) { return w[i] * w[j] / sigma; };
    }
    case Model::soft_config:
      return [&x = g.aux](std::size_t i, std::size_t j) { return connection_probability(x[i], x[j]); };
    case Model::sociability:
      return [&r = g.aux, eps = g.eps](std::size_t i, std::size_t j) { return eps * r[i] * r[j]; };
  }
  throw Error("unreachable");
}

ScaledMatrix build_scaled(const ExperimentManifest& m, std::size_t n, double eps, std::uint64_t seed) {
  const auto& ms = m.model;
  switch (m.pipeline) {
    case Pipeline::surrogate_adjacency:
    case Pipeline::surrogate_laplacian: {
      if (!ms.kernel) throw ValidationError("surrogate pipelines need a kernel model");
      auto mat = m.pipeline == Pipeline::surrogate_adjacency ? gaussian_surrogate_adjacency(*ms.kernel, n, seed)
                                                             : gaussian_surrogate_laplacian(*ms.kernel, n, seed);
      return {std::move(mat), Transform{}};
    }
    default:
      break;
  }
  const GraphSample g = draw(ms, n, eps, seed);
  switch (m.pipeline) {
    case Pipeline::adjacency:
      return center_scale_adjacency(g, expected_edges(ms, g), m.subtract_mean);
    case Pipeline::laplacian:
      return center_scale_laplacian(g, expected_edges(ms, g), m.subtract_mean);
    case Pipeline::self_normalized:
      return self_normalized_scaling(g);
    default:
      throw Error("unreachable");
  }
}

// Moments of the weight law mu_r (Chung-Lu, soft config) or rho (sociability), orders 0..p.
std::optional<MomentSequence> weight_law_moments(const ModelSpec& ms, int p) {
  MomentSequence out{std::vector<double>(static_cast<std::size_t>(p) + 1, 0.0), MomentSource::closed_form};
  if (ms.model == Model::sociability) {
    for (int q = 0; q <= p; ++q) out.values[q] = ms.law->moment(q);
    return out;
  }
  if (ms.model == Model::chung_lu || ms.model == Model::soft_config) {
    const double mx = *std::max_element(ms.weights.begin(), ms.weights.end());
    for (int q = 0; q <= p; ++q) {
      double s = 0.0;
      for (double w : ms.weights) s += std::pow(w / mx, q);
      out.values[q] = s / static_cast<double>(ms.weights.size());
    }
    return out;
  }
  return std::nullopt;
}

// Limit moments matching the manifest's pipeline, orders 1..p (odd orders 0).
std::vector<MomentRow> limit_rows(const ExperimentManifest& m, int p) {
  std::vector<MomentRow> rows;
  const auto& ms = m.model;
  if (ms.kernel) {
    const bool lap = m.pipeline == Pipeline::laplacian || m.pipeline == Pipeline::surrogate_laplacian;
    if (m.pipeline == Pipeline::self_normalized) return rows;
    const int cap = lap ? 8 : 12;
    const auto kg = discretize(*ms.kernel, m.outputs.limit_grid);
    for (int q = 1; q <= std::min(p, cap); ++q) {
      rows.push_back({q, lap ? nu_moments(kg, q) : mu_moments(kg, q), lap ? "nu_words" : "mu_nc2"});
    }
    return rows;
  }
  if (m.pipeline == Pipeline::laplacian) return rows;
  const int cap = std::min(p, 16);
  const auto law = weight_law_moments(ms, cap / 2);
  if (!law) return rows;
  const double m1 = law->values.size() > 1 ? law->values[1] : 1.0;
  for (int q = 1; q <= cap; ++q) {
    double v = boxtimes_semicircle_moments(*law, q);
    if (m.pipeline == Pipeline::self_normalized) v /= std::pow(m1, q);
    rows.push_back({q, v, "boxtimes"});
  }
  return rows;
}

std::pair<double, double> mean_stderr(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = pairwise_sum(xs) / n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

void finish_record(RunRecord& rec, const std::vector<Job>& jobs, const std::vector<std::string>& errors) {
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!errors[i].empty()) {
      rec.replicates[i].error = "replicate " + std::to_string(jobs[i].replicate) + " (N=" +
                                std::to_string(jobs[i].n) + "): " + errors[i];
    }
  }
}

}  // namespace

json ModelSpec::to_json() const {
  json doc{{"type", model == Model::inhomogeneous ? "kernel" : std::string(speclab::to_string(model))}};
  if (kernel) doc["kernel"] = kernel->to_json();
  if (model == Model::chung_lu) doc["weights"] = weights;
  if (model == Model::soft_config) doc["degrees"] = weights;
  if (law) doc["law"] = law->to_json();
  return doc;
}

double EpsRule::at(std::size_t n) const { return inv_sqrt_n ? inv_sqrt_eps(n) : value; }

ExperimentManifest ExperimentManifest::from_json(const json& doc, const fs::path& base_dir) {
  ExperimentManifest m;
  try {
    const auto& model = doc.at("model");
    const auto type = model.at("type").get<std::string>();
    if (type == "kernel" || type == "inhomogeneous") {
      m.model.model = Model::inhomogeneous;
      if (model.contains("kernel_file")) {
        m.model.kernel = Kernel::from_json(read_json(resolve(base_dir, model.at("kernel_file").get<std::string>())));
      } else {
        m.model.kernel = Kernel::from_json(model.at("kernel"));
      }
    } else if (type == "chung_lu" || type == "soft_config") {
      m.model.model = model_from_string(type);
      const char* key = type == "chung_lu" ? "weights" : "degrees";
      const std::string file_key = std::string(key) + "_file";
      if (model.contains(file_key)) {
        m.model.weights = read_degrees(resolve(base_dir, model.at(file_key).get<std::string>()));
      } else {
        m.model.weights = model.at(key).get<std::vector<double>>();
      }
      if (m.model.weights.size() < 2) throw ValidationError("manifest: need at least 2 weights");
    } else if (type == "sociability") {
      m.model.model = Model::sociability;
      m.model.law = SociabilityLaw::from_json(model.at("law"));
    } else {
      throw ValidationError("manifest: unknown model type \"" + type + "\"");
    }

    if (doc.contains("N")) {
      const auto& n = doc.at("N");
      m.sizes = n.is_array() ? n.get<std::vector<std::size_t>>() : std::vector<std::size_t>{n.get<std::size_t>()};
    }
    if (m.model.model == Model::chung_lu || m.model.model == Model::soft_config) {
      const std::size_t len = m.model.weights.size();
      if (m.sizes.empty()) m.sizes = {len};
      for (auto n : m.sizes) {
        if (n != len) throw ValidationError("manifest: N must equal the length of the weight sequence");
      }
    }
    if (m.sizes.empty()) throw ValidationError("manifest: N list is empty");
    for (auto n : m.sizes) {
      if (n < 2) throw ValidationError("manifest: N must be at least 2");
    }

    if (doc.contains("eps")) {
      const auto& e = doc.at("eps");
      if (e.is_string()) {
        if (e.get<std::string>() != "inv_sqrt_n") throw ValidationError("manifest: eps rule must be \"inv_sqrt_n\" or a number");
        m.eps.inv_sqrt_n = true;
      } else {
        m.eps.inv_sqrt_n = false;
        m.eps.value = e.get<double>();
        if (!(m.eps.value > 0.0)) throw ValidationError("manifest: eps must be positive");
      }
    }
    if (doc.contains("seeds")) {
      const auto& s = doc.at("seeds");
      m.seed_base = s.value("base", std::uint64_t{1});
      m.seed_count = s.value("count", std::size_t{1});
    }
    if (m.seed_count < 1) throw ValidationError("manifest: seed count must be at least 1");
    if (doc.contains("pipeline")) m.pipeline = pipeline_from_string(doc.at("pipeline").get<std::string>());
    m.subtract_mean = doc.value("subtract_mean", true);
    if (doc.contains("outputs")) {
      const auto& o = doc.at("outputs");
      m.outputs.eigenvalues = o.value("eigenvalues", true);
      if (o.contains("histogram")) {
        const auto& h = o.at("histogram");
        m.outputs.histogram_bins = h.value("bins", std::size_t{50});
        if (h.contains("range")) {
          const auto r = h.at("range").get<std::vector<double>>();
          if (r.size() != 2) throw ValidationError("manifest: histogram range needs two numbers");
          m.outputs.histogram_range = std::make_pair(r[0], r[1]);
        }
      }
      m.outputs.moments = o.value("moments", 8);
      if (m.outputs.moments < 0 || m.outputs.moments > 20) throw ValidationError("manifest: moments must lie in [0, 20]");
      m.outputs.limit = o.value("limit", false);
      m.outputs.limit_grid = o.value("limit_grid", std::size_t{200});
    }
    if (doc.contains("output_dir")) m.output_dir = doc.at("output_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
  return m;
}

json ExperimentManifest::to_json() const {
  json out{{"eigenvalues", outputs.eigenvalues},
               {"moments", outputs.moments},
               {"limit", outputs.limit},
               {"limit_grid", outputs.limit_grid}};
  if (outputs.histogram_bins > 0) {
    json h{{"bins", outputs.histogram_bins}};
    if (outputs.histogram_range) h["range"] = {outputs.histogram_range->first, outputs.histogram_range->second};
    out["histogram"] = h;
  }
  json doc{{"model", model.to_json()},
           {"N", sizes},
           {"seeds", {{"base", seed_base}, {"count", seed_count}}},
           {"pipeline", to_string(pipeline)},
           {"subtract_mean", subtract_mean},
           {"outputs", out},
           {"output_dir", output_dir.string()}};
  if (eps.inv_sqrt_n) {
    doc["eps"] = "inv_sqrt_n";
  } else {
    doc["eps"] = eps.value;
  }
  return doc;
}

std::string ExperimentManifest::digest() const {
  json doc = to_json();
  doc.erase("output_dir");
  return hex_digest(doc);
}

std::uint64_t ExperimentManifest::replicate_seed(std::size_t r) const { return derive_seed(seed_base, r); }

bool RunRecord::ok() const {
  return std::all_of(replicates.begin(), replicates.end(), [](const auto& r) { return r.error.empty(); });
}

json RunRecord::to_json() const {
  json reps = json::array();
  for (const auto& r : replicates) {
    json rep{{"N", r.n}, {"replicate", r.replicate}, {"seed", r.seed}, {"files", r.files}, {"seconds", r.seconds}};
    if (!r.error.empty()) rep["error"] = r.error;
    reps.push_back(rep);
  }
  return {{"command", command},
          {"manifest_digest", manifest_digest},
          {"replicates", reps},
          {"files", files},
          {"diagnostics", diagnostics},
          {"workers", workers},
          {"partial", !ok()}};
}

std::size_t resolve_workers(std::optional<std::size_t> flag) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("SPECLAB_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return static_cast<std::size_t>(std::max(1, omp_get_max_threads()));
}

RunRecord cmd_sample(const ExperimentManifest& m, std::size_t workers) {
  RunRecord rec{"sample", m.digest(), {}, {}, json::object(), workers};
  const auto jobs = make_jobs(m);
  rec.replicates.resize(jobs.size());
  const auto errors = run_jobs(jobs.size(), workers, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& job = jobs[i];
    auto& out = rec.replicates[i];
    out = {job.n, job.replicate, job.seed, {}, 0.0, {}};
    const GraphSample g = draw(m.model, job.n, m.eps.at(job.n), job.seed);
    const fs::path edges = m.output_dir / ("edges_" + tag(job.n, job.replicate) + ".csv");
    const fs::path meta = m.output_dir / ("sample_" + tag(job.n, job.replicate) + ".json");
    write_edge_list(edges, g, rec.manifest_digest);
    json doc = sample_manifest(g);
    doc["edges_file"] = edges.filename().string();
    doc["manifest_digest"] = rec.manifest_digest;
    write_json(meta, doc);
    out.files = {edges.string(), meta.string()};
    out.seconds = seconds_since(t0);
  });
  finish_record(rec, jobs, errors);
  write_json(m.output_dir / "run_record.json", rec.to_json());
  return rec;
}

RunRecord cmd_spectrum(const ExperimentManifest& m, std::size_t workers) {
  RunRecord rec{"spectrum", m.digest(), {}, {}, json::object(), workers};
  const auto jobs = make_jobs(m);
  rec.replicates.resize(jobs.size());
  std::vector<std::optional<SpectralMeasure>> spectra(jobs.size());
  const auto errors = run_jobs(jobs.size(), workers, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& job = jobs[i];
    auto& out = rec.replicates[i];
    out = {job.n, job.replicate, job.seed, {}, 0.0, {}};
    const ScaledMatrix scaled = build_scaled(m, job.n, m.eps.at(job.n), job.seed);
    spectra[i] = eigenvalues(scaled.matrix);
    if (m.outputs.eigenvalues) {
      const fs::path p = m.output_dir / ("eigs_" + tag(job.n, job.replicate) + ".txt");
      write_eigenvalues(p, *spectra[i], rec.manifest_digest);
      out.files.push_back(p.string());
    }
    out.seconds = seconds_since(t0);
  });
  finish_record(rec, jobs, errors);

  const auto limit = m.outputs.limit && m.outputs.moments > 0 ? limit_rows(m, m.outputs.moments)
                                                              : std::vector<MomentRow>{};
  if (!limit.empty()) {
    const fs::path p = m.output_dir / "limit_moments.csv";
    write_limit_moments(p, limit, rec.manifest_digest);
    rec.files.push_back(p.string());
  }

  json per_n = json::array();
  for (std::size_t n : m.sizes) {
    std::vector<const SpectralMeasure*> ok;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].n == n && spectra[i]) ok.push_back(&*spectra[i]);
    }
    if (ok.empty()) continue;
    json summary{{"N", n}, {"eps", m.eps.at(n)}, {"replicates", ok.size()}};
    if (m.outputs.histogram_bins > 0) {
      std::vector<double> pooled;
      for (const auto* s : ok) pooled.insert(pooled.end(), s->values().begin(), s->values().end());
      const auto h = histogram(SpectralMeasure(std::move(pooled)), m.outputs.histogram_bins, m.outputs.histogram_range);
      const fs::path p = m.output_dir / ("hist_N" + std::to_string(n) + ".csv");
      write_histogram(p, h, rec.manifest_digest);
      rec.files.push_back(p.string());
      summary["histogram_outside_mass"] = h.below + h.above;
    }
    if (m.outputs.moments > 0) {
      std::vector<MomentRow> rows;
      json moments = json::array();
      for (int q = 1; q <= m.outputs.moments; ++q) {
        std::vector<double> xs;
        for (const auto* s : ok) xs.push_back(s->moment(q));
        const auto [mean, se] = mean_stderr(xs);
        rows.push_back({q, mean, {}});
        json entry{{"p", q}, {"mean", mean}, {"stderr", se}};
        for (const auto& l : limit) {
          if (l.order == q) {
            entry["limit"] = l.value;
            entry["rel_error"] = l.value != 0.0 ? std::abs(mean - l.value) / std::abs(l.value) : std::abs(mean);
          }
        }
        moments.push_back(entry);
      }
      const fs::path p = m.output_dir / ("moments_N" + std::to_string(n) + ".csv");
      write_moments(p, rows, rec.manifest_digest);
      rec.files.push_back(p.string());
      summary["moments"] = moments;
    }
    const fs::path sp = m.output_dir / ("summary_N" + std::to_string(n) + ".json");
    summary["manifest_digest"] = rec.manifest_digest;
    write_json(sp, summary);
    rec.files.push_back(sp.string());
    per_n.push_back(summary);
  }
  rec.diagnostics["summaries"] = per_n;
  write_json(m.output_dir / "run_record.json", rec.to_json());
  return rec;
}

json LimitRequest::to_json() const {
  return {{"kernel", kernel.to_json()}, {"mu_order", mu_order}, {"nu_order", nu_order}, {"energies", energies},
          {"eta", eta},                 {"grid", grid},         {"tol", tol}};
}

RunRecord cmd_limit(const LimitRequest& req, std::size_t workers) {
  if (req.mu_order < 0 || req.mu_order > 12) throw DomainError("limit: mu order must lie in [0, 12]");
  if (req.nu_order < 0 || req.nu_order > 8) throw DomainError("limit: nu order must lie in [0, 8]");
  RunRecord rec{"limit", hex_digest(req.to_json()), {}, {}, json::object(), workers};
  const auto kg = discretize(req.kernel, req.grid);
  std::vector<MomentRow> rows;
  for (int q = 0; q <= req.mu_order; ++q) rows.push_back({q, mu_moments(kg, q), "mu_nc2"});
  if (req.nu_order > 0) {
    for (int q = 0; q <= req.nu_order; ++q) rows.push_back({q, nu_moments(kg, q), "nu_words"});
  }
  const fs::path mp = req.output_dir / "limit_moments.csv";
  write_limit_moments(mp, rows, rec.manifest_digest);
  rec.files.push_back(mp.string());
  if (!req.energies.empty()) {
    SolverOptions opts;
    opts.tol = req.tol;
    const auto points = density_profile(kg, req.energies, req.eta, opts);
    const fs::path dp = req.output_dir / "density.csv";
    write_density(dp, points, rec.manifest_digest);
    rec.files.push_back(dp.string());
    json solver{{"damping", opts.damping}, {"tol", opts.tol}, {"eta", req.eta}, {"manifest_digest", rec.manifest_digest}};
    json pts = json::array();
    std::size_t max_it = 0;
    double max_res = 0.0;
    for (const auto& p : points) {
      pts.push_back({{"E", p.energy}, {"iterations", p.iterations}, {"residual", p.residual}});
      max_it = std::max(max_it, p.iterations);
      max_res = std::max(max_res, p.residual);
    }
    solver["iterations"] = max_it;
    solver["residual"] = max_res;
    solver["points"] = pts;
    const fs::path sp = req.output_dir / "solver.json";
    write_json(sp, solver);
    rec.files.push_back(sp.string());
  }
  write_json(req.output_dir / "run_record.json", rec.to_json());
  return rec;
}

json cmd_compare(const CompareRequest& req) {
  const auto emp = read_moments(req.empirical);
  auto lim = read_moments(req.limit);
  std::vector<std::string> methods;
  for (const auto& r : lim) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  }
  std::string method;
  if (req.method) {
    method = *req.method;
    if (std::find(methods.begin(), methods.end(), method) == methods.end()) {
      throw SchemaError("compare: limit table has no method \"" + method + "\"");
    }
  } else if (methods.size() > 1) {
    throw SchemaError("compare: limit table mixes methods; pass --method");
  } else if (!methods.empty()) {
    method = methods.front();
  }
  std::map<int, double> limit_by_order;
  for (const auto& r : lim) {
    if (r.method == method) limit_by_order[r.order] = r.value;
  }
  json orders = json::array();
  double worst = 0.0;
  for (const auto& e : emp) {
    const auto it = limit_by_order.find(e.order);
    if (it == limit_by_order.end()) {
      throw SchemaError("compare: order " + std::to_string(e.order) + " missing from the limit table");
    }
    const double delta = e.value - it->second;
    const bool relative = it->second != 0.0;
    const double err = relative ? std::abs(delta) / std::abs(it->second) : std::abs(delta);
    worst = std::max(worst, err);
    orders.push_back({{"order", e.order},
                      {"empirical", e.value},
                      {"limit", it->second},
                      {"delta", delta},
                      {"rel_error", err},
                      {"relative", relative}});
  }
  json report{{"orders", orders}, {"max_rel_error", worst}, {"method", method}};
  if (req.eigenvalues) {
    const SpectralMeasure s(read_eigenvalues(*req.eigenvalues));
    if (req.reference_eigenvalues) {
      report["ks_distance"] = ks_distance(s, SpectralMeasure(read_eigenvalues(*req.reference_eigenvalues)));
    } else if (req.density) {
      auto pts = read_density(*req.density);
      std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.energy < b.energy; });
      if (pts.size() < 2) throw SchemaError("compare: density table needs at least two rows");
      std::vector<double> cum(pts.size(), 0.0);
      for (std::size_t k = 1; k < pts.size(); ++k) {
        cum[k] = cum[k - 1] + 0.5 * (pts[k].density + pts[k - 1].density) * (pts[k].energy - pts[k - 1].energy);
      }
      const double total = cum.back();
      if (!(total > 0.0)) throw SchemaError("compare: density integrates to zero");
      const auto cdf = [&](double x) {
        if (x <= pts.front().energy) return 0.0;
        if (x >= pts.back().energy) return 1.0;
        const auto it = std::upper_bound(pts.begin(), pts.end(), x,
                                         [](double v, const DensityPoint& p) { return v < p.energy; });
        const std::size_t k = static_cast<std::size_t>(it - pts.begin());
        const double w = (x - pts[k - 1].energy) / (pts[k].energy - pts[k - 1].energy);
        return ((1.0 - w) * cum[k - 1] + w * cum[k]) / total;
      };
      report["ks_distance"] = ks_distance(s, cdf);
    } else if (req.semicircle_radius) {
      const double r = *req.semicircle_radius;
      report["ks_distance"] = ks_distance(s, [r](double x) { return semicircle_cdf(x, r); });
    }
  }
  return report;
}

RunRecord cmd_recover(const RecoverRequest& req, std::size_t workers) {
  if (req.n_max < 1) throw DomainError("recover: n_max must be at least 1 (nothing to recover)");
  if (req.n_max > 8) throw DomainError("recover: n_max must be at most 8");
  const int top = 2 * req.n_max;
  struct Input {
    std::size_t n;
    std::size_t replicate;
    std::uint64_t seed;
    std::optional<fs::path> edges;
  };
  std::vector<Input> inputs;
  std::string digest;
  if (req.manifest) {
    for (std::size_t n : req.manifest->sizes) {
      for (std::size_t r = 0; r < req.manifest->seed_count; ++r) {
        inputs.push_back({n, r, req.manifest->replicate_seed(r), std::nullopt});
      }
    }
    digest = req.manifest->digest();
  } else {
    if (req.edge_files.empty()) throw DomainError("recover: no edge lists given");
    std::string joined;
    for (std::size_t r = 0; r < req.edge_files.size(); ++r) {
      inputs.push_back({0, r, 0, req.edge_files[r]});
      joined += req.edge_files[r].filename().string() + ";";
    }
    digest = hex_digest(json{{"edges", joined}, {"n_max", req.n_max}, {"drop_perron", req.drop_perron}});
  }
  RunRecord rec{"recover", digest, {}, {}, json::object(), workers};
  rec.replicates.resize(inputs.size());
  std::vector<std::optional<MomentSequence>> recovered(inputs.size());
  const auto errors = run_jobs(inputs.size(), workers, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& in = inputs[i];
    const GraphSample g = in.edges ? read_edge_list(*in.edges)
                                   : draw(req.manifest->model, in.n, req.manifest->eps.at(in.n), in.seed);
    rec.replicates[i] = {g.size(), in.replicate, g.seed, {}, 0.0, {}};
    if (in.edges) rec.replicates[i].files.push_back(in.edges->string());
    auto esd = eigenvalues(self_normalized_scaling(g).matrix);
    if (req.drop_perron && esd.size() > 1) {
      std::vector<double> bulk(esd.values().begin(), esd.values().end() - 1);
      const double scale = 1.0 / std::sqrt(SpectralMeasure(bulk).moment(2));
      if (!std::isfinite(scale)) throw DomainError("recover: spectrum is a single outlier");
      for (double& v : bulk) v *= scale;
      esd = SpectralMeasure(std::move(bulk));
    }
    MomentSequence bt{std::vector<double>(static_cast<std::size_t>(top) + 1), MomentSource::empirical};
    for (int q = 0; q <= top; ++q) bt.values[q] = esd.moment(q);
    recovered[i] = recover_rho_moments(bt, req.n_max);
    rec.replicates[i].seconds = seconds_since(t0);
  });
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!errors[i].empty()) rec.replicates[i].error = "replicate " + std::to_string(i) + ": " + errors[i];
  }
  Table t{{"order", "value", "stderr"}, {}, {}};
  json rows = json::array();
  for (int q = 1; q <= req.n_max; ++q) {
    std::vector<double> xs;
    for (const auto& r : recovered) {
      if (r) xs.push_back(r->values[q]);
    }
    if (xs.empty()) break;
    const auto [mean, se] = mean_stderr(xs);
    t.rows.push_back({std::to_string(q), format_double(mean), format_double(se)});
    rows.push_back({{"order", q}, {"value", mean}, {"stderr", se}});
  }
  const fs::path p = req.output_dir / "recovered_moments.csv";
  write_table(p, "recovered_moments", digest, "moment_of_rho", t);
  rec.files.push_back(p.string());
  rec.diagnostics["recovered"] = rows;
  rec.diagnostics["drop_perron"] = req.drop_perron;
  write_json(req.output_dir / "run_record.json", rec.to_json());
  return rec;
}

RunRecord cmd_maxent(const MaxentRequest& req, std::size_t workers) {
  const std::string digest = hex_digest(json{{"degrees", req.degrees},
                                             {"tol", req.tol},
                                             {"max_iter", req.max_iter},
                                             {"sample", req.sample},
                                             {"seed", req.seed},
                                             {"replicates", req.replicates}});
  RunRecord rec{"maxent", digest, {}, {}, json::object(), workers};
  MaxentOptions opts;
  opts.tol = req.tol;
  opts.max_iter = req.max_iter;
  const auto sol = solve_multipliers(req.degrees, opts);
  Table t{{"i", "k_i", "x_i", "fitted_degree"}, {}, {}};
  for (std::size_t i = 0; i < sol.x.size(); ++i) {
    t.rows.push_back({std::to_string(i), format_double(req.degrees[i]), format_double(sol.x[i]),
                      format_double(sol.fitted[i])});
  }
  const fs::path sp = req.output_dir / "maxent_solution.csv";
  write_table(sp, "maxent_solution", digest, "vertex_index,degree,multiplier,degree", t);
  rec.files.push_back(sp.string());
  const json report{{"N", sol.x.size()},     {"residual", sol.residual},    {"iterations", sol.iterations},
                    {"tol", req.tol},        {"converged", sol.residual < req.tol}, {"manifest_digest", digest}};
  const fs::path rp = req.output_dir / "maxent_report.json";
  write_json(rp, report);
  rec.files.push_back(rp.string());
  rec.diagnostics = report;

  if (req.sample) {
    const std::size_t n = req.degrees.size();
    const double m = *std::max_element(req.degrees.begin(), req.degrees.end());
    const double sigma = std::accumulate(req.degrees.begin(), req.degrees.end(), 0.0);
    rec.replicates.resize(req.replicates);
    const auto errors = run_jobs(req.replicates, workers, [&](std::size_t r) {
      const auto t0 = std::chrono::steady_clock::now();
      const std::uint64_t seed = derive_seed(req.seed, r);
      auto g = sample_edges(
          n, [&](std::size_t i, std::size_t j) { return connection_probability(sol.x[i], sol.x[j]); },
          Model::soft_config, m * m / sigma, seed);
      const fs::path p = req.output_dir / ("edges_" + tag(n, r) + ".csv");
      write_edge_list(p, g, digest);
      rec.replicates[r] = {n, r, seed, {p.string()}, seconds_since(t0), {}};
    });
    for (std::size_t r = 0; r < req.replicates; ++r) {
      if (!errors[r].empty()) rec.replicates[r].error = "replicate " + std::to_string(r) + ": " + errors[r];
    }
  }
  write_json(req.output_dir / "run_record.json", rec.to_json());
  return rec;
}

}  // namespace speclab
