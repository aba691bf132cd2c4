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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "speclab/kernel.hpp"
#include "speclab/sampler.hpp"

namespace speclab {

enum class Pipeline { adjacency, laplacian, self_normalized, surrogate_adjacency, surrogate_laplacian };

/// What to sample: a kernel graph, Chung-Lu weights, a soft configuration
/// degree sequence or a sociability law.
struct ModelSpec {
  Model model = Model::inhomogeneous;
  std::optional<Kernel> kernel;
  std::vector<double> weights;  // chung_lu d_i, or soft_config k_i
  std::optional<SociabilityLaw> law;

  nlohmann::json to_json() const;
};

struct EpsRule {
  bool inv_sqrt_n = true;
  double value = 0.0;
  double at(std::size_t n) const;
};

struct OutputSpec {
  bool eigenvalues = true;
  std::size_t histogram_bins = 0;  // 0 disables
  std::optional<std::pair<double, double>> histogram_range;
  int moments = 8;  // highest order written, 0 disables
  bool limit = false;
  std::size_t limit_grid = 200;
};

/// Experiment description; see README for the JSON layout.
struct ExperimentManifest {
  ModelSpec model;
  std::vector<std::size_t> sizes;
  EpsRule eps;
  std::uint64_t seed_base = 1;
  std::size_t seed_count = 1;
  Pipeline pipeline = Pipeline::adjacency;
  bool subtract_mean = true;
  OutputSpec outputs;
  std::filesystem::path output_dir = "speclab_out";

  /// Relative file references ("kernel_file", "weights_file", "degrees_file") resolve against base_dir.
  static ExperimentManifest from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".");
  /// Canonical form with every referenced file inlined.
  nlohmann::json to_json() const;
  /// Hex FNV-1a digest of the canonical form; independent of output_dir.
  std::string digest() const;
  /// Seed of replicate r.
  std::uint64_t replicate_seed(std::size_t r) const;
};

struct ReplicateRecord {
  std::size_t n = 0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> files;
  double seconds = 0.0;
  std::string error;  // empty on success
};

struct RunRecord {
  std::string command;
  std::string manifest_digest;
  std::vector<ReplicateRecord> replicates;
  std::vector<std::string> files;
  nlohmann::json diagnostics = nlohmann::json::object();
  std::size_t workers = 1;

  bool ok() const;
  nlohmann::json to_json() const;
};

/// --workers if given, else $SPECLAB_WORKERS, else the OpenMP thread count.
std::size_t resolve_workers(std::optional<std::size_t> flag);

/// Edge lists and sample manifests for every (N, replicate).
RunRecord cmd_sample(const ExperimentManifest& manifest, std::size_t workers);

/// Sample, build, centre/scale and diagonalise every replicate; write eigenvalues,
/// pooled histograms, mean moments and optional limit comparison.
RunRecord cmd_spectrum(const ExperimentManifest& manifest, std::size_t workers);

struct LimitRequest {
  Kernel kernel = Kernel::constant(1.0);
  int mu_order = 8;  // 0..12
  int nu_order = 0;  // 0..8
  std::vector<double> energies;
  double eta = 1e-3;
  std::size_t grid = 200;
  double tol = 1e-10;
  std::filesystem::path output_dir = "speclab_out";

  nlohmann::json to_json() const;
};

/// limit_moments.csv ("order,value,method"), density.csv and solver.json.
RunRecord cmd_limit(const LimitRequest& request, std::size_t workers);

struct CompareRequest {
  std::filesystem::path empirical;  // moment table
  std::filesystem::path limit;      // moment table
  std::optional<std::string> method;
  std::optional<std::filesystem::path> eigenvalues;
  std::optional<std::filesystem::path> reference_eigenvalues;
  std::optional<std::filesystem::path> density;
  std::optional<double> semicircle_radius;
};

/// Per-order deltas and relative errors, plus a KS distance when a spectrum is given.
/// Throws SchemaError when an empirical order has no limit counterpart.
nlohmann::json cmd_compare(const CompareRequest& request);

struct RecoverRequest {
  std::vector<std::filesystem::path> edge_files;
  std::optional<ExperimentManifest> manifest;  // sample instead of reading edges
  int n_max = 4;
  // Drop the largest eigenvalue and rescale to unit second moment before taking moments.
  // The Perron outlier sits near (N eps)^{1/2} m_2 and its share of the fourth moment,
  // N eps^2 m_2^4, does not vanish at eps = N^{-1/2}.
  bool drop_perron = true;
  std::filesystem::path output_dir = "speclab_out";
};

/// Self-normalised ESD moments -> rho moments m_1..m_{n_max}, averaged over replicates.
RunRecord cmd_recover(const RecoverRequest& request, std::size_t workers);

struct MaxentRequest {
  std::vector<double> degrees;
  double tol = 1e-8;
  std::size_t max_iter = 100000;
  bool sample = false;
  std::uint64_t seed = 1;
  std::size_t replicates = 1;
  std::filesystem::path output_dir = "speclab_out";
};

/// maxent_solution.csv ("i,k_i,x_i,fitted_degree"), maxent_report.json and optional edge lists.
RunRecord cmd_maxent(const MaxentRequest& request, std::size_t workers);

}  // namespace speclab
