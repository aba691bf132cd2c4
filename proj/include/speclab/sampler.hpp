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
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "speclab/exec.hpp"
#include "speclab/kernel.hpp"
#include "speclab/rng.hpp"

namespace speclab {

enum class Model { inhomogeneous, chung_lu, soft_config, sociability };

std::string_view to_string(Model model);
Model model_from_string(std::string_view name);

/// Simple undirected graph on vertices 0..N-1 with provenance.
///
/// The strict upper triangle is stored as one padded bit row per vertex, so
/// rows can be filled concurrently. edge(i,j) and edge(j,i) read the same bit
/// and the diagonal is structurally zero.
class GraphSample {
 public:
  GraphSample(std::size_t n, Model model, double eps, std::uint64_t seed);

  std::size_t size() const { return n_; }
  bool edge(std::size_t i, std::size_t j) const;
  void set_edge(std::size_t i, std::size_t j);

  std::size_t edge_count() const;
  std::vector<std::size_t> degrees() const;
  /// All edges (i, j) with i < j in lexicographic order.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  Model model;
  double eps;
  std::uint64_t seed;
  std::string kernel_digest;
  std::vector<double> aux;  // R_i for sociability, x_i for soft_config

 private:
  std::size_t n_;
  std::vector<std::size_t> row_offset_;
  std::vector<std::uint64_t> words_;
};

/// Real symmetric matrix in packed upper storage: (i,j) and (j,i) are one slot.
class DenseSymmetric {
 public:
  explicit DenseSymmetric(std::size_t n = 0) : n_(n), data_(n * (n + 1) / 2, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[slot(i, j)]; }
  double& at(std::size_t i, std::size_t j) { return data_[slot(i, j)]; }

  /// Row-major copy of the full matrix.
  std::vector<double> to_full() const;
  /// sum_{i,j} M(i,j)^2 = Tr(M^2).
  double frobenius_sq() const;
  std::span<const double> packed() const { return data_; }

 private:
  static std::size_t slot(std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return i + j * (j + 1) / 2;
  }
  std::size_t n_;
  std::vector<double> data_;
};

/// Sociability law rho for the two-level model.
struct SociabilityLaw {
  enum class Kind { uniform, discrete, constant };
  Kind kind = Kind::constant;
  double a = 0.0, b = 0.0;  // uniform[a,b]
  std::vector<double> atoms, probs;
  double value = 1.0;  // constant

  static SociabilityLaw uniform(double a, double b);
  static SociabilityLaw discrete(std::vector<double> atoms, std::vector<double> probs);
  static SociabilityLaw constant(double value);
  static SociabilityLaw from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  double sample(Rng& rng) const;
  /// Supremum of the support.
  double sup() const;
  /// Exact p-th moment.
  double moment(int p) const;
};

/// Vertex positions are (i+1)/N for 0-based i, matching f(i/N, j/N) with 1-based labels.
inline double vertex_position(std::size_t i, std::size_t n) {
  return static_cast<double>(i + 1) / static_cast<double>(n);
}

/// Independent Bernoulli(prob(i,j)) edges for i<j. Row i draws from stream derive_seed(seed, i).
GraphSample sample_edges(std::size_t n, const std::function<double(std::size_t, std::size_t)>& prob, Model model,
                         double eps, std::uint64_t seed, Exec exec = Exec::parallel);

GraphSample sample_adjacency(const Kernel& kernel, std::size_t n, double eps, std::uint64_t seed,
                             Exec exec = Exec::parallel);

GraphSample sample_chung_lu(std::span<const double> weights, std::uint64_t seed, Exec exec = Exec::parallel);

GraphSample sample_sociability(const SociabilityLaw& law, std::size_t n, double eps, std::uint64_t seed,
                               Exec exec = Exec::parallel);

/// Abar_N: entries sqrt(f(i/N,j/N)/N) G_ij off the diagonal, zero diagonal.
DenseSymmetric gaussian_surrogate_adjacency(const Kernel& kernel, std::size_t n, std::uint64_t seed,
                                            Exec exec = Exec::parallel);

/// Abar_N + Y_N with Y_N(i,i) = Z_i sqrt((1/N) sum_{j != i} f(i/N, j/N)).
/// Uses the same off-diagonal Gaussians as gaussian_surrogate_adjacency for the same seed.
DenseSymmetric gaussian_surrogate_laplacian(const Kernel& kernel, std::size_t n, std::uint64_t seed,
                                            Exec exec = Exec::parallel);

/// Default eps_N = N^{-1/2}.
double inv_sqrt_eps(std::size_t n);

}  // namespace speclab
