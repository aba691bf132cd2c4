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
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "speclab/kernel.hpp"
#include "speclab/sampler.hpp"

namespace speclab {

/// Empirical spectral distribution: sorted eigenvalues, mass 1/N each.
class SpectralMeasure {
 public:
  /// Sorts its input. Throws DomainError on an empty spectrum.
  explicit SpectralMeasure(std::vector<double> eigenvalues);

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

  /// (1/N) sum lambda^p, accumulated in long double. Requires 0 <= p <= 20.
  double moment(int p) const;
  /// Right-continuous empirical CDF.
  double cdf(double x) const;
  /// Left limit of the CDF at x.
  double cdf_left(double x) const;

 private:
  std::vector<double> values_;
};

/// How a ScaledMatrix was obtained from the raw adjacency/Laplacian.
struct Transform {
  bool subtract_mean = false;  // off-diagonal eps*f(i/N,j/N) removed
  bool subtract_dn = false;    // diagonal expectation D_N removed
  double scale = 1.0;          // multiplier applied last
};

struct ScaledMatrix {
  DenseSymmetric matrix;
  Transform transform;
};

/// Expected value of the (i,j) adjacency entry, i != j.
using EdgeProbability = std::function<double(std::size_t, std::size_t)>;

/// eps * f((i+1)/N, (j+1)/N) for the sample's eps.
EdgeProbability kernel_probability(const Kernel& kernel, const GraphSample& g);

DenseSymmetric build_adjacency(const GraphSample& g);
/// Off-diagonal A(i,j); diagonal -deg(i). Row sums are exactly zero.
DenseSymmetric build_laplacian(const GraphSample& g);

/// (A - [subtract_mean] p) / sqrt(N eps), zero diagonal.
ScaledMatrix center_scale_adjacency(const GraphSample& g, const EdgeProbability& p, bool subtract_mean = true);
ScaledMatrix center_scale_adjacency(const GraphSample& g, const Kernel& kernel, bool subtract_mean = true);

/// (Delta - D_N) / sqrt(N eps) with D_N(i,i) = -sum_{k != i} p(i,k); the off-diagonal is
/// additionally centred when subtract_mean is set.
ScaledMatrix center_scale_laplacian(const GraphSample& g, const EdgeProbability& p, bool subtract_mean = true);
ScaledMatrix center_scale_laplacian(const GraphSample& g, const Kernel& kernel, bool subtract_mean = true);

/// A * sqrt(N / Tr(A^2)). Throws DomainError for an empty graph.
ScaledMatrix self_normalized_scaling(const GraphSample& g);

/// All eigenvalues of a real symmetric matrix (LAPACK dsyevd).
/// Throws ConvergenceError carrying the failing index on non-convergence.
SpectralMeasure eigenvalues(const DenseSymmetric& m);

/// Standard semicircle law of radius `radius` (variance radius^2/4).
double semicircle_cdf(double x, double radius = 2.0);
double semicircle_density(double x, double radius = 2.0);

/// sup_x |F_s(x) - F_ref(x)| over all jump points, exact for step CDFs.
double ks_distance(const SpectralMeasure& s, const SpectralMeasure& ref);
/// Same against a continuous reference CDF.
double ks_distance(const SpectralMeasure& s, const std::function<double(double)>& ref_cdf);

/// Levy distance between two ESDs, bisected to 1e-13 using an exact check of the
/// defining inequality for step CDFs.
double levy_distance(const SpectralMeasure& a, const SpectralMeasure& b);

struct LevyBound {
  double levy_cubed;   // L(ESD(a), ESD(b))^3
  double trace_bound;  // (1/N) Tr((a - b)^2)
  bool holds() const { return levy_cubed <= trace_bound; }
};

/// Hoffman-Wielandt type bound L^3 <= (1/N) Tr((A-B)^2).
LevyBound levy_bound_check(const DenseSymmetric& a, const DenseSymmetric& b);

struct Histogram {
  std::vector<double> edges;   // bins + 1 edges
  std::vector<double> masses;  // fraction of eigenvalues per bin
  double below = 0.0;          // mass left of the range
  double above = 0.0;          // mass right of the range
};

/// Equal-width histogram; the range defaults to [min, max]. The last bin is closed.
Histogram histogram(const SpectralMeasure& s, std::size_t bins,
                    std::optional<std::pair<double, double>> range = std::nullopt);

}  // namespace speclab
