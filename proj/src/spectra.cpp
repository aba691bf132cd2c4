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

#include "speclab/spectra.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "speclab/error.hpp"

namespace speclab {

SpectralMeasure::SpectralMeasure(std::vector<double> eigenvalues) : values_(std::move(eigenvalues)) {
  if (values_.empty()) throw DomainError("spectral measure needs at least one eigenvalue");
  std::sort(values_.begin(), values_.end());
}

double SpectralMeasure::moment(int p) const {
  if (p < 0 || p > 20) throw DomainError("moment order must lie in [0, 20]");
  if (p == 0) return 1.0;
  long double s = 0.0L;
  for (double v : values_) {
    long double t = 1.0L;
    for (int k = 0; k < p; ++k) t *= v;
    s += t;
  }
  return static_cast<double>(s / static_cast<long double>(values_.size()));
}

double SpectralMeasure::cdf(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double SpectralMeasure::cdf_left(double x) const {
  const auto it = std::lower_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

EdgeProbability kernel_probability(const Kernel& kernel, const GraphSample& g) {
  const std::size_t n = g.size();
  const double eps = g.eps;
  return [&kernel, n, eps](std::size_t i, std::size_t j) {
    return eps * kernel.eval(vertex_position(i, n), vertex_position(j, n));
  };
}

DenseSymmetric build_adjacency(const GraphSample& g) {
  DenseSymmetric a(g.size());
  for (const auto& [i, j] : g.edges()) a.at(i, j) = 1.0;
  return a;
}

DenseSymmetric build_laplacian(const GraphSample& g) {
  DenseSymmetric l(g.size());
  std::vector<long long> deg(g.size(), 0);
  for (const auto& [i, j] : g.edges()) {
    l.at(i, j) = 1.0;
    ++deg[i];
    ++deg[j];
  }
  for (std::size_t i = 0; i < g.size(); ++i) l.at(i, i) = -static_cast<double>(deg[i]);
  return l;
}

ScaledMatrix center_scale_adjacency(const GraphSample& g, const EdgeProbability& p, bool subtract_mean) {
  const std::size_t n = g.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n) * g.eps);
  ScaledMatrix out{DenseSymmetric(n), Transform{subtract_mean, false, scale}};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double a = g.edge(i, j) ? 1.0 : 0.0;
      out.matrix.at(i, j) = (subtract_mean ? a - p(i, j) : a) * scale;
    }
  }
  return out;
}

ScaledMatrix center_scale_adjacency(const GraphSample& g, const Kernel& kernel, bool subtract_mean) {
  return center_scale_adjacency(g, kernel_probability(kernel, g), subtract_mean);
}

ScaledMatrix center_scale_laplacian(const GraphSample& g, const EdgeProbability& p, bool subtract_mean) {
  const std::size_t n = g.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n) * g.eps);
  ScaledMatrix out{DenseSymmetric(n), Transform{subtract_mean, true, scale}};
  std::vector<double> expected_degree(n, 0.0);
  std::vector<double> degree(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double pij = p(i, j);
      const double a = g.edge(i, j) ? 1.0 : 0.0;
      expected_degree[i] += pij;
      expected_degree[j] += pij;
      degree[i] += a;
      degree[j] += a;
      out.matrix.at(i, j) = (subtract_mean ? a - pij : a) * scale;
    }
  }
  // Delta(i,i) - D_N(i,i) = -deg(i) + E deg(i)
  for (std::size_t i = 0; i < n; ++i) out.matrix.at(i, i) = (expected_degree[i] - degree[i]) * scale;
  return out;
}

ScaledMatrix center_scale_laplacian(const GraphSample& g, const Kernel& kernel, bool subtract_mean) {
  return center_scale_laplacian(g, kernel_probability(kernel, g), subtract_mean);
}

ScaledMatrix self_normalized_scaling(const GraphSample& g) {
  const std::size_t edges = g.edge_count();
  if (edges == 0) throw DomainError("self-normalized scaling: graph has no edges");
  const double trace_sq = 2.0 * static_cast<double>(edges);
  const double scale = std::sqrt(static_cast<double>(g.size()) / trace_sq);
  ScaledMatrix out{DenseSymmetric(g.size()), Transform{false, false, scale}};
  for (const auto& [i, j] : g.edges()) out.matrix.at(i, j) = scale;
  return out;
}

SpectralMeasure eigenvalues(const DenseSymmetric& m) {
  const auto n = static_cast<lapack_int>(m.size());
  if (n == 0) throw DomainError("eigenvalues: empty matrix");
  for (double v : m.packed()) {
    if (!std::isfinite(v)) throw DomainError("eigenvalues: non-finite entry");
  }
  std::vector<double> full = m.to_full();
  std::vector<double> w(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'N', 'U', n, full.data(), n, w.data());
  if (info > 0) {
    throw ConvergenceError("eigenvalues: dsyevd failed to converge, info " + std::to_string(info),
                           std::nan(""), static_cast<std::size_t>(info));
  }
  if (info < 0) throw Error("eigenvalues: invalid argument " + std::to_string(-info));
  return SpectralMeasure(std::move(w));
}

double semicircle_cdf(double x, double radius) {
  const double t = x / radius;
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return 0.5 + (t * std::sqrt(1.0 - t * t) + std::asin(t)) / std::numbers::pi;
}

double semicircle_density(double x, double radius) {
  const double r2 = radius * radius;
  if (x * x >= r2) return 0.0;
  return 2.0 * std::sqrt(r2 - x * x) / (std::numbers::pi * r2);
}

double ks_distance(const SpectralMeasure& s, const SpectralMeasure& ref) {
  double d = 0.0;
  for (const auto* m : {&s, &ref}) {
    for (double x : m->values()) d = std::max(d, std::abs(s.cdf(x) - ref.cdf(x)));
  }
  return d;
}

double ks_distance(const SpectralMeasure& s, const std::function<double(double)>& ref_cdf) {
  double d = 0.0;
  const auto& v = s.values();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k > 0 && v[k] == v[k - 1]) continue;
    const double f = ref_cdf(v[k]);
    d = std::max({d, std::abs(f - s.cdf(v[k])), std::abs(f - s.cdf_left(v[k]))});
  }
  return d;
}

namespace {

// sup_x [G(x) - F(x + h)] for step CDFs F, G. The difference is piecewise constant with
// breakpoints at the jumps of G and at (jumps of F) - h.
double one_sided_excess(const SpectralMeasure& f, const SpectralMeasure& g, double h) {
  double best = 0.0;
  for (double x : g.values()) best = std::max(best, g.cdf(x) - f.cdf(x + h));
  for (double y : f.values()) best = std::max(best, g.cdf(y - h) - f.cdf(y));
  return best;
}

bool levy_admissible(const SpectralMeasure& a, const SpectralMeasure& b, double h) {
  return one_sided_excess(a, b, h) <= h && one_sided_excess(b, a, h) <= h;
}

}  // namespace

double levy_distance(const SpectralMeasure& a, const SpectralMeasure& b) {
  if (levy_admissible(a, b, 0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (levy_admissible(a, b, mid) ? hi : lo) = mid;
  }
  return hi;
}

LevyBound levy_bound_check(const DenseSymmetric& a, const DenseSymmetric& b) {
  if (a.size() != b.size()) throw DomainError("levy_bound_check: dimension mismatch");
  const std::size_t n = a.size();
  long double s = 0.0L;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const long double d = static_cast<long double>(a(i, j)) - b(i, j);
      s += (i == j ? 1.0L : 2.0L) * d * d;
    }
  }
  const double levy = levy_distance(eigenvalues(a), eigenvalues(b));
  return {levy * levy * levy, static_cast<double>(s / static_cast<long double>(n))};
}

Histogram histogram(const SpectralMeasure& s, std::size_t bins, std::optional<std::pair<double, double>> range) {
  if (bins == 0) throw DomainError("histogram: need at least one bin");
  auto [lo, hi] = range.value_or(std::make_pair(s.min(), s.max()));
  if (!(hi >= lo)) throw DomainError("histogram: empty range");
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = lo + width * static_cast<double>(k);
  h.edges.back() = hi;
  std::vector<std::size_t> counts(bins, 0);
  std::size_t below = 0, above = 0;
  for (double x : s.values()) {
    if (x < lo) {
      ++below;
    } else if (x > hi) {
      ++above;
    } else {
      counts[std::min(static_cast<std::size_t>((x - lo) / width), bins - 1)]++;
    }
  }
  const double inv = 1.0 / static_cast<double>(s.size());
  h.masses.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) h.masses[k] = static_cast<double>(counts[k]) * inv;
  h.below = static_cast<double>(below) * inv;
  h.above = static_cast<double>(above) * inv;
  return h;
}

}  // namespace speclab
