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

#include "speclab/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "speclab/error.hpp"

namespace speclab {

namespace {

// s[i] = sum_{j != i} x_j / (1 + x_i x_j)
void row_sums(const std::vector<double>& x, std::vector<double>& s, Exec exec) {
  const std::size_t n = x.size();
  const auto row = [&](std::size_t i) {
    double acc = 0.0;
    const double xi = x[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) acc += x[j] / (1.0 + xi * x[j]);
    }
    s[i] = acc;
  };
  const auto rows = static_cast<std::ptrdiff_t>(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) row(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < rows; ++i) row(static_cast<std::size_t>(i));
  }
}

}  // namespace

MultiplierSolution solve_multipliers(std::span<const double> degrees, const MaxentOptions& opts) {
  const std::size_t n = degrees.size();
  if (n < 2) throw DomainError("solve_multipliers: need at least 2 vertices");
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(degrees[i] > 0.0 && degrees[i] < static_cast<double>(n - 1))) bad.push_back(i);
  }
  if (!bad.empty()) {
    std::string msg = "solve_multipliers: infeasible degrees (need 0 < k_i < N-1) at vertices";
    for (std::size_t k = 0; k < std::min<std::size_t>(bad.size(), 20); ++k) msg += " " + std::to_string(bad[k]);
    if (bad.size() > 20) msg += " ...";
    throw InfeasibleError(msg, std::move(bad));
  }

  const double total = std::accumulate(degrees.begin(), degrees.end(), 0.0);
  MultiplierSolution sol;
  sol.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) sol.x[i] = degrees[i] / std::sqrt(total);
  std::vector<double> s(n);
  double theta = opts.damping;
  double previous = INFINITY;
  for (std::size_t it = 0; it <= opts.max_iter; ++it) {
    row_sums(sol.x, s, opts.exec);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(degrees[i] - sol.x[i] * s[i]));
    sol.residual = residual;
    sol.iterations = it;
    if (residual < opts.tol) break;
    if (it == opts.max_iter) {
      throw ConvergenceError("solve_multipliers: no convergence, residual " + std::to_string(residual), residual, it);
    }
    if (residual > previous) theta = std::max(theta * 0.5, 1.0 / 1024.0);
    previous = residual;
    for (std::size_t i = 0; i < n; ++i) sol.x[i] = theta * (degrees[i] / s[i]) + (1.0 - theta) * sol.x[i];
  }
  sol.fitted.resize(n);
  for (std::size_t i = 0; i < n; ++i) sol.fitted[i] = sol.x[i] * s[i];
  return sol;
}

DenseSymmetric connection_probabilities(const MultiplierSolution& sol) {
  const std::size_t n = sol.x.size();
  DenseSymmetric p(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) p.at(i, j) = connection_probability(sol.x[i], sol.x[j]);
  }
  return p;
}

GraphSample sample_soft_config(std::span<const double> degrees, std::uint64_t seed, const MaxentOptions& opts) {
  auto sol = solve_multipliers(degrees, opts);
  const double m = *std::max_element(degrees.begin(), degrees.end());
  const double sigma = std::accumulate(degrees.begin(), degrees.end(), 0.0);
  const auto& x = sol.x;
  auto g = sample_edges(
      degrees.size(), [&](std::size_t i, std::size_t j) { return connection_probability(x[i], x[j]); },
      Model::soft_config, m * m / sigma, seed, opts.exec);
  g.aux = std::move(sol.x);
  return g;
}

}  // namespace speclab
