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
#include <span>
#include <vector>

#include "speclab/exec.hpp"
#include "speclab/sampler.hpp"

namespace speclab {

struct MaxentOptions {
  double tol = 1e-8;  // absolute degree residual
  std::size_t max_iter = 100000;
  double damping = 0.5;
  Exec exec = Exec::parallel;
};

/// Multipliers x_i = exp(-theta_i) of the soft configuration model.
struct MultiplierSolution {
  std::vector<double> x;
  std::vector<double> fitted;  // sum_{j != i} p_ij
  double residual = 0.0;       // max_i |k_i - fitted_i|
  std::size_t iterations = 0;
};

/// p = x_i x_j / (1 + x_i x_j).
inline double connection_probability(double xi, double xj) {
  const double t = xi * xj;
  return t / (1.0 + t);
}

/// Solves k_i = sum_{j != i} p_ij by the damped fixed point
/// x_i <- k_i / sum_{j != i} x_j / (1 + x_i x_j), started at k_i / sqrt(sum k).
/// The damping factor is halved whenever the residual grows.
///
/// Throws InfeasibleError listing every i with k_i <= 0 or k_i >= N - 1, and
/// ConvergenceError after max_iter sweeps.
MultiplierSolution solve_multipliers(std::span<const double> degrees, const MaxentOptions& opts = {});

/// Dense p_ij with zero diagonal.
DenseSymmetric connection_probabilities(const MultiplierSolution& sol);

/// Samples the canonical ensemble; eps = m_N^2 / sigma_N and aux = x.
GraphSample sample_soft_config(std::span<const double> degrees, std::uint64_t seed, const MaxentOptions& opts = {});

}  // namespace speclab
