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

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "speclab/exec.hpp"
#include "speclab/kernel.hpp"

namespace speclab {

using cplx = std::complex<double>;

struct SolverOptions {
  double tol = 1e-12;
  std::size_t max_iter = 200000;
  double damping = 0.5;  // theta in (0, 1]
  Exec exec = Exec::parallel;
};

/// H(z, x_i) on the grid nodes for one z in the upper half-plane.
struct StieltjesField {
  cplx z;
  std::vector<cplx> values;
  double weight = 0.0;  // quadrature weight per node
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Solves z H(x) = 1 + H(x) int f(x,y) H(y) dy on the grid by the damped
/// iteration H <- theta / (z - int f(x,.) H) + (1 - theta) H.
///
/// Starts from H = 1/z unless `start` is given. Stops once the sup-norm change
/// drops below tol; throws ConvergenceError after max_iter and DomainError if Im z <= 0.
StieltjesField solve_h(const KernelGrid& kg, cplx z, const SolverOptions& opts = {},
                       const std::vector<cplx>* start = nullptr);

/// max_i |z H_i - 1 - H_i (K H)_i| for arbitrary H.
double fixed_point_residual(const KernelGrid& kg, cplx z, const std::vector<cplx>& h, Exec exec = Exec::parallel);

/// G_mu(z) = int_0^1 H(z, x) dx. Throws Error for an unconverged field.
cplx g_transform(const StieltjesField& field);

struct DensityPoint {
  double energy;
  double density;
  double eta;
  std::size_t iterations;
  double residual;
};

/// -(1/pi) Im G_mu(E + i eta) per energy. Each energy runs a warm-started
/// continuation from eta = 1 down to `eta`; energies are solved concurrently.
std::vector<DensityPoint> density_profile(const KernelGrid& kg, const std::vector<double>& energies, double eta,
                                          const SolverOptions& opts = {});

/// Semicircle Stieltjes transform (z - sqrt(z^2 - 4)) / 2 on the branch with G ~ 1/z.
cplx semicircle_stieltjes(cplx z);

}  // namespace speclab
