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

#include "speclab/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "speclab/error.hpp"

namespace speclab {

namespace {

// out_i = sum_j w f(x_i, x_j) h_j
void apply_kernel(const KernelGrid& kg, const std::vector<cplx>& h, std::vector<cplx>& out, Exec exec) {
  const std::size_t n = kg.n;
  if (kg.factor) {
    const auto& r = *kg.factor;
    cplx s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += r[j] * h[j];
    s *= kg.weight;
    for (std::size_t i = 0; i < n; ++i) out[i] = r[i] * s;
    return;
  }
  const auto row = [&](std::size_t i) {
    const double* f = kg.values.data() + i * n;
    cplx s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += f[j] * h[j];
    out[i] = s * kg.weight;
  };
  const auto rows = static_cast<std::ptrdiff_t>(n);
  if (exec == Exec::parallel && n >= 64) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) row(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < rows; ++i) row(static_cast<std::size_t>(i));
  }
}

}  // namespace

double fixed_point_residual(const KernelGrid& kg, cplx z, const std::vector<cplx>& h, Exec exec) {
  std::vector<cplx> kh(kg.n);
  apply_kernel(kg, h, kh, exec);
  double r = 0.0;
  for (std::size_t i = 0; i < kg.n; ++i) r = std::max(r, std::abs(z * h[i] - 1.0 - h[i] * kh[i]));
  return r;
}

StieltjesField solve_h(const KernelGrid& kg, cplx z, const SolverOptions& opts, const std::vector<cplx>* start) {
  if (!(z.imag() > 0.0)) throw DomainError("solve_h: Im z must be positive");
  if (!(opts.tol > 0.0)) throw DomainError("solve_h: tol must be positive");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) throw DomainError("solve_h: damping must lie in (0, 1]");
  StieltjesField field{z, {}, kg.weight, 0.0, 0, false};
  if (start) {
    if (start->size() != kg.n) throw DomainError("solve_h: warm start has wrong size");
    field.values = *start;
  } else {
    field.values.assign(kg.n, 1.0 / z);
  }
  auto& h = field.values;
  std::vector<cplx> kh(kg.n);
  const double theta = opts.damping;
  double change = 0.0;
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    apply_kernel(kg, h, kh, opts.exec);
    change = 0.0;
    for (std::size_t i = 0; i < kg.n; ++i) {
      const cplx next = theta / (z - kh[i]) + (1.0 - theta) * h[i];
      change = std::max(change, std::abs(next - h[i]));
      h[i] = next;
    }
    field.iterations = it;
    if (change < opts.tol) {
      field.converged = true;
      break;
    }
  }
  field.residual = fixed_point_residual(kg, z, h, opts.exec);
  if (!field.converged) {
    throw ConvergenceError("solve_h: no convergence at z = (" + std::to_string(z.real()) + ", " +
                               std::to_string(z.imag()) + "), residual " + std::to_string(field.residual),
                           field.residual, field.iterations);
  }
  return field;
}

cplx g_transform(const StieltjesField& field) {
  if (!field.converged) throw Error("g_transform: field has not converged");
  cplx s = 0.0;
  for (const auto& v : field.values) s += v;
  return s * field.weight;
}

std::vector<DensityPoint> density_profile(const KernelGrid& kg, const std::vector<double>& energies, double eta,
                                          const SolverOptions& opts) {
  if (!(eta > 0.0)) throw DomainError("density_profile: eta must be positive");
  std::vector<DensityPoint> out(energies.size());
  std::vector<std::string> failures(energies.size());
  SolverOptions inner = opts;
  inner.exec = Exec::serial;
  const auto solve_one = [&](std::size_t e) {
    const double energy = energies[e];
    try {
      std::vector<double> ladder;
      for (double t = std::max(1.0, eta); t > eta * (1.0 + 1e-12); t /= 10.0) ladder.push_back(t);
      ladder.push_back(eta);
      std::vector<cplx> warm;
      StieltjesField field;
      for (std::size_t s = 0; s < ladder.size(); ++s) {
        SolverOptions step = inner;
        if (s + 1 < ladder.size()) step.tol = std::max(opts.tol, 1e-8);
        field = solve_h(kg, {energy, ladder[s]}, step, warm.empty() ? nullptr : &warm);
        warm = field.values;
      }
      out[e] = {energy, -g_transform(field).imag() / std::numbers::pi, eta, field.iterations, field.residual};
    } catch (const std::exception& ex) {
      failures[e] = ex.what();
    }
  };
  const auto count = static_cast<std::ptrdiff_t>(energies.size());
  if (opts.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t e = 0; e < count; ++e) solve_one(static_cast<std::size_t>(e));
  } else {
    for (std::ptrdiff_t e = 0; e < count; ++e) solve_one(static_cast<std::size_t>(e));
  }
  for (std::size_t e = 0; e < energies.size(); ++e) {
    if (!failures[e].empty()) {
      throw ConvergenceError("density_profile: E = " + std::to_string(energies[e]) + ": " + failures[e],
                             std::nan(""), 0);
    }
  }
  return out;
}

cplx semicircle_stieltjes(cplx z) { return 2.0 / (z + std::sqrt(z - 2.0) * std::sqrt(z + 2.0)); }

}  // namespace speclab
