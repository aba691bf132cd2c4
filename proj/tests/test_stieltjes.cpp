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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "speclab/error.hpp"
#include "speclab/freeprob.hpp"
#include "speclab/stieltjes.hpp"

using namespace speclab;

namespace {

// Root of G^2 - z G + 1 = 0 with Im G < 0 for Im z > 0.
cplx semicircle_oracle(cplx z) {
  const cplx d = std::sqrt(z * z - 4.0);
  const cplx a = (z - d) / 2.0, b = (z + d) / 2.0;
  return a.imag() < 0.0 ? a : b;
}

}  // namespace

TEST_CASE("semicircle Stieltjes transform picks the decaying branch") {
  for (double e = -3.0; e <= 3.0; e += 0.25) {
    for (double eta : {1e-3, 0.1, 2.0}) {
      const cplx z{e, eta};
      CHECK(std::abs(semicircle_stieltjes(z) - semicircle_oracle(z)) < 1e-12);
    }
  }
  CHECK(std::abs(semicircle_stieltjes({0.0, 1e6}) * cplx{0.0, 1e6} - 1.0) < 1e-9);
}

TEST_CASE("constant kernel reproduces the semicircle") {
  const auto kg = discretize(Kernel::constant(1.0), 50);
  for (double e = -3.0; e <= 3.0; e += 0.5) {
    const cplx z{e, 0.1};
    const auto field = solve_h(kg, z);
    CHECK(field.converged);
    CHECK(field.residual < 1e-10);
    CHECK(std::abs(g_transform(field) - semicircle_oracle(z)) < 1e-9);
  }
}

TEST_CASE("product kernel: transform matches its moment series far from the support") {
  const auto kg = discretize(Kernel::product({0.0, 1.0}), 200);
  const cplx z{0.0, 10.0};
  cplx series = 0.0;
  for (int k = 0; k <= 12; k += 2) series += mu_moments(kg, k) / std::pow(z, k + 1);
  const auto g = g_transform(solve_h(kg, z));
  CHECK(std::abs(g - series) < 1e-10);
}

TEST_CASE("dense and rank-one operators give the same field") {
  const auto kg = discretize(Kernel::product({0.3, 1.2, 0.7}), 80);
  auto dense = kg;
  dense.factor.reset();
  const cplx z{0.4, 0.05};
  const auto a = solve_h(kg, z);
  const auto b = solve_h(dense, z);
  CHECK(std::abs(g_transform(a) - g_transform(b)) < 1e-10);
  CHECK(fixed_point_residual(dense, z, a.values) < 1e-10);
}

TEST_CASE("serial and parallel solves are bit-identical") {
  auto kg = discretize(Kernel::product({0.3, 1.2, 0.7}), 128);
  kg.factor.reset();
  SolverOptions s, p;
  s.exec = Exec::serial;
  p.exec = Exec::parallel;
  const auto a = solve_h(kg, {0.5, 0.2}, s);
  const auto b = solve_h(kg, {0.5, 0.2}, p);
  CHECK(a.values == b.values);
  const std::vector<double> energies{-1.0, 0.0, 0.7};
  const auto da = density_profile(kg, energies, 1e-2, s);
  const auto db = density_profile(kg, energies, 1e-2, p);
  for (std::size_t e = 0; e < energies.size(); ++e) CHECK(da[e].density == db[e].density);
}

TEST_CASE("density profile converges to the semicircle density") {
  const auto kg = discretize(Kernel::constant(1.0), 20);
  const std::vector<double> energies{-1.5, -0.5, 0.0, 0.5, 1.5, 2.5};
  const auto pts = density_profile(kg, energies, 1e-4);
  for (const auto& p : pts) {
    const double want = std::abs(p.energy) < 2.0 ? std::sqrt(4.0 - p.energy * p.energy) / (2.0 * std::acos(-1.0)) : 0.0;
    CHECK(std::abs(p.density - want) < 1e-3);
    CHECK(p.eta == 1e-4);
  }
}

TEST_CASE("warm starts reduce work") {
  const auto kg = discretize(Kernel::constant(1.0), 16);
  const auto cold = solve_h(kg, {1.0, 0.01});
  const auto near = solve_h(kg, {1.0, 0.011});
  const auto warm = solve_h(kg, {1.0, 0.01}, {}, &near.values);
  CHECK(warm.iterations < cold.iterations);
  CHECK(std::abs(g_transform(warm) - g_transform(cold)) < 1e-10);
}

TEST_CASE("solver errors") {
  const auto kg = discretize(Kernel::constant(1.0), 16);
  CHECK_THROWS_AS((void)solve_h(kg, {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS((void)solve_h(kg, {0.0, -1.0}), DomainError);
  SolverOptions few;
  few.max_iter = 2;
  try {
    (void)solve_h(kg, {0.0, 0.1}, few);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.iterations == 2);
    CHECK(e.residual > 0.0);
  }
  StieltjesField unconverged{{0.0, 1.0}, {1.0}, 1.0, 0.0, 0, false};
  CHECK_THROWS_AS((void)g_transform(unconverged), Error);
  CHECK_THROWS_AS((void)density_profile(kg, {0.0}, 0.0), DomainError);
  CHECK_THROWS_AS((void)density_profile(kg, {0.0}, 0.01, few), ConvergenceError);
}
