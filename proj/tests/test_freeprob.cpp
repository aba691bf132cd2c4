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

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include "speclab/error.hpp"
#include "speclab/freeprob.hpp"
#include "speclab/rng.hpp"

using namespace speclab;

namespace {

using Pairs = std::vector<std::pair<int, int>>;
using Blocks = std::vector<std::vector<int>>;

// All perfect matchings of {1..m}.
std::vector<Pairs> all_matchings(int m) {
  std::vector<Pairs> out;
  std::function<void(std::vector<int>, Pairs)> rec = [&](std::vector<int> left, Pairs acc) {
    if (left.empty()) {
      std::sort(acc.begin(), acc.end());
      out.push_back(acc);
      return;
    }
    const int a = left.front();
    for (std::size_t k = 1; k < left.size(); ++k) {
      auto rest = left;
      const int b = rest[k];
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
      rest.erase(rest.begin());
      auto next = acc;
      next.emplace_back(a, b);
      rec(rest, next);
    }
  };
  std::vector<int> all(static_cast<std::size_t>(m));
  std::iota(all.begin(), all.end(), 1);
  rec(all, {});
  return out;
}

// Two blocks cross if a < b < c < d with a, c in one and b, d in the other.
bool blocks_cross(const std::vector<int>& x, const std::vector<int>& y) {
  for (int a : x)
    for (int c : x)
      for (int b : y)
        for (int d : y)
          if ((a < b && b < c && c < d) || (b < a && a < d && d < c)) return true;
  return false;
}

bool non_crossing(const Blocks& blocks) {
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = i + 1; j < blocks.size(); ++j)
      if (blocks_cross(blocks[i], blocks[j])) return false;
  return true;
}

Blocks as_blocks(const Pairs& p) {
  Blocks b;
  for (auto [u, v] : p) b.push_back({u, v});
  return b;
}

// All set partitions of {1..m}, blocks in order of least element.
std::vector<Blocks> all_partitions(int m) {
  std::vector<Blocks> out{{}};
  for (int x = 1; x <= m; ++x) {
    std::vector<Blocks> next;
    for (const auto& p : out) {
      for (std::size_t b = 0; b < p.size(); ++b) {
        auto q = p;
        q[b].push_back(x);
        next.push_back(q);
      }
      auto q = p;
      q.push_back({x});
      next.push_back(q);
    }
    out = std::move(next);
  }
  return out;
}

// Kreweras complement from its definition: the coarsest partition tau of the barred
// points with sigma u tau non-crossing, where k sits at 2k-1 and kbar at 2k.
Blocks kreweras_oracle(const Pairs& sigma, int m) {
  Blocks sig;
  for (auto [u, v] : sigma) sig.push_back({2 * u - 1, 2 * v - 1});
  Blocks best;
  for (const auto& tau : all_partitions(m)) {
    Blocks joint = sig;
    for (const auto& b : tau) {
      std::vector<int> bb;
      for (int x : b) bb.push_back(2 * x);
      joint.push_back(bb);
    }
    if (!non_crossing(joint)) continue;
    if (best.empty() || tau.size() < best.size()) best = tau;
  }
  return best;
}

// Wick constraints i_u = i_{v+1}, i_{u+1} = i_v for each pair, solved by union-find.
std::vector<int> wick_classes(const Pairs& sigma, int m) {
  std::vector<int> parent(static_cast<std::size_t>(m));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  for (auto [u, v] : sigma) {
    unite(u - 1, v % m);
    unite(u % m, v - 1);
  }
  std::vector<int> label(static_cast<std::size_t>(m), -1), cls(static_cast<std::size_t>(m));
  int next = 0;
  for (int j = 0; j < m; ++j) {
    const int r = find(j);
    if (label[r] < 0) label[r] = next++;
    cls[j] = label[r];
  }
  return cls;
}

// Brute-force grid sum of prod_pairs f(x_{i_u}, x_{i_{u+1}}) * prod_j F^{runs_j}(x_{i_j}).
double pairing_oracle(const KernelGrid& kg, const Pairs& sigma, const std::vector<int>& runs) {
  const int m = 2 * static_cast<int>(sigma.size());
  const auto cls = wick_classes(sigma, m);
  const int classes = *std::max_element(cls.begin(), cls.end()) + 1;
  const auto rm = kg.row_means();
  std::vector<std::size_t> x(static_cast<std::size_t>(classes), 0);
  double total = 0.0;
  while (true) {
    double t = 1.0;
    for (auto [u, v] : sigma) t *= kg.at(x[cls[u - 1]], x[cls[u % m]]);
    for (int j = 0; j < m && !runs.empty(); ++j) t *= std::pow(rm[x[cls[j]]], 0.5 * runs[j]);
    total += t;
    int d = 0;
    while (d < classes && ++x[d] == kg.n) x[d++] = 0;
    if (d == classes) break;
  }
  return total * std::pow(kg.weight, classes);
}

// Moments from free cumulants via non-crossing partitions.
double moment_from_cumulants(const std::vector<double>& kappa, int k) {
  double s = 0.0;
  for (const auto& p : all_partitions(k)) {
    if (!non_crossing(p)) continue;
    double t = 1.0;
    for (const auto& b : p) t *= kappa[b.size()];
    s += t;
  }
  return s;
}

// Free cumulants of a distribution from its moments 0..k.
std::vector<double> cumulants_from_moments(const std::vector<double>& m, int k) {
  std::vector<double> kappa(static_cast<std::size_t>(k) + 1, 0.0);
  for (int q = 1; q <= k; ++q) {
    kappa[q] = 0.0;
    kappa[q] = m[q] - moment_from_cumulants(kappa, q);
  }
  return kappa;
}

// tau((a s)^k) for a free from a standard semicircular s: sum over non-crossing
// partitions of the 2k letters whose blocks are pure, with s-blocks pairs.
double alternating_moment_oracle(const std::vector<double>& kappa_a, int k) {
  double total = 0.0;
  const auto pairings = all_matchings(k);
  for (const auto& tau : all_partitions(k)) {
    Blocks a_blocks;
    double weight = 1.0;
    for (const auto& b : tau) {
      std::vector<int> pos;
      for (int x : b) pos.push_back(2 * x - 1);
      a_blocks.push_back(pos);
      weight *= kappa_a[b.size()];
    }
    for (const auto& sigma : pairings) {
      Blocks joint = a_blocks;
      for (auto [u, v] : sigma) joint.push_back({2 * u, 2 * v});
      if (non_crossing(joint)) total += weight;
    }
  }
  return total;
}

std::set<std::vector<int>> block_set(const SetPartition& p) {
  return {p.blocks.begin(), p.blocks.end()};
}

}  // namespace

TEST_CASE("enumerate_nc2 matches a crossing filter over all matchings") {
  for (int m : {2, 4, 6, 8, 10}) {
    std::set<Pairs> oracle;
    for (const auto& p : all_matchings(m))
      if (non_crossing(as_blocks(p))) oracle.insert(p);
    std::set<Pairs> got;
    for (const auto& s : enumerate_nc2(m)) {
      CHECK(s.is_perfect_matching());
      CHECK(s.is_non_crossing());
      got.insert(s.pairs);
    }
    CHECK(got == oracle);
    CHECK(enumerate_nc2(m).size() == oracle.size());
  }
  CHECK(enumerate_nc2(16).size() == 1430);
  CHECK(enumerate_nc2(0).size() == 1);
  CHECK_THROWS_AS((void)enumerate_nc2(5), DomainError);
  CHECK_THROWS_AS((void)enumerate_nc2(18), DomainError);
}

TEST_CASE("crossing and non-perfect pairings are recognised") {
  CHECK_FALSE(PairPartition{{{1, 3}, {2, 4}}}.is_non_crossing());
  CHECK_FALSE(PairPartition{{{1, 2}, {2, 3}}}.is_perfect_matching());
  CHECK_THROWS_AS((void)kreweras(PairPartition{{{1, 3}, {2, 4}}}), ValidationError);
  CHECK_THROWS_AS((void)kreweras(PairPartition{{{1, 2}, {2, 3}}}), ValidationError);
}

TEST_CASE("Kreweras complement: worked examples") {
  const auto k1 = kreweras(PairPartition{{{1, 4}, {2, 3}}});
  CHECK(k1.blocks == Blocks{{1, 3}, {2}, {4}});
  const auto k2 = kreweras(PairPartition{{{1, 2}, {3, 4}, {5, 6}}});
  CHECK(k2.blocks == Blocks{{1}, {2, 4, 6}, {3}, {5}});
}

TEST_CASE("Kreweras complement matches the maximal-partition definition") {
  for (int m : {2, 4, 6, 8}) {
    for (const auto& s : enumerate_nc2(m)) {
      const auto k = kreweras(s);
      CHECK(k.size() == static_cast<std::size_t>(m / 2 + 1));
      const auto oracle = kreweras_oracle(s.pairs, m);
      CHECK(block_set(k) == std::set<std::vector<int>>(oracle.begin(), oracle.end()));
    }
  }
}

TEST_CASE("index classes agree with the Wick constraints") {
  for (int m : {2, 4, 6, 8, 10}) {
    for (const auto& s : enumerate_nc2(m)) {
      const auto got = index_classes(s);
      const auto want = wick_classes(s.pairs, m);
      // Same partition of positions, labels may differ.
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) CHECK((got[a] == got[b]) == (want[a] == want[b]));
    }
  }
}

TEST_CASE("Catalan and Gaussian moments") {
  const auto s = semicircle_moments(16);
  const std::vector<double> want{1, 0, 1, 0, 2, 0, 5, 0, 14, 0, 42, 0, 132, 0, 429, 0, 1430};
  CHECK(s.values == want);
  CHECK(gaussian_moment(0) == 1);
  CHECK(gaussian_moment(4) == 3);
  CHECK(gaussian_moment(8) == 105);
  CHECK(gaussian_moment(5) == 0);
}

TEST_CASE("boxtimes moments: examples and free-cumulant oracle") {
  MomentSequence delta{{1, 1, 1, 1, 1, 1, 1, 1, 1}, MomentSource::closed_form};
  for (int n = 0; n <= 16; ++n) CHECK(boxtimes_semicircle_moments(delta, n) == semicircle_moments(16).values[n]);

  // uniform[0,2]: m_k = 2^k / (k+1); fourth moment 2 m1^2 m2 = 8/3.
  MomentSequence uni{{}, MomentSource::closed_form};
  for (int k = 0; k <= 8; ++k) uni.values.push_back(std::pow(2.0, k) / (k + 1));
  CHECK(boxtimes_semicircle_moments(uni, 4) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
  CHECK(boxtimes_semicircle_moments(uni, 2) == doctest::Approx(1.0));
  CHECK(boxtimes_semicircle_moments(uni, 7) == 0.0);

  const auto kappa_a = cumulants_from_moments(uni.values, 8);
  for (int q = 2; q <= 8; q += 2) {
    CHECK(boxtimes_semicircle_moments(uni, q) == doctest::Approx(alternating_moment_oracle(kappa_a, q)).epsilon(1e-13));
  }
  CHECK_THROWS_AS((void)boxtimes_semicircle_moments(MomentSequence{{1, 1}, MomentSource::closed_form}, 6), DomainError);
}

TEST_CASE("recover inverts boxtimes") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    // Moments of a random discrete law rescaled to mean 1.
    std::vector<double> atoms(5), probs(5);
    double mean = 0.0, mass = 0.0;
    for (auto& p : probs) mass += (p = rng.uniform(0.1, 1.0));
    for (std::size_t a = 0; a < 5; ++a) mean += (atoms[a] = rng.uniform(0.0, 3.0)) * (probs[a] /= mass);
    MomentSequence rho{{}, MomentSource::closed_form};
    for (int k = 0; k <= 8; ++k) {
      double m = 0.0;
      for (std::size_t a = 0; a < 5; ++a) m += probs[a] * std::pow(atoms[a] / mean, k);
      rho.values.push_back(m);
    }
    MomentSequence bt{{}, MomentSource::combinatorial};
    for (int q = 0; q <= 16; ++q) bt.values.push_back(boxtimes_semicircle_moments(rho, q));
    const auto back = recover_rho_moments(bt, 8);
    for (int k = 0; k <= 8; ++k) {
      const double rel = std::abs(back.values[k] - rho.values[k]) / rho.values[k];
      CHECK(rel <= 1e-11);
    }
  }
  CHECK_THROWS_AS((void)recover_rho_moments(MomentSequence{{1, 0, 1}, MomentSource::empirical}, 0), DomainError);
  CHECK_THROWS_AS((void)recover_rho_moments(MomentSequence{{1, 0, 1}, MomentSource::empirical}, 2), DomainError);
  CHECK_THROWS_AS((void)recover_rho_moments(MomentSequence{{2, 0, 1}, MomentSource::empirical}, 1), ValidationError);
}

TEST_CASE("pairing integral equals a brute-force grid sum") {
  Rng rng(3);
  const std::size_t g = 5;
  std::vector<double> v(g * g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = i; j < g; ++j) v[i * g + j] = v[j * g + i] = rng.uniform(0.1, 2.0);
  const auto kg = discretize(Kernel::grid(v, g), g);
  for (int m : {2, 4, 6, 8}) {
    for (const auto& s : enumerate_nc2(m)) {
      CHECK(pairing_integral(kg, s) == doctest::Approx(pairing_oracle(kg, s.pairs, {})).epsilon(1e-12));
      std::vector<int> runs(static_cast<std::size_t>(m));
      for (int& r : runs) r = static_cast<int>(rng.next() % 3);
      CHECK(pairing_integral(kg, s, runs) == doctest::Approx(pairing_oracle(kg, s.pairs, runs)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS((void)pairing_integral(kg, enumerate_nc2(4)[0], std::vector<int>{1, 2}), DomainError);
}

TEST_CASE("mu moments: constant and product kernels") {
  const auto c1 = discretize(Kernel::constant(1.0), 32);
  const std::vector<double> catalan{1, 0, 1, 0, 2, 0, 5, 0, 14, 0, 42, 0, 132};
  for (int q = 0; q <= 12; ++q) CHECK(mu_moments(c1, q) == doctest::Approx(catalan[q]).epsilon(1e-13));
  const auto c3 = discretize(Kernel::constant(3.0), 32);
  CHECK(mu_moments(c3, 6) == doctest::Approx(5 * 27.0).epsilon(1e-13));

  // r(x) = x: limit is law(U) boxtimes mu_s.
  const auto kg = discretize(Kernel::product({0.0, 1.0}), 200);
  MomentSequence law{{}, MomentSource::closed_form};
  for (int k = 0; k <= 6; ++k) law.values.push_back(1.0 / (k + 1));
  for (int q = 2; q <= 12; q += 2) {
    CHECK(mu_moments(kg, q) == doctest::Approx(boxtimes_semicircle_moments(law, q)).epsilon(1e-4));
  }
  CHECK(mu_moments(kg, 2) == doctest::Approx(0.25).epsilon(1e-5));
  CHECK_THROWS_AS((void)mu_moments(discretize(Kernel::constant(1.0), 8), 2), DomainError);
  CHECK_THROWS_AS((void)mu_moments(c1, 14), DomainError);
}

TEST_CASE("nu moments: free-cumulant oracle for constant kernels") {
  // For f = c the limit is the free convolution of a semicircle and a Gaussian, both of variance c.
  std::vector<double> gauss;
  for (int q = 0; q <= 8; ++q) gauss.push_back(gaussian_moment(q));
  auto kappa = cumulants_from_moments(gauss, 8);
  kappa[2] += 1.0;
  for (double c : {1.0, 0.5}) {
    const auto kg = discretize(Kernel::constant(c), 16);
    for (int k = 0; k <= 8; ++k) {
      const double want = k == 0 ? 1.0 : moment_from_cumulants(kappa, k) * std::pow(c, 0.5 * k);
      CHECK(nu_moments(kg, k) == doctest::Approx(want).epsilon(1e-12));
    }
  }
  const auto kg = discretize(Kernel::constant(1.0), 16);
  CHECK(nu_moments(kg, 2) == doctest::Approx(2.0));
  CHECK(nu_moments(kg, 4) == doctest::Approx(9.0));
  CHECK_THROWS_AS((void)nu_moments(kg, 10), DomainError);
}

TEST_CASE("nu moments: second moment is twice the kernel mean") {
  // gamma_2 = int int f + int F^2 = 2 int int f.
  const auto kg = discretize(Kernel::product({0.3, 1.0, 0.5}), 64);
  CHECK(nu_moments(kg, 2) == doctest::Approx(2.0 * kg.mean()).epsilon(1e-13));
}

TEST_CASE("serial and parallel term sums are bit-identical") {
  const auto kg = discretize(Kernel::product({0.2, 0.9, 0.4, 1.0}), 40);
  for (int q = 2; q <= 10; q += 2) CHECK(mu_moments(kg, q, Exec::serial) == mu_moments(kg, q, Exec::parallel));
  for (int k = 2; k <= 8; k += 2) CHECK(nu_moments(kg, k, Exec::serial) == nu_moments(kg, k, Exec::parallel));
  MomentSequence rho{{1, 1, 1.5, 2.5, 4, 7, 11, 20, 33}, MomentSource::closed_form};
  for (int q = 2; q <= 16; q += 2) {
    CHECK(boxtimes_semicircle_moments(rho, q, Exec::serial) == boxtimes_semicircle_moments(rho, q, Exec::parallel));
  }
}
