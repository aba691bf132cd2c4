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
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "speclab/exec.hpp"
#include "speclab/kernel.hpp"

namespace speclab {

/// Perfect matching of {1, ..., 2n}; pairs (u, v) with u < v, sorted by u.
struct PairPartition {
  std::vector<std::pair<int, int>> pairs;

  int points() const { return 2 * static_cast<int>(pairs.size()); }
  /// partner[p] for p in 1..2n (index 0 unused); empty if the pairs do not form a perfect matching.
  std::vector<int> partner() const;
  bool is_perfect_matching() const;
  bool is_non_crossing() const;
};

/// Partition of {1, ..., m}; blocks sorted internally and by their least element.
struct SetPartition {
  std::vector<std::vector<int>> blocks;
  std::size_t size() const { return blocks.size(); }
  std::vector<std::size_t> block_sizes() const;
};

enum class MomentSource { empirical, combinatorial, closed_form };
std::string_view to_string(MomentSource source);

/// m_0 = 1, m_1, ..., m_p.
struct MomentSequence {
  std::vector<double> values;
  MomentSource source = MomentSource::combinatorial;

  int order() const { return static_cast<int>(values.size()) - 1; }
  double operator[](std::size_t p) const { return values[p]; }
};

/// Non-crossing pair partitions of {1..two_n}, ordered lexicographically by the
/// partner of 1, then recursively. two_n must be even and at most 16.
std::vector<PairPartition> enumerate_nc2(int two_n);

/// Kreweras complement K(sigma) on {1bar, ..., (2n)bar}, as the cycles of sigma o gamma
/// with gamma = (1 2 ... 2n). Throws ValidationError for crossing or non-perfect input.
SetPartition kreweras(const PairPartition& sigma);

/// Block label (0..n) of each index i_1..i_{2n} in Tr(W_1 ... W_{2n}) when the Wick
/// pairing is sigma. Index i_j sits at (j-1)bar, so the labels are K(sigma) shifted by one.
std::vector<int> index_classes(const PairPartition& sigma);

/// Catalan numbers as even moments, counted from enumerate_nc2.
MomentSequence semicircle_moments(int p);

/// (p-1)!! for even p, 0 for odd p.
double gaussian_moment(int p);

/// 2n-th moment of rho boxtimes mu_s: sum over sigma of prod over blocks of K(sigma) of m_|block|(rho).
/// Odd orders return 0.
double boxtimes_semicircle_moments(const MomentSequence& rho, int two_n, Exec exec = Exec::parallel);

/// Inverts boxtimes_semicircle_moments order by order assuming m_1(rho) = 1.
/// `boxtimes` must hold orders 0..2*n_max with m_0 = 1.
MomentSequence recover_rho_moments(const MomentSequence& boxtimes, int n_max);

/// int over [0,1]^{n+1} of prod_j F^{runs_j}(x_{L(j)}) sqrt f(x_{L(j)}, x_{L(j+1)}),
/// by the midpoint rule on `kg`. Evaluated exactly on the grid by contracting the
/// pairing's index tree, so cost is O(n * grid^2) for every order.
double pairing_integral(const KernelGrid& kg, const PairPartition& sigma, std::span<const int> runs = {});

/// 2n-th moment of the adjacency limit mu. Needs grid >= 16 and two_n <= 12.
double mu_moments(const KernelGrid& kg, int two_n, Exec exec = Exec::parallel);

/// k-th moment gamma_k of the Laplacian limit nu, by expanding (Abar + Q)^k over words.
/// Needs grid >= 16 and k <= 8.
double nu_moments(const KernelGrid& kg, int k, Exec exec = Exec::parallel);

}  // namespace speclab
