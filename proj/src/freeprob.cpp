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

#include "speclab/freeprob.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>

#include "speclab/error.hpp"

namespace speclab {

std::vector<int> PairPartition::partner() const {
  const int m = points();
  std::vector<int> p(static_cast<std::size_t>(m) + 1, 0);
  for (const auto& [u, v] : pairs) {
    if (u < 1 || v > m || u >= v || p[u] != 0 || p[v] != 0) return {};
    p[u] = v;
    p[v] = u;
  }
  return p;
}

bool PairPartition::is_perfect_matching() const { return !partner().empty(); }

bool PairPartition::is_non_crossing() const {
  for (const auto& [u, v] : pairs) {
    for (const auto& [a, b] : pairs) {
      if (u < a && a < v && v < b) return false;
    }
  }
  return true;
}

std::vector<std::size_t> SetPartition::block_sizes() const {
  std::vector<std::size_t> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(b.size());
  return out;
}

std::string_view to_string(MomentSource source) {
  switch (source) {
    case MomentSource::empirical: return "empirical";
    case MomentSource::combinatorial: return "combinatorial";
    case MomentSource::closed_form: return "closed_form";
  }
  return "unknown";
}

namespace {

void enumerate_into(int lo, int hi, std::vector<std::pair<int, int>>& current,
                    const std::function<void()>& emit) {
  if (lo > hi) {
    emit();
    return;
  }
  for (int v = lo + 1; v <= hi; v += 2) {
    current.emplace_back(lo, v);
    enumerate_into(lo + 1, v - 1, current, [&] { enumerate_into(v + 1, hi, current, emit); });
    current.pop_back();
  }
}

void check_even(int two_n, int cap, const char* what) {
  if (two_n < 0 || two_n % 2 != 0) throw DomainError(std::string(what) + ": order must be even and nonnegative");
  if (two_n > cap) throw DomainError(std::string(what) + ": order exceeds cap " + std::to_string(cap));
}

}  // namespace

std::vector<PairPartition> enumerate_nc2(int two_n) {
  check_even(two_n, 16, "enumerate_nc2");
  std::vector<PairPartition> out;
  std::vector<std::pair<int, int>> current;
  enumerate_into(1, two_n, current, [&] {
    PairPartition p{current};
    std::sort(p.pairs.begin(), p.pairs.end());
    out.push_back(std::move(p));
  });
  return out;
}

SetPartition kreweras(const PairPartition& sigma) {
  const auto partner = sigma.partner();
  if (partner.empty() && !sigma.pairs.empty()) throw ValidationError("kreweras: not a perfect matching");
  if (!sigma.is_non_crossing()) throw ValidationError("kreweras: pairing is crossing");
  const int m = sigma.points();
  std::vector<bool> seen(static_cast<std::size_t>(m) + 1, false);
  SetPartition k;
  for (int start = 1; start <= m; ++start) {
    if (seen[start]) continue;
    std::vector<int> block;
    for (int j = start; !seen[j]; j = partner[j % m + 1]) {
      seen[j] = true;
      block.push_back(j);
    }
    std::sort(block.begin(), block.end());
    k.blocks.push_back(std::move(block));
  }
  return k;
}

std::vector<int> index_classes(const PairPartition& sigma) {
  const auto k = kreweras(sigma);
  const int m = sigma.points();
  std::vector<int> cls(static_cast<std::size_t>(m));
  for (std::size_t b = 0; b < k.blocks.size(); ++b) {
    for (int barred : k.blocks[b]) cls[static_cast<std::size_t>(barred % m)] = static_cast<int>(b);
  }
  return cls;
}

MomentSequence semicircle_moments(int p) {
  if (p < 0 || p > 16) throw DomainError("semicircle_moments: order must lie in [0, 16]");
  MomentSequence s{std::vector<double>(static_cast<std::size_t>(p) + 1, 0.0), MomentSource::combinatorial};
  for (int q = 0; q <= p; q += 2) s.values[q] = static_cast<double>(enumerate_nc2(q).size());
  return s;
}

double gaussian_moment(int p) {
  if (p < 0) throw DomainError("gaussian_moment: negative order");
  if (p % 2 != 0) return 0.0;
  double r = 1.0;
  for (int k = p - 1; k > 1; k -= 2) r *= k;
  return r;
}

namespace {

double product_over_blocks(const std::vector<std::size_t>& sizes, const MomentSequence& rho) {
  double t = 1.0;
  for (auto l : sizes) t *= rho.values[l];
  return t;
}

template <class Fn>
std::vector<double> map_terms(std::size_t count, Exec exec, Fn&& term) {
  std::vector<double> out(count, 0.0);
  const auto n = static_cast<std::ptrdiff_t>(count);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t t = 0; t < n; ++t) out[static_cast<std::size_t>(t)] = term(static_cast<std::size_t>(t));
  } else {
    for (std::ptrdiff_t t = 0; t < n; ++t) out[static_cast<std::size_t>(t)] = term(static_cast<std::size_t>(t));
  }
  return out;
}

}  // namespace

double boxtimes_semicircle_moments(const MomentSequence& rho, int two_n, Exec exec) {
  if (two_n < 0) throw DomainError("boxtimes: negative order");
  if (two_n % 2 != 0) return 0.0;
  const int n = two_n / 2;
  if (rho.order() < n) throw DomainError("boxtimes: need rho moments through order " + std::to_string(n));
  const auto sigmas = enumerate_nc2(two_n);
  const auto terms = map_terms(sigmas.size(), exec, [&](std::size_t s) {
    return product_over_blocks(kreweras(sigmas[s]).block_sizes(), rho);
  });
  return pairwise_sum(terms);
}

MomentSequence recover_rho_moments(const MomentSequence& boxtimes, int n_max) {
  if (n_max < 1) throw DomainError("recover: n_max must be at least 1");
  if (boxtimes.order() < 2 * n_max) {
    throw DomainError("recover: need boxtimes moments through order " + std::to_string(2 * n_max));
  }
  if (std::abs(boxtimes.values[0] - 1.0) > 1e-12) throw ValidationError("recover: boxtimes m_0 must equal 1");
  MomentSequence rho{std::vector<double>(static_cast<std::size_t>(n_max) + 1, 0.0), MomentSource::empirical};
  rho.values[0] = 1.0;
  rho.values[1] = 1.0;
  for (int n = 2; n <= n_max; ++n) {
    double known = 0.0;
    long long lead = 0;
    for (const auto& sigma : enumerate_nc2(2 * n)) {
      const auto sizes = kreweras(sigma).block_sizes();
      if (std::find(sizes.begin(), sizes.end(), static_cast<std::size_t>(n)) != sizes.end()) {
        ++lead;  // the other n blocks are singletons, contributing m_1^n = 1
      } else {
        known += product_over_blocks(sizes, rho);
      }
    }
    if (lead <= 0) throw Error("recover: non-positive leading coefficient at order " + std::to_string(n));
    rho.values[n] = (boxtimes.values[2 * n] - known) / static_cast<double>(lead);
  }
  return rho;
}

double pairing_integral(const KernelGrid& kg, const PairPartition& sigma, std::span<const int> runs) {
  const int m = sigma.points();
  if (!runs.empty() && static_cast<int>(runs.size()) != m) throw DomainError("pairing_integral: runs size mismatch");
  const std::size_t g = kg.n;
  const auto cls = index_classes(sigma);
  const std::size_t vertices = static_cast<std::size_t>(m / 2 + 1);

  std::vector<int> exponent(vertices, 0);
  if (!runs.empty()) {
    for (int j = 0; j < m; ++j) exponent[cls[j]] += runs[j];
  }
  // Each pair (u, v) glues entries u and v; entry u joins the classes of i_u and i_{u+1}.
  std::vector<std::vector<int>> adj(vertices);
  for (const auto& [u, v] : sigma.pairs) {
    const int a = cls[u - 1], b = cls[u % m];
    adj[a].push_back(b);
    adj[b].push_back(a);
  }

  std::vector<double> row_mean;
  if (std::any_of(exponent.begin(), exponent.end(), [](int e) { return e != 0; })) row_mean = kg.row_means();

  // Post-order contraction rooted at class 0.
  std::vector<int> parent(vertices, -1), order;
  order.reserve(vertices);
  std::vector<int> stack{0};
  parent[0] = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (int w : adj[v]) {
      if (parent[w] == -1) {
        parent[w] = v;
        stack.push_back(w);
      }
    }
  }
  std::vector<std::vector<double>> val(vertices, std::vector<double>(g, 1.0));
  for (std::size_t v = 0; v < vertices; ++v) {
    if (exponent[v] == 0) continue;
    for (std::size_t y = 0; y < g; ++y) val[v][y] = std::pow(row_mean[y], 0.5 * exponent[v]);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int c = *it;
    if (c == 0) break;
    const int p = parent[c];
    for (std::size_t y = 0; y < g; ++y) {
      const double* row = kg.values.data() + y * g;
      double s = 0.0;
      for (std::size_t t = 0; t < g; ++t) s += row[t] * val[c][t];
      val[p][y] *= s * kg.weight;
    }
  }
  double total = 0.0;
  for (std::size_t y = 0; y < g; ++y) total += val[0][y];
  return total * kg.weight;
}

double mu_moments(const KernelGrid& kg, int two_n, Exec exec) {
  if (kg.n < 16) throw DomainError("mu_moments: grid resolution must be at least 16");
  if (two_n < 0) throw DomainError("mu_moments: negative order");
  if (two_n % 2 != 0) return 0.0;
  check_even(two_n, 12, "mu_moments");
  if (two_n == 0) return 1.0;
  const auto sigmas = enumerate_nc2(two_n);
  const auto terms = map_terms(sigmas.size(), exec, [&](std::size_t s) { return pairing_integral(kg, sigmas[s]); });
  return pairwise_sum(terms);
}

namespace {

struct WordTerm {
  std::vector<int> runs;  // Y-run preceding each A, cyclically
  std::size_t sigma;
};

}  // namespace

double nu_moments(const KernelGrid& kg, int k, Exec exec) {
  if (kg.n < 16) throw DomainError("nu_moments: grid resolution must be at least 16");
  if (k < 0 || k > 8) throw DomainError("nu_moments: order must lie in [0, 8]");
  if (k == 0) return 1.0;
  if (k % 2 != 0) return 0.0;

  std::vector<std::vector<PairPartition>> nc2(static_cast<std::size_t>(k) + 1);
  std::vector<std::vector<std::vector<int>>> classes(static_cast<std::size_t>(k) + 1);
  for (int m = 2; m <= k; m += 2) {
    nc2[m] = enumerate_nc2(m);
    for (const auto& s : nc2[m]) classes[m].push_back(index_classes(s));
  }

  // Word bit b set means letter b is A; bits read cyclically.
  std::vector<WordTerm> items;
  for (unsigned word = 1; word < (1U << k); ++word) {
    const int m = std::popcount(word);
    if (m % 2 != 0) continue;
    int first = 0;
    while (!((word >> first) & 1U)) ++first;
    std::vector<int> runs;
    int run = 0;
    // Start right after the first A; the run closing at the first A wraps around.
    for (int step = 1; step <= k; ++step) {
      const int b = (first + step) % k;
      if ((word >> b) & 1U) {
        runs.push_back(run);
        run = 0;
      } else {
        ++run;
      }
    }
    // runs[t] now precedes the (t+2)-th A; rotate so runs[0] precedes the first A.
    std::rotate(runs.begin(), runs.end() - 1, runs.end());
    for (std::size_t s = 0; s < nc2[m].size(); ++s) {
      std::vector<int> exponent(static_cast<std::size_t>(m / 2 + 1), 0);
      for (int j = 0; j < m; ++j) exponent[classes[m][s][j]] += runs[j];
      if (std::all_of(exponent.begin(), exponent.end(), [](int e) { return e % 2 == 0; })) {
        items.push_back({runs, s});
      }
    }
  }

  auto terms = map_terms(items.size(), exec, [&](std::size_t t) {
    const auto& it = items[t];
    const int m = static_cast<int>(it.runs.size());
    std::vector<int> exponent(static_cast<std::size_t>(m / 2 + 1), 0);
    for (int j = 0; j < m; ++j) exponent[classes[m][it.sigma][j]] += it.runs[j];
    double z = 1.0;
    for (int e : exponent) z *= gaussian_moment(e);
    return z * pairing_integral(kg, nc2[m][it.sigma], it.runs);
  });

  // All-Y word: E[Z^k] * int F^k.
  const auto rm = kg.row_means();
  double fk = 0.0;
  for (double r : rm) fk += std::pow(r, 0.5 * k);
  terms.push_back(gaussian_moment(k) * fk * kg.weight);
  return pairwise_sum(terms);
}

}  // namespace speclab
