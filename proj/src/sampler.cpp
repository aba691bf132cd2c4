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

#include "speclab/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "speclab/error.hpp"

namespace speclab {

namespace {

constexpr std::uint64_t kSociabilityStream = 0x5eed5eed00000001ULL;
constexpr std::uint64_t kDiagonalStream = 0x5eed5eed00000002ULL;

std::size_t row_words(std::size_t n, std::size_t i) { return (n - i - 1 + 63) / 64; }

}  // namespace

std::string_view to_string(Model model) {
  switch (model) {
    case Model::inhomogeneous: return "inhomogeneous";
    case Model::chung_lu: return "chung_lu";
    case Model::soft_config: return "soft_config";
    case Model::sociability: return "sociability";
  }
  return "unknown";
}

Model model_from_string(std::string_view name) {
  for (Model m : {Model::inhomogeneous, Model::chung_lu, Model::soft_config, Model::sociability}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown model \"" + std::string(name) + "\"");
}

GraphSample::GraphSample(std::size_t n, Model model, double eps, std::uint64_t seed)
    : model(model), eps(eps), seed(seed), n_(n), row_offset_(n + 1, 0) {
  for (std::size_t i = 0; i < n; ++i) row_offset_[i + 1] = row_offset_[i] + row_words(n, i);
  words_.assign(row_offset_[n], 0);
}

bool GraphSample::edge(std::size_t i, std::size_t j) const {
  if (i == j) return false;
  if (i > j) std::swap(i, j);
  const std::size_t bit = j - i - 1;
  return (words_[row_offset_[i] + bit / 64] >> (bit % 64)) & 1U;
}

void GraphSample::set_edge(std::size_t i, std::size_t j) {
  if (i == j) throw ValidationError("self-loops are not allowed");
  if (i > j) std::swap(i, j);
  const std::size_t bit = j - i - 1;
  words_[row_offset_[i] + bit / 64] |= std::uint64_t{1} << (bit % 64);
}

std::size_t GraphSample::edge_count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<std::size_t> GraphSample::degrees() const {
  std::vector<std::size_t> deg(n_, 0);
  for (const auto& [i, j] : edges()) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

std::vector<std::pair<std::size_t, std::size_t>> GraphSample::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t w = row_offset_[i]; w < row_offset_[i + 1]; ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = std::countr_zero(bits);
        out.emplace_back(i, i + 1 + (w - row_offset_[i]) * 64 + static_cast<std::size_t>(b));
        bits &= bits - 1;
      }
    }
  }
  return out;
}

std::vector<double> DenseSymmetric::to_full() const {
  std::vector<double> full(n_ * n_);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const double v = data_[i + j * (j + 1) / 2];
      full[i * n_ + j] = v;
      full[j * n_ + i] = v;
    }
  }
  return full;
}

double DenseSymmetric::frobenius_sq() const {
  long double s = 0.0L;
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const long double v = data_[i + j * (j + 1) / 2];
      s += (i == j ? 1.0L : 2.0L) * v * v;
    }
  }
  return static_cast<double>(s);
}

SociabilityLaw SociabilityLaw::uniform(double a, double b) {
  if (!(a >= 0.0 && b >= a)) throw ValidationError("uniform sociability law needs 0 <= a <= b");
  SociabilityLaw law;
  law.kind = Kind::uniform;
  law.a = a;
  law.b = b;
  return law;
}

SociabilityLaw SociabilityLaw::discrete(std::vector<double> atoms, std::vector<double> probs) {
  if (atoms.empty() || atoms.size() != probs.size()) throw ValidationError("discrete law: atoms/probs size mismatch");
  double total = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (!(atoms[k] >= 0.0) || !(probs[k] >= 0.0)) throw ValidationError("discrete law: negativity violated");
    total += probs[k];
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("discrete law: probabilities must sum to 1");
  SociabilityLaw law;
  law.kind = Kind::discrete;
  law.atoms = std::move(atoms);
  law.probs = std::move(probs);
  return law;
}

SociabilityLaw SociabilityLaw::constant(double value) {
  if (!(value >= 0.0)) throw ValidationError("constant law: negativity violated");
  SociabilityLaw law;
  law.kind = Kind::constant;
  law.value = value;
  return law;
}

SociabilityLaw SociabilityLaw::from_json(const nlohmann::json& doc) {
  try {
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "uniform") return uniform(doc.at("a").get<double>(), doc.at("b").get<double>());
    if (kind == "discrete") {
      return discrete(doc.at("atoms").get<std::vector<double>>(), doc.at("probs").get<std::vector<double>>());
    }
    if (kind == "constant") return constant(doc.at("value").get<double>());
    throw ValidationError("unknown sociability law \"" + kind + "\"");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("sociability law: ") + e.what());
  }
}

nlohmann::json SociabilityLaw::to_json() const {
  switch (kind) {
    case Kind::uniform: return {{"kind", "uniform"}, {"a", a}, {"b", b}};
    case Kind::discrete: return {{"kind", "discrete"}, {"atoms", atoms}, {"probs", probs}};
    case Kind::constant: return {{"kind", "constant"}, {"value", value}};
  }
  return {};
}

double SociabilityLaw::sample(Rng& rng) const {
  switch (kind) {
    case Kind::uniform:
      return rng.uniform(a, b);
    case Kind::constant:
      return value;
    case Kind::discrete: {
      const double u = rng.uniform();
      double acc = 0.0;
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        acc += probs[k];
        if (u < acc) return atoms[k];
      }
      return atoms.back();
    }
  }
  return 0.0;
}

double SociabilityLaw::sup() const {
  switch (kind) {
    case Kind::uniform: return b;
    case Kind::constant: return value;
    case Kind::discrete: {
      double s = 0.0;
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        if (probs[k] > 0.0) s = std::max(s, atoms[k]);
      }
      return s;
    }
  }
  return 0.0;
}

double SociabilityLaw::moment(int p) const {
  switch (kind) {
    case Kind::uniform:
      if (b == a) return std::pow(a, p);
      return (std::pow(b, p + 1) - std::pow(a, p + 1)) / (static_cast<double>(p + 1) * (b - a));
    case Kind::constant:
      return std::pow(value, p);
    case Kind::discrete: {
      double s = 0.0;
      for (std::size_t k = 0; k < atoms.size(); ++k) s += probs[k] * std::pow(atoms[k], p);
      return s;
    }
  }
  return 0.0;
}

GraphSample sample_edges(std::size_t n, const std::function<double(std::size_t, std::size_t)>& prob, Model model,
                         double eps, std::uint64_t seed, Exec exec) {
  if (n < 2) throw DomainError("sample: N must be at least 2");
  GraphSample g(n, model, eps, seed);
  const auto fill_row = [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.bernoulli(prob(i, j))) g.set_edge(i, j);
    }
  };
  const auto rows = static_cast<std::ptrdiff_t>(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < rows; ++i) fill_row(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < rows; ++i) fill_row(static_cast<std::size_t>(i));
  }
  return g;
}

GraphSample sample_adjacency(const Kernel& kernel, std::size_t n, double eps, std::uint64_t seed, Exec exec) {
  if (!(eps > 0.0)) throw DomainError("sample_adjacency: eps must be positive");
  if (eps * kernel.f_max() > 1.0) {
    throw AdmissibilityError("sample_adjacency: eps * f_max = " + std::to_string(eps * kernel.f_max()) + " > 1");
  }
  auto g = sample_edges(
      n, [&](std::size_t i, std::size_t j) { return eps * kernel.eval(vertex_position(i, n), vertex_position(j, n)); },
      Model::inhomogeneous, eps, seed, exec);
  g.kernel_digest = kernel.digest();
  return g;
}

GraphSample sample_chung_lu(std::span<const double> weights, std::uint64_t seed, Exec exec) {
  const std::size_t n = weights.size();
  if (n < 2) throw DomainError("sample_chung_lu: need at least 2 weights");
  for (double d : weights) {
    if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("sample_chung_lu: weights must be positive");
  }
  std::vector<double> w(weights.begin(), weights.end());
  const double sigma = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<double> sorted = w;
  std::partial_sort(sorted.begin(), sorted.begin() + 2, sorted.end(), std::greater<>());
  if (sorted[0] * sorted[1] > sigma) {
    throw AdmissibilityError("sample_chung_lu: d_i d_j = " + std::to_string(sorted[0] * sorted[1]) +
                             " exceeds sigma_N = " + std::to_string(sigma));
  }
  const double eps = sorted[0] * sorted[0] / sigma;
  return sample_edges(n, [&](std::size_t i, std::size_t j) { return w[i] * w[j] / sigma; }, Model::chung_lu, eps,
                      seed, exec);
}

GraphSample sample_sociability(const SociabilityLaw& law, std::size_t n, double eps, std::uint64_t seed, Exec exec) {
  if (!(eps > 0.0)) throw DomainError("sample_sociability: eps must be positive");
  const double m = law.sup();
  if (eps * m * m > 1.0) {
    throw AdmissibilityError("sample_sociability: eps * sup(rho)^2 = " + std::to_string(eps * m * m) + " > 1");
  }
  std::vector<double> r(n);
  Rng rng(derive_seed(seed, kSociabilityStream));
  for (auto& v : r) v = law.sample(rng);
  auto g = sample_edges(n, [&](std::size_t i, std::size_t j) { return eps * r[i] * r[j]; }, Model::sociability, eps,
                        seed, exec);
  g.aux = std::move(r);
  return g;
}

DenseSymmetric gaussian_surrogate_adjacency(const Kernel& kernel, std::size_t n, std::uint64_t seed, Exec exec) {
  if (n < 2) throw DomainError("surrogate: N must be at least 2");
  DenseSymmetric m(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto fill_row = [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const double xi = vertex_position(i, n);
    for (std::size_t j = i + 1; j < n; ++j) {
      m.at(i, j) = std::sqrt(kernel.eval(xi, vertex_position(j, n)) * inv_n) * rng.normal();
    }
  };
  const auto rows = static_cast<std::ptrdiff_t>(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < rows; ++i) fill_row(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < rows; ++i) fill_row(static_cast<std::size_t>(i));
  }
  return m;
}

DenseSymmetric gaussian_surrogate_laplacian(const Kernel& kernel, std::size_t n, std::uint64_t seed, Exec exec) {
  DenseSymmetric m = gaussian_surrogate_adjacency(kernel, n, seed, exec);
  Rng rng(derive_seed(seed, kDiagonalStream));
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = vertex_position(i, n);
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row += kernel.eval(xi, vertex_position(j, n));
    }
    m.at(i, i) = rng.normal() * std::sqrt(row * inv_n);
  }
  return m;
}

double inv_sqrt_eps(std::size_t n) { return 1.0 / std::sqrt(static_cast<double>(n)); }

}  // namespace speclab
