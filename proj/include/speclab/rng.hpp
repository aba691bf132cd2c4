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

#include <cstdint>
#include <random>
#include <string_view>

namespace speclab {

/// SplitMix64 finaliser; used both to derive stream seeds and to digest data.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic sub-seed for stream `stream` of generator `base`.
/// Replicate r of an experiment runs on derive_seed(base, r).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Stable 64-bit FNV-1a digest of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// Seedable 64-bit generator. One instance per independent stream; never shared across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  double normal() { return normal_(engine_); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace speclab
