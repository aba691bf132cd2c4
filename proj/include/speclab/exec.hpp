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
#include <vector>

namespace speclab {

/// Selects the OpenMP kernel or its serial reference. Both produce identical bits.
enum class Exec { serial, parallel };

/// Pairwise (cascade) summation. The result depends only on the order of `terms`.
double pairwise_sum(std::span<const double> terms);

}  // namespace speclab
