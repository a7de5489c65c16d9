// Copyright 2026 The qfreq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * dense.hpp - batched affine layer used for surrogate inference.
 *
 * Every output element is computed as b[i] + W[i,0]*x[0] + ... + W[i,n-1]*x[n-1],
 * accumulated left to right, independent of batch size, column position and
 * vector width. With FP contraction disabled this makes inference results
 * bit-identical however callers batch their queries.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace qfreq::dense {

/// Y = W X + b. W is column-major rows x cols, X is column-major cols x batch,
/// Y is column-major rows x batch.
void affine(const double* weight, const double* bias, std::size_t rows, std::size_t cols,
            const double* input, std::size_t batch, double* output);

inline double tanh(double x) {
  const double e = std::exp(-2.0 * std::abs(x));
  return std::copysign((1.0 - e) / (1.0 + e), x);
}

void tanh_inplace(std::span<double> values);

}  // namespace qfreq::dense
