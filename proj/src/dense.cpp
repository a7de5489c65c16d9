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

#include "qfreq/dense.hpp"

#include <cstring>

namespace qfreq::dense {

namespace {

#if defined(__AVX512F__)
constexpr std::size_t kLanes = 8;
#else
constexpr std::size_t kLanes = 4;
#endif
typedef double Vec __attribute__((vector_size(kLanes * sizeof(double))));
constexpr std::size_t kRowBlock = 2 * kLanes;

inline Vec load(const double* p) {
  Vec v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline void store(double* p, Vec v) { std::memcpy(p, &v, sizeof v); }

// C columns at once share each weight load.
template <std::size_t C>
void columns(const double* w, const double* b, std::size_t rows, std::size_t cols, const double* x,
             double* y) {
  std::size_t i = 0;
  for (; i + kRowBlock <= rows; i += kRowBlock) {
    Vec acc[C][2];
    for (std::size_t c = 0; c < C; ++c) {
      acc[c][0] = load(b + i);
      acc[c][1] = load(b + i + kLanes);
    }
    for (std::size_t k = 0; k < cols; ++k) {
      const double* wk = w + k * rows + i;
      const Vec w0 = load(wk);
      const Vec w1 = load(wk + kLanes);
      for (std::size_t c = 0; c < C; ++c) {
        const double xv = x[c * cols + k];
        acc[c][0] += w0 * xv;
        acc[c][1] += w1 * xv;
      }
    }
    for (std::size_t c = 0; c < C; ++c) {
      store(y + c * rows + i, acc[c][0]);
      store(y + c * rows + i + kLanes, acc[c][1]);
    }
  }
  for (; i < rows; ++i) {
    for (std::size_t c = 0; c < C; ++c) {
      double acc = b[i];
      for (std::size_t k = 0; k < cols; ++k) acc += w[k * rows + i] * x[c * cols + k];
      y[c * rows + i] = acc;
    }
  }
}

}  // namespace

void affine(const double* weight, const double* bias, std::size_t rows, std::size_t cols,
            const double* input, std::size_t batch, double* output) {
  constexpr std::size_t kGroup = 4;
  std::size_t j = 0;
  for (; j + kGroup <= batch; j += kGroup) {
    columns<kGroup>(weight, bias, rows, cols, input + j * cols, output + j * rows);
  }
  for (; j < batch; ++j) columns<1>(weight, bias, rows, cols, input + j * cols, output + j * rows);
}

void tanh_inplace(std::span<double> values) {
  for (double& v : values) v = tanh(v);
}

}  // namespace qfreq::dense
