// SPDX-License-Identifier: Apache-2.0
//
// Copyright (C) 2026 The tiadc-calib Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "tiadc/kernels.hpp"

namespace tiadc::kernels::avx2 {

void correlate_valid_i64(const std::int32_t* in, const std::int32_t* taps, std::size_t n_taps, std::int64_t* out,
                         std::size_t n_out) {
  std::size_t j = 0;
  // Eight outputs per pass: two 4 x int64 accumulators. _mm256_mul_epi32
  // multiplies the sign-extended low halves of each 64-bit lane.
  for (; j + 8 <= n_out; j += 8) {
    __m256i acc0 = _mm256_setzero_si256();
    __m256i acc1 = _mm256_setzero_si256();
    for (std::size_t i = 0; i < n_taps; ++i) {
      const __m256i c = _mm256_set1_epi64x(taps[i]);
      const std::int32_t* p = in + j + i;
      const __m256i x0 = _mm256_cvtepi32_epi64(_mm_loadu_si128(reinterpret_cast<const __m128i*>(p)));
      const __m256i x1 = _mm256_cvtepi32_epi64(_mm_loadu_si128(reinterpret_cast<const __m128i*>(p + 4)));
      acc0 = _mm256_add_epi64(acc0, _mm256_mul_epi32(x0, c));
      acc1 = _mm256_add_epi64(acc1, _mm256_mul_epi32(x1, c));
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + j), acc0);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + j + 4), acc1);
  }
  for (; j + 4 <= n_out; j += 4) {
    __m256i acc = _mm256_setzero_si256();
    for (std::size_t i = 0; i < n_taps; ++i) {
      const __m256i x = _mm256_cvtepi32_epi64(_mm_loadu_si128(reinterpret_cast<const __m128i*>(in + j + i)));
      acc = _mm256_add_epi64(acc, _mm256_mul_epi32(x, _mm256_set1_epi64x(taps[i])));
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + j), acc);
  }
  for (; j < n_out; ++j) {
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < n_taps; ++i) acc += std::int64_t{taps[i]} * in[j + i];
    out[j] = acc;
  }
}

void correlate_valid_f64(const double* in, const double* taps, std::size_t n_taps, double* out, std::size_t n_out) {
  std::size_t j = 0;
  for (; j + 8 <= n_out; j += 8) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n_taps; ++i) {
      const __m256d c = _mm256_broadcast_sd(taps + i);
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(in + j + i), c, acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(in + j + i + 4), c, acc1);
    }
    _mm256_storeu_pd(out + j, acc0);
    _mm256_storeu_pd(out + j + 4, acc1);
  }
  for (; j + 4 <= n_out; j += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n_taps; ++i) {
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(in + j + i), _mm256_broadcast_sd(taps + i), acc);
    }
    _mm256_storeu_pd(out + j, acc);
  }
  for (; j < n_out; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_taps; ++i) acc = std::fma(in[j + i], taps[i], acc);
    out[j] = acc;
  }
}

}  // namespace tiadc::kernels::avx2
