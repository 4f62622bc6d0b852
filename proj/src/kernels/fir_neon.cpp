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


#include <arm_neon.h>

#include <cmath>

#include "tiadc/kernels.hpp"

namespace tiadc::kernels::neon {

void correlate_valid_i64(const std::int32_t* in, const std::int32_t* taps, std::size_t n_taps, std::int64_t* out,
                         std::size_t n_out) {
  std::size_t j = 0;
  for (; j + 4 <= n_out; j += 4) {
    int64x2_t acc_lo = vdupq_n_s64(0);
    int64x2_t acc_hi = vdupq_n_s64(0);
    for (std::size_t i = 0; i < n_taps; ++i) {
      const int32x2_t c = vdup_n_s32(taps[i]);
      const int32x4_t x = vld1q_s32(in + j + i);
      acc_lo = vmlal_s32(acc_lo, vget_low_s32(x), c);
      acc_hi = vmlal_s32(acc_hi, vget_high_s32(x), c);
    }
    vst1q_s64(out + j, acc_lo);
    vst1q_s64(out + j + 2, acc_hi);
  }
  for (; j < n_out; ++j) {
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < n_taps; ++i) acc += std::int64_t{taps[i]} * in[j + i];
    out[j] = acc;
  }
}

void correlate_valid_f64(const double* in, const double* taps, std::size_t n_taps, double* out, std::size_t n_out) {
  std::size_t j = 0;
  for (; j + 4 <= n_out; j += 4) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n_taps; ++i) {
      const float64x2_t c = vdupq_n_f64(taps[i]);
      acc0 = vfmaq_f64(acc0, vld1q_f64(in + j + i), c);
      acc1 = vfmaq_f64(acc1, vld1q_f64(in + j + i + 2), c);
    }
    vst1q_f64(out + j, acc0);
    vst1q_f64(out + j + 2, acc1);
  }
  for (; j < n_out; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_taps; ++i) acc = std::fma(in[j + i], taps[i], acc);
    out[j] = acc;
  }
}

}  // namespace tiadc::kernels::neon
