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


#include <cmath>

#include "tiadc/kernels.hpp"

namespace tiadc::kernels::scalar {

void correlate_valid_i64(const std::int32_t* in, const std::int32_t* taps, std::size_t n_taps, std::int64_t* out,
                         std::size_t n_out) {
  for (std::size_t j = 0; j < n_out; ++j) {
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < n_taps; ++i) acc += std::int64_t{taps[i]} * in[j + i];
    out[j] = acc;
  }
}

void correlate_valid_f64(const double* in, const double* taps, std::size_t n_taps, double* out, std::size_t n_out) {
  for (std::size_t j = 0; j < n_out; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_taps; ++i) acc = std::fma(in[j + i], taps[i], acc);
    out[j] = acc;
  }
}

}  // namespace tiadc::kernels::scalar
