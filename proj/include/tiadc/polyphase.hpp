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


#pragma once

// Polyphase realisation of the per-channel calibration FIR. A sub-ADC stream
// is split into L interleaved portions, each output portion is computed from
// the polyphase components of the taps independently of the others, and the
// portions are merged back into one stream. The result is bit-identical to
// the serial integer convolution.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tiadc {

struct PolyphasePlan {
  int parallelism = 4;           // L
  std::size_t block_len = 4096;  // output samples per task within one portion

  /// block_len must cover at least one filter length.
  void validate(std::size_t n_taps) const;
  /// Samples of history each block reads from before its first output.
  static std::size_t overlap(std::size_t n_taps) { return n_taps == 0 ? 0 : n_taps - 1; }
};

/// Portion j holds stream[j], stream[j + L], stream[j + 2L], ...
template <class T>
std::vector<std::vector<T>> decompose(std::span<const T> stream, int parallelism);

/// Exact inverse of decompose.
template <class T>
std::vector<T> recompose(const std::vector<std::vector<T>>& portions);

/// Causal convolution y[n] = sum_i taps[i] * x[n - i] (zero initial state),
/// computed portion by portion. Input and output are in decomposed form.
std::vector<std::vector<std::int64_t>> parallel_convolve(const std::vector<std::vector<std::int32_t>>& portions,
                                                         std::span<const std::int32_t> taps,
                                                         const PolyphasePlan& plan);

/// decompose -> parallel_convolve -> recompose.
std::vector<std::int64_t> polyphase_convolve(std::span<const std::int32_t> stream, std::span<const std::int32_t> taps,
                                             const PolyphasePlan& plan);

}  // namespace tiadc
