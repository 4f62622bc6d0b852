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

// FIR inner loops. Every routine has a scalar reference and, where the
// target supports it, an AVX2 (x86-64) or NEON (aarch64) variant selected at
// runtime. Variants are bit-identical to the scalar reference: integer
// kernels accumulate exactly in int64, real kernels evaluate each output as
// the same left-to-right chain of fused multiply-adds.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tiadc::kernels {

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);
/// Best variant supported by this build and CPU.
Isa detected_isa();
/// Variant used by the dispatching overloads.
Isa active_isa();
/// Pin the dispatching overloads to one variant (nullopt restores detection).
/// Requests for a variant the CPU cannot run fall back to scalar.
void force_isa(std::optional<Isa> isa);
bool isa_available(Isa isa);

// Valid-mode correlation:
//   out[j] = sum_{i < taps.size()} taps[i] * in[j + i],  j < in.size() - taps.size() + 1
// `out` must hold exactly that many elements.
void correlate_valid(std::span<const std::int32_t> in, std::span<const std::int32_t> taps,
                     std::span<std::int64_t> out, Isa isa);
void correlate_valid(std::span<const double> in, std::span<const double> taps, std::span<double> out, Isa isa);
void correlate_valid(std::span<const std::int32_t> in, std::span<const std::int32_t> taps,
                     std::span<std::int64_t> out);
void correlate_valid(std::span<const double> in, std::span<const double> taps, std::span<double> out);

/// Causal FIR with zero initial state: out[k] = sum_i taps[i] * x[k - i].
std::vector<std::int64_t> fir_causal(std::span<const std::int32_t> x, std::span<const std::int32_t> taps);
std::vector<double> fir_causal(std::span<const double> x, std::span<const double> taps);

namespace scalar {
void correlate_valid_i64(const std::int32_t* in, const std::int32_t* taps, std::size_t n_taps, std::int64_t* out,
                         std::size_t n_out);
void correlate_valid_f64(const double* in, const double* taps, std::size_t n_taps, double* out, std::size_t n_out);
}  // namespace scalar

namespace avx2 {
void correlate_valid_i64(const std::int32_t* in, const std::int32_t* taps, std::size_t n_taps, std::int64_t* out,
                         std::size_t n_out);
void correlate_valid_f64(const double* in, const double* taps, std::size_t n_taps, double* out, std::size_t n_out);
}  // namespace avx2

namespace neon {
void correlate_valid_i64(const std::int32_t* in, const std::int32_t* taps, std::size_t n_taps, std::int64_t* out,
                         std::size_t n_out);
void correlate_valid_f64(const double* in, const double* taps, std::size_t n_taps, double* out, std::size_t n_out);
}  // namespace neon

}  // namespace tiadc::kernels
