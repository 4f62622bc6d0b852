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


#include <doctest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "tiadc/kernels.hpp"

using namespace tiadc;
using kernels::Isa;

namespace {

std::vector<Isa> simd_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (kernels::isa_available(isa)) out.push_back(isa);
  }
  return out;
}

std::vector<std::int64_t> reference_i64(const std::vector<std::int32_t>& in, const std::vector<std::int32_t>& taps) {
  std::vector<std::int64_t> out(in.size() - taps.size() + 1, 0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    for (std::size_t i = 0; i < taps.size(); ++i) out[j] += std::int64_t{taps[i]} * in[j + i];
  }
  return out;
}

}  // namespace

TEST_CASE("scalar integer correlation matches the textbook sum") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int32_t> code(-2048, 2047);
  std::uniform_int_distribution<std::int32_t> tap(-(1 << 29), (1 << 29));
  for (std::size_t n_taps : {1u, 2u, 5u, 30u}) {
    std::vector<std::int32_t> in(200), taps(n_taps);
    for (auto& v : in) v = code(rng);
    for (auto& v : taps) v = tap(rng);
    std::vector<std::int64_t> out(in.size() - n_taps + 1);
    kernels::correlate_valid(in, taps, out, Isa::scalar);
    CHECK(out == reference_i64(in, taps));
  }
}

TEST_CASE("SIMD integer kernels are bit-exact with scalar") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int32_t> code(-32768, 32767);
  std::uniform_int_distribution<std::int32_t> tap(INT32_MIN, INT32_MAX);
  for (Isa isa : simd_isas()) {
    CAPTURE(kernels::isa_name(isa));
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n_taps = 1 + rng() % 70;
      const std::size_t n_out = 1 + rng() % 131;
      std::vector<std::int32_t> in(n_out + n_taps - 1), taps(n_taps);
      for (auto& v : in) v = code(rng);
      for (auto& v : taps) v = tap(rng);
      std::vector<std::int64_t> a(n_out), b(n_out);
      kernels::correlate_valid(in, taps, a, Isa::scalar);
      kernels::correlate_valid(in, taps, b, isa);
      REQUIRE(a == b);
    }
  }
}

TEST_CASE("SIMD double kernels are bit-exact with scalar") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Isa isa : simd_isas()) {
    CAPTURE(kernels::isa_name(isa));
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n_taps = 1 + rng() % 70;
      const std::size_t n_out = 1 + rng() % 131;
      std::vector<double> in(n_out + n_taps - 1), taps(n_taps);
      for (auto& v : in) v = u(rng);
      for (auto& v : taps) v = u(rng);
      std::vector<double> a(n_out), b(n_out);
      kernels::correlate_valid(in, taps, a, Isa::scalar);
      kernels::correlate_valid(in, taps, b, isa);
      REQUIRE(a == b);
    }
  }
}

TEST_CASE("forced ISA drives the default overload") {
  std::vector<std::int32_t> in{1, 2, 3, 4, 5}, taps{1, -1};
  std::vector<std::int64_t> out(4);
  kernels::force_isa(Isa::scalar);
  CHECK(kernels::active_isa() == Isa::scalar);
  kernels::correlate_valid(in, taps, out);
  CHECK(out == std::vector<std::int64_t>{-1, -1, -1, -1});
  kernels::force_isa(std::nullopt);
  CHECK(kernels::active_isa() == kernels::detected_isa());
  CHECK(kernels::isa_available(Isa::scalar));
}

TEST_CASE("causal FIR is zero-history convolution") {
  std::vector<std::int32_t> x{1, 0, 0, 2, 0, -1};
  std::vector<std::int32_t> h{3, 2, 1};
  const auto y = kernels::fir_causal(x, h);
  CHECK(y == std::vector<std::int64_t>{3, 2, 1, 6, 4, -1});

  std::vector<double> xd{1.0, 0.5}, hd{2.0, -1.0};
  const auto yd = kernels::fir_causal(xd, hd);
  REQUIRE(yd.size() == 2);
  CHECK(yd[0] == 2.0);
  CHECK(yd[1] == 0.0);
}
