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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "tiadc/errors.hpp"
#include "tiadc/estimator.hpp"
#include "tiadc/tiadc_model.hpp"

using namespace tiadc;

namespace {

std::vector<double> tone(std::size_t n, double amp, double f, double phase, double dc) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) + phase) + dc;
  return x;
}

double wrap(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

SineFitResult fit_with(double amp, double phase) {
  SineFitResult r;
  r.amplitude = amp;
  r.phase = phase;
  return r;
}

}  // namespace

TEST_CASE("noiseless four-parameter fit recovers the generating sine") {
  const auto x = tone(2048, 0.9, 0.1, 0.3, 0.05);
  const auto r = sine_fit_four_param(x, 0.1003);
  CHECK(std::abs(r.amplitude - 0.9) <= 1e-10 * 0.9);
  CHECK(std::abs(r.freq_rel - 0.1) <= 1e-10 * 0.1);
  CHECK(std::abs(r.phase - 0.3) <= 1e-10 * 0.3);
  CHECK(std::abs(r.dc - 0.05) <= 1e-10 * 0.05);
  CHECK(r.rms_residual < 1e-12);
  CHECK(r.iterations >= 1);
}

TEST_CASE("three-parameter fit at the true frequency") {
  const auto x = tone(500, 0.4, 0.037, -2.0, -0.1);
  const auto r = sine_fit_three_param(x, 0.037);
  CHECK(r.amplitude == doctest::Approx(0.4));
  CHECK(r.phase == doctest::Approx(-2.0));
  CHECK(r.dc == doctest::Approx(-0.1));
}

TEST_CASE("12-bit quantized sine: amplitude and phase within 1e-3") {
  TiadcConfig c;
  c.bits = 12;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ph(-std::numbers::pi, std::numbers::pi);
  for (int trial = 0; trial < 50; ++trial) {
    const double phase = ph(rng);
    auto codes = quantize_stream(tone(4096, 0.9, 0.1, phase, 0.05), c);
    const auto x = dequantize_stream(codes, c);
    const auto r = sine_fit_four_param(x, 0.1);
    CHECK(std::abs(r.amplitude - 0.9) <= 1e-3 * 0.9);
    CHECK(std::abs(wrap(r.phase - phase)) <= 1e-3);
  }
}

TEST_CASE("fitted parameters minimise the residual") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 0.01);
  auto x = tone(1000, 0.7, 0.0731, 1.2, 0.01);
  for (auto& v : x) v += g(rng);
  const auto r = sine_fit_four_param(x, 0.073);
  const double best = residual_sum_squares(x, r);
  for (int k = 0; k < 4; ++k) {
    for (double s : {-1.0, 1.0}) {
      SineFitResult p = r;
      if (k == 0) p.amplitude += s * 1e-4;
      if (k == 1) p.freq_rel += s * 1e-7;
      if (k == 2) p.phase += s * 1e-4;
      if (k == 3) p.dc += s * 1e-4;
      CHECK(residual_sum_squares(x, p) > best);
    }
  }
}

TEST_CASE("degenerate inputs") {
  const std::vector<double> zeros(256, 0.0);
  CHECK_THROWS_AS(sine_fit_four_param(zeros, 0.1), DegenerateFitError);
  const std::vector<double> flat(256, 0.3);
  CHECK_THROWS_AS(sine_fit_four_param(flat, 0.1), DegenerateFitError);
  CHECK_THROWS_AS(sine_fit_four_param(std::vector<double>(8, 1.0), 0.1), ShapeError);
}

TEST_CASE("non-convergence carries the last iterate") {
  const auto x = tone(512, 0.9, 0.1, 0.3, 0.0);
  SineFitOptions opts;
  opts.max_iterations = 1;
  opts.rel_tolerance = 0.0;
  try {
    (void)sine_fit_four_param(x, 0.1004, opts);
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_iterate().iterations == 1);
    CHECK(e.last_iterate().amplitude == doctest::Approx(0.9).epsilon(1e-3));
  }
}

TEST_CASE("gain from amplitude ratio") {
  TiadcConfig c;
  std::vector<SineFitResult> fits{fit_with(1.0, 0.0), fit_with(1.01, 2.0 * std::numbers::pi * 0.1)};
  const auto est = derive_mismatches(fits, c, 0.1);
  CHECK(est.gains[0] == 0.0);
  CHECK(est.gains[1] == doctest::Approx(0.01));
  CHECK(std::abs(est.skews[1]) < 1e-12);
}

TEST_CASE("skew from phase difference") {
  TiadcConfig c;
  std::vector<SineFitResult> fits{fit_with(1.0, 0.2), fit_with(1.0, 0.2 + 2.0 * std::numbers::pi * 0.1 * 1.01)};
  const auto est = derive_mismatches(fits, c, 0.1);
  CHECK(est.skews[1] == doctest::Approx(0.01));
}

TEST_CASE("phase ambiguity and shape errors") {
  TiadcConfig c;
  std::vector<SineFitResult> fits{fit_with(1.0, 0.0), fit_with(1.0, 2.0 * std::numbers::pi * 0.1 * 1.6)};
  CHECK_THROWS_AS(derive_mismatches(fits, c, 0.1), PhaseAmbiguityError);
  CHECK_THROWS_AS(derive_mismatches(std::vector<SineFitResult>{fit_with(1.0, 0.0)}, c, 0.1), ConfigError);
  CHECK_THROWS_AS(derive_mismatches(fits, c, 0.25), PhaseAmbiguityError);
}

TEST_CASE("round trip against the channel model at 12 bits") {
  TiadcConfig c;
  c.bits = 12;
  const MismatchProfile truth{{0.0, 0.02}, {0.0, 0.01}, {0.0, 0.01}};
  for (double f : {0.0188, 0.133, 0.3, 0.46}) {
    CAPTURE(f);
    const auto cap = simulate_capture(ToneSpec{0.9, f, 0.4, 0.0}, c, truth, 8192);
    for (bool known : {true, false}) {
      EstimatorOptions opts;
      if (known) opts.tone_freq_rel = f;
      const auto est = estimate_mismatches(cap, opts);
      CHECK(std::abs(est.offsets[1] - 0.02) <= 5e-4);
      CHECK(std::abs(est.gains[1] - 0.01) <= 5e-4);
      CHECK(std::abs(est.skews[1] - 0.01) <= 5e-4);
      CHECK(est.tone_freq_rel == doctest::Approx(f).epsilon(1e-6));
    }
  }
}

TEST_CASE("round trip with five channels") {
  TiadcConfig c;
  c.channels = 5;
  c.bits = 14;
  const MismatchProfile truth{{0.0, 0.01, -0.01, 0.005, 0.0},
                              {0.0, 0.01, -0.01, 0.02, -0.02},
                              {0.0, 0.01, 0.02, -0.01, -0.02}};
  const auto cap = simulate_capture(ToneSpec{0.9, 0.019, -1.0, 0.0}, c, truth, 5 * 4096);
  const auto est = estimate_mismatches(cap);
  for (std::size_t m = 0; m < 5; ++m) {
    CHECK(std::abs(est.offsets[m] - truth.offsets[m]) <= 5e-4);
    CHECK(std::abs(est.gains[m] - truth.gains[m]) <= 5e-4);
    CHECK(std::abs(est.skews[m] - truth.skews[m]) <= 5e-4);
  }
}

TEST_CASE("estimation block must fit in the capture") {
  TiadcConfig c;
  const auto cap = ideal_capture(ToneSpec{}, c, 1000);
  EstimatorOptions opts;
  opts.block_len = 600;
  CHECK_THROWS_AS(estimate_mismatches(cap, opts), ShapeError);
}
