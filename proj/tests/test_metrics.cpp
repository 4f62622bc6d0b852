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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "tiadc/errors.hpp"
#include "tiadc/metrics.hpp"
#include "tiadc/tiadc_model.hpp"

using namespace tiadc;

namespace {

std::vector<double> sine(std::size_t n, double amp, double bin, std::size_t n_fft, double phase = 0.3) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = amp * std::sin(2.0 * std::numbers::pi * bin * static_cast<double>(i) / static_cast<double>(n_fft) + phase);
  }
  return x;
}

}  // namespace

TEST_CASE("full-scale coherent sine peaks at 0 dBFS in its bin") {
  const auto x = sine(4096, 1.0, 77, 4096);
  const auto mag = power_spectrum(x, 4096);
  REQUIRE(mag.size() == 2049);
  CHECK(std::abs(mag[77]) <= 0.01);
  CHECK(std::max_element(mag.begin(), mag.end()) - mag.begin() == 77);
}

TEST_CASE("all-zero stream floors every bin") {
  const std::vector<double> x(1024, 0.0);
  const auto mag = power_spectrum(x, 1024);
  for (double v : mag) CHECK(v == kFloorDbfs);
}

TEST_CASE("one-sided power bins satisfy Parseval") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.1, 0.3);
  std::vector<double> x(2048);
  for (auto& v : x) v = g(rng);
  double time = 0.0;
  for (double v : x) time += v * v;
  const auto p = power_bins(x, 2048);
  double freq = 0.0;
  for (double v : p) freq += v;
  CHECK(freq == doctest::Approx(time).epsilon(1e-10));
}

TEST_CASE("ideal 12-bit coherent sine measures about 74 dB") {
  TiadcConfig c;
  c.bits = 12;
  const double f = 401.0 / 4096.0;
  const auto cap = ideal_capture(ToneSpec{1.0 - c.lsb(), f, 0.7, 0.0}, c, 4096);
  const auto x = dequantize_stream(cap.interleaved, c);
  const auto s = sinad(x, f, 4096);
  CHECK(s.sinad_db == doctest::Approx(74.0).epsilon(1.0 / 74.0));
  CHECK(s.signal_bin == 401);
  CHECK(s.enob == doctest::Approx(enob_from_sinad(s.sinad_db)));
}

TEST_CASE("SINAD is scale invariant and falls with added noise") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  const auto clean = sine(4096, 0.5, 123, 4096);
  std::vector<double> noise(4096);
  for (auto& v : noise) v = g(rng);
  double prev = 1e9;
  for (double sigma : {1e-5, 1e-4, 1e-3, 1e-2}) {
    std::vector<double> x(clean), y(clean);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += sigma * noise[i];
      y[i] = 7.0 * x[i];
    }
    const double a = sinad(x, 123.0 / 4096, 4096).sinad_db;
    const double b = sinad(y, 123.0 / 4096, 4096).sinad_db;
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
    CHECK(a < prev);
    prev = a;
  }
}

TEST_CASE("DC does not count against SINAD") {
  auto x = sine(4096, 0.5, 123, 4096);
  const double base = sinad(x, 123.0 / 4096, 4096).sinad_db;
  for (auto& v : x) v += 0.2;
  CHECK(sinad(x, 123.0 / 4096, 4096).sinad_db == doctest::Approx(base));
}

TEST_CASE("non-coherent tones need the windowed mode") {
  const double f = 100.37 / 4096.0;
  std::vector<double> x(4096);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.9 * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i));
  CHECK_THROWS_AS(sinad(x, f, 4096), CoherenceError);
  SinadOptions w;
  w.windowed = true;
  CHECK(sinad(x, f, 4096, w).sinad_db > 85.0);
}

TEST_CASE("length and frequency validation") {
  std::vector<double> x(100, 0.0);
  CHECK_THROWS_AS(power_spectrum(x, 128), ShapeError);
  CHECK_THROWS_AS(power_spectrum(x, 96), ConfigError);
  CHECK_THROWS_AS(sinad(x, 0.6, 64), ConfigError);
}

TEST_CASE("spur locations") {
  std::vector<double> mag(2049, -200.0);
  SUBCASE("two channels, low tone") {
    const double f = 77.0 / 4096;
    const auto spurs = spur_levels(mag, 2, f);
    REQUIRE(spurs.size() == 2);
    CHECK(spurs[0].kind == SpurKind::image);
    CHECK(spurs[0].bin == 2048 - 77);
    CHECK(spurs[0].freq_rel == doctest::Approx(0.5 - f));
    CHECK(spurs[1].kind == SpurKind::offset);
    CHECK(spurs[1].bin == 2048);
  }
  SUBCASE("two channels, high tone folds to a low image") {
    const double f = 1884.0 / 4096;
    const auto spurs = spur_levels(mag, 2, f);
    CHECK(spurs[0].bin == 2048 - 1884);
    CHECK(spurs[0].freq_rel == doctest::Approx(0.04).epsilon(0.01));
  }
  SUBCASE("five channels") {
    const double f = 77.0 / 4096;
    const auto spurs = spur_levels(mag, 5, f);
    std::vector<double> images, offsets;
    for (const auto& s : spurs) (s.kind == SpurKind::image ? images : offsets).push_back(s.freq_rel);
    REQUIRE(images.size() == 4);
    REQUIRE(offsets.size() == 2);
    std::vector<double> want{0.2 - f, 0.2 + f, 0.4 - f, 0.4 + f};
    for (std::size_t i = 0; i < 4; ++i) CHECK(images[i] == doctest::Approx(want[i]).epsilon(1e-3));
    CHECK(offsets[0] == doctest::Approx(0.2));
    CHECK(offsets[1] == doctest::Approx(0.4));
  }
  SUBCASE("image on top of the signal is flagged") {
    const auto spurs = spur_levels(mag, 2, 0.25);
    CHECK(spurs[0].collides_with_signal);
  }
}

TEST_CASE("two-channel gain mismatch shows up at the image bin") {
  TiadcConfig c;
  c.bits = 16;
  MismatchProfile p = MismatchProfile::zeros(2);
  p.gains = {0.0, 0.01};
  const double f = 77.0 / 4096;
  const auto cap = simulate_capture(ToneSpec{0.9, f, 0.1, 0.0}, c, p, 4096);
  const auto report = analyze_spectrum(dequantize_stream(cap.interleaved, c), f, 4096, 2);
  // Image amplitude A*dg/2 relative to full scale.
  CHECK(report.max_image_dbfs() == doctest::Approx(20.0 * std::log10(0.9 * 0.005)).epsilon(0.01));
  CHECK(report.magnitude_dbfs[2048 - 77] == report.max_image_dbfs());
}

TEST_CASE("tone frequency estimate") {
  for (double f : {0.019, 0.1234, 0.31, 0.46}) {
    std::vector<double> x(4096);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.1 + 0.8 * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) + 1.0);
    CHECK(estimate_tone_frequency(x) == doctest::Approx(f).epsilon(1e-3));
  }
}

TEST_CASE("spectrum CSV layout") {
  std::vector<double> mag{-10.0, -20.0, -30.0};
  std::stringstream ss;
  write_spectrum_csv(ss, mag, 4);
  CHECK(ss.str() == "bin_index,freq_rel,magnitude_dbfs\n0,0.0000000000,-10.000000\n1,0.2500000000,-20.000000\n"
                    "2,0.5000000000,-30.000000\n");
}
