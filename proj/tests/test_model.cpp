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
#include <cstdint>
#include <numbers>
#include <vector>

#include "tiadc/errors.hpp"
#include "tiadc/tiadc_model.hpp"

using namespace tiadc;

namespace {

TiadcConfig two_channel(int bits = 12) {
  TiadcConfig c;
  c.channels = 2;
  c.bits = bits;
  return c;
}

}  // namespace

TEST_CASE("zero-mismatch channels sample the tone on the interleaved grid") {
  ToneSpec tone{1.0, 0.25, 0.0, 0.0};
  const auto ch = sample_channels(tone, two_channel(), MismatchProfile::zeros(2), 8);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(std::abs(ch[0][k]) < 1e-12);
    CHECK(ch[1][k] == doctest::Approx(k % 2 == 0 ? 1.0 : -1.0));
  }
}

TEST_CASE("offset-only profile with a silent input") {
  ToneSpec silent{0.0, 0.1, 0.0, 0.0};
  MismatchProfile p = MismatchProfile::zeros(2);
  p.offsets = {0.0, 0.1};
  const auto ch = sample_channels(silent, two_channel(), p, 16);
  for (std::size_t k = 0; k < 16; ++k) {
    CHECK(ch[0][k] == 0.0);
    CHECK(ch[1][k] == doctest::Approx(0.1));
  }
}

TEST_CASE("gain and skew follow the channel model") {
  ToneSpec tone{0.7, 0.013, 0.4, 0.02};
  MismatchProfile p = MismatchProfile::zeros(3);
  p.gains = {0.0, 0.03, -0.02};
  p.skews = {0.0, 0.05, -0.1};
  p.offsets = {0.0, -0.01, 0.004};
  TiadcConfig c = two_channel();
  c.channels = 3;
  const auto ch = sample_channels(tone, c, p, 50);
  for (std::size_t m = 0; m < 3; ++m) {
    for (std::size_t k = 0; k < 50; ++k) {
      const double t = static_cast<double>(3 * k + m) + p.skews[m];
      const double x = 0.02 + 0.7 * std::sin(2.0 * std::numbers::pi * 0.013 * t + 0.4);
      CHECK(ch[m][k] == doctest::Approx((1.0 + p.gains[m]) * x + p.offsets[m]).epsilon(1e-12));
    }
  }
}

TEST_CASE("mismatched profile length is a configuration error") {
  ToneSpec tone;
  CHECK_THROWS_AS(sample_channels(tone, two_channel(), MismatchProfile::zeros(3), 4), ConfigError);
}

TEST_CASE("quantizer examples") {
  const auto c = two_channel(12);
  CHECK(quantize_sample(0.0, c) == 0);
  CHECK(quantize_sample(1.0, c) == 2047);
  CHECK(quantize_sample(0.5, c) == 1024);
  CHECK(quantize_sample(-1.0, c) == -2048);
  CHECK(quantize_sample(-5.0, c) == -2048);
  // Ties round away from zero.
  CHECK(quantize_sample(0.5 / 2048.0, c) == 1);
  CHECK(quantize_sample(-0.5 / 2048.0, c) == -1);
}

TEST_CASE("quantization error is bounded by half an LSB inside the range") {
  const auto c = two_channel(10);
  for (int i = -1000; i <= 1000; ++i) {
    const double x = 0.99 * i / 1000.0;
    const double back = quantize_sample(x, c) * c.lsb();
    CHECK(std::abs(back - x) <= 0.5 * c.lsb() + 1e-15);
  }
}

TEST_CASE("interleave examples") {
  using V = std::vector<std::int32_t>;
  CHECK(interleave_channels<std::int32_t>({V{1, 3}, V{2, 4}}) == V{1, 2, 3, 4});
  CHECK(interleave_channels<std::int32_t>({V{7}, V{8}, V{9}}) == V{7, 8, 9});
  CHECK_THROWS_AS(interleave_channels<std::int32_t>({V{1, 3}, V{2}}), ShapeError);
}

TEST_CASE("deinterleave inverts interleave") {
  std::vector<std::int32_t> s(60);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<std::int32_t>(i * 7 % 13);
  for (int m : {2, 3, 4, 5}) {
    const auto split = deinterleave<std::int32_t>(s, m);
    CHECK(split.size() == static_cast<std::size_t>(m));
    CHECK(interleave_channels(split) == s);
  }
  CHECK_THROWS_AS(deinterleave<std::int32_t>(std::span<const std::int32_t>(s).first(7), 2), ShapeError);
}

TEST_CASE("ideal capture equals a zero-profile simulation bit for bit") {
  ToneSpec tone{0.9, 0.0187, 1.1, 0.0};
  TiadcConfig c = two_channel();
  c.channels = 4;
  const auto a = ideal_capture(tone, c, 4096);
  const auto b = simulate_capture(tone, c, MismatchProfile::zeros(4), 4096);
  CHECK(a.interleaved == b.interleaved);
  CHECK(a.per_channel == b.per_channel);
  CHECK(a.samples_per_channel() == 1024);
  CHECK_THROWS_AS(ideal_capture(tone, two_channel(), 7), ShapeError);
}

TEST_CASE("from_interleaved checks shape and code range") {
  const auto c = two_channel(4);
  CHECK_NOTHROW(ChannelCapture::from_interleaved(c, {-8, 7, 0, 1}, CaptureOrigin::file));
  CHECK_THROWS_AS(ChannelCapture::from_interleaved(c, {-8, 7, 0}, CaptureOrigin::file), ShapeError);
  CHECK_THROWS_AS(ChannelCapture::from_interleaved(c, {-9, 7}, CaptureOrigin::file), ShapeError);
}

TEST_CASE("configuration validation") {
  TiadcConfig c;
  c.channels = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.channels = 2;
  c.bits = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.bits = 12;
  ToneSpec t;
  t.freq_rel = 0.5;
  CHECK_THROWS_AS(t.validate(c), ConfigError);
  t.freq_rel = 0.1;
  t.amplitude = 1.2;
  CHECK_THROWS_AS(t.validate(c), ConfigError);
}
