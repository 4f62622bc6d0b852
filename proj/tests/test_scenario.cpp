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
#include <filesystem>
#include <numbers>
#include <numeric>
#include <sstream>

#include "tiadc/errors.hpp"
#include "tiadc/scenario.hpp"

using namespace tiadc;
namespace fs = std::filesystem;

TEST_CASE("coherent frequency picks the nearest odd bin coprime to the FFT length") {
  CHECK(coherent_frequency(0.019, 4096) == 77.0 / 4096);
  CHECK(coherent_frequency(0.46, 4096) == 1884.0 / 4096 + 1.0 / 4096);
  const double f = coherent_frequency(0.19, 4096);
  const auto j = static_cast<long long>(f * 4096);
  CHECK(j % 2 == 1);
  CHECK(std::gcd(j, 4096LL) == 1);
  CHECK(std::abs(f - 0.19) <= 1.0 / 4096);
}

TEST_CASE("value lists and ranges") {
  CHECK(parse_values("12:15") == std::vector<double>{12, 13, 14, 15});
  CHECK(parse_values("2:10:4") == std::vector<double>{2, 6, 10});
  CHECK(parse_values("0.1, 0.2,0.4") == std::vector<double>{0.1, 0.2, 0.4});
  CHECK_THROWS_AS(parse_values("5:1"), ConfigError);
  CHECK_THROWS_AS(parse_values("1:2:3:4"), ConfigError);
  CHECK_THROWS_AS(parse_values("a,b"), ConfigError);
}

TEST_CASE("config text parsing") {
  const auto s = parse_scenario(R"(# four channels
name = quad
channels = 4
bits = 14
freq = 0.1       # nominal
gains = 0, 0.01, -0.01, 0.002
skews = 0,0,0.01,0
offsets = 0,0,0,0.001
taps = 21
coeff_bits = 24
variant = div
parallel = 3
mode = est
seed = 99
)");
  CHECK(s.name == "quad");
  CHECK(s.config.channels == 4);
  CHECK(s.config.bits == 14);
  CHECK(s.tone.freq_rel == 0.1);
  CHECK(s.profile.gains == std::vector<double>{0, 0.01, -0.01, 0.002});
  CHECK(s.profile.offsets[3] == 0.001);
  CHECK(s.spec.n_taps == 21);
  CHECK(s.spec.coeff_bits == 24);
  CHECK(s.spec.variant == GainVariant::divide);
  CHECK(s.plan.parallelism == 3);
  CHECK(s.mode == CoeffMode::estimated);
  CHECK(s.seed == 99);
}

TEST_CASE("missing lists default to zeros for the channel count") {
  const auto s = parse_scenario("channels = 3\n");
  CHECK(s.profile.gains == std::vector<double>{0, 0, 0});
  CHECK(s.profile.is_zero());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_scenario("colour = blue\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("bits\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("bits = twelve\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("bits = 12.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("channels = 3\ngains = 0,0.01\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("amplitude = 0.999\ngains = 0,0.01\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("n_fft = 1000\n"), ConfigError);
  try {
    parse_scenario("bits = 12\n\nbogus = 1\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_scenario("/no/such/file.cfg"), ConfigError);
}

TEST_CASE("format and parse round trip for every built-in") {
  for (const auto& name : builtin_scenario_names()) {
    CAPTURE(name);
    auto s = load_scenario(name);
    s.phase = 0.25;
    const auto back = parse_scenario(format_scenario(s));
    CHECK(format_scenario(back) == format_scenario(s));
    CHECK(back.profile.gains == s.profile.gains);
    CHECK(back.profile.skews == s.profile.skews);
  }
}

TEST_CASE("phase is a deterministic function of the seed") {
  Scenario a = load_scenario("two_channel");
  Scenario b = a;
  CHECK(a.resolved_tone().phase == b.resolved_tone().phase);
  b.seed = 2;
  CHECK(a.resolved_tone().phase != b.resolved_tone().phase);
  CHECK(std::abs(a.resolved_tone().phase) <= std::numbers::pi);
}

TEST_CASE("two_channel default run") {
  const auto r = run_scenario(load_scenario("two_channel"));
  CHECK(r.tone_freq_rel == 77.0 / 4096);
  CHECK(std::abs(r.before.sinad_db - 45.0) <= 2.0);
  CHECK(r.after.sinad_db >= 66.0);
}

TEST_CASE("zero-mismatch run is a pure delay") {
  const auto r = run_scenario(load_scenario("zero"));
  CHECK(std::abs(r.after.sinad_db - r.before.sinad_db) <= 0.1);
}

TEST_CASE("estimated mode and parallel filtering") {
  Scenario s = load_scenario("two_channel");
  s.mode = CoeffMode::estimated;
  s.plan.parallelism = 4;
  const auto r = run_scenario(s);
  REQUIRE(r.estimate.has_value());
  CHECK(std::abs(r.estimate->gains[1] - 0.01) <= 5e-4);
  CHECK(r.after.sinad_db >= 66.0);
}

TEST_CASE("run writes its artefacts") {
  const auto dir = fs::temp_directory_path() / "tiadc_scenario_test";
  fs::remove_all(dir);
  RunOptions ro;
  ro.out_dir = dir;
  const auto r = run_scenario(load_scenario("two_channel"), ro);
  for (const char* f : {"spectrum_uncalibrated.csv", "spectrum_calibrated.csv", "spurs.csv", "coefficients.csv", "summary.txt"}) {
    CHECK(fs::exists(dir / f));
  }
  CHECK(r.files.size() == 5);
  fs::remove_all(dir);
}

TEST_CASE("sweep table") {
  const Scenario s = load_scenario("word_length");
  const auto rows = run_sweep(s, SweepAxis::coeff_bits, {16, 24});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].value == 16);
  CHECK(rows[0].sinad_uncalibrated == rows[1].sinad_uncalibrated);
  std::stringstream ss;
  write_sweep_csv(ss, SweepAxis::coeff_bits, rows);
  CHECK(ss.str().rfind("coeff_bits,sinad_uncalibrated_db,sinad_calibrated_db,max_spur_uncalibrated_dbfs,"
                       "max_spur_calibrated_dbfs\n16,", 0) == 0);
}

TEST_CASE("axis overrides") {
  const Scenario s = load_scenario("two_channel");
  CHECK(apply_axis(s, SweepAxis::gain, 0.05).profile.gains[1] == 0.05);
  CHECK(apply_axis(s, SweepAxis::skew, 0.05).profile.skews[1] == 0.05);
  CHECK(apply_axis(s, SweepAxis::n_taps, 14).spec.n_taps == 14);
  CHECK(apply_axis(s, SweepAxis::freq, 0.3).tone.freq_rel == 0.3);
  CHECK(parse_axis("n_taps") == SweepAxis::n_taps);
  CHECK_THROWS_AS(parse_axis("phase"), ConfigError);
}

TEST_CASE("arrays left out follow a changed channel count") {
  const auto s = parse_scenario("channels = 3\ngains = 0, 0.01, 0.02\n");
  CHECK(s.profile.offsets == std::vector<double>{0, 0, 0});
  CHECK(s.profile.skews == std::vector<double>{0, 0, 0});
  CHECK(s.profile.gains[2] == 0.02);
}
