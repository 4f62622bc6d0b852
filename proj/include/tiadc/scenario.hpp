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

// Experiment scenarios: built-in reference set-ups, a flat key/value config
// format, single runs and parameter sweeps.
//
// Config format: one `key = value` per line, `#` starts a comment, lists are
// comma separated. Keys:
//
//   name            free text
//   channels        M (>= 2)
//   fs              aggregate sample rate (default 1)
//   bits            quantizer word length
//   full_scale      amplitude of the largest code (default 1)
//   amplitude       tone amplitude
//   freq            nominal tone frequency, fraction of fs (snapped to a coherent bin)
//   phase           tone phase in radians (default: drawn from seed)
//   dc              tone dc level
//   offsets         M comma-separated offsets
//   gains           M comma-separated gain mismatches
//   skews           M comma-separated skews, units of Ts
//   taps            FIR taps N
//   coeff_bits      coefficient word length W
//   variant         sub | div
//   parallel        polyphase parallelism L (1 = serial)
//   block_len       polyphase task length
//   mode            truth | est
//   seed            integer
//   n_fft           FFT length for metrics (power of two)
//   estimation_block  samples per channel per background block
//   sweep_axis      coeff_bits | n_taps | gain | skew | freq
//   sweep_values    a:b, a:b:step, or a comma list

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tiadc/calib_filter.hpp"
#include "tiadc/estimator.hpp"
#include "tiadc/metrics.hpp"
#include "tiadc/polyphase.hpp"
#include "tiadc/tiadc_model.hpp"

namespace tiadc {

enum class CoeffMode { ground_truth, estimated };
enum class SweepAxis { coeff_bits, n_taps, gain, skew, freq };

const char* mode_name(CoeffMode mode);
CoeffMode parse_mode(const std::string& text);
const char* axis_name(SweepAxis axis);
SweepAxis parse_axis(const std::string& text);
std::vector<double> parse_values(const std::string& text);

struct Scenario {
  std::string name = "custom";
  TiadcConfig config;
  ToneSpec tone;                       // freq_rel is the nominal value
  std::optional<double> phase;         // fixed phase; otherwise drawn from seed
  MismatchProfile profile = MismatchProfile::zeros(2);
  FilterSpec spec;
  PolyphasePlan plan{1, 4096};
  CoeffMode mode = CoeffMode::ground_truth;
  std::uint64_t seed = 1;
  std::size_t n_fft = 4096;
  std::size_t estimation_block = 4096;
  std::optional<SweepAxis> sweep_axis;
  std::vector<double> sweep_values;

  void validate() const;
  /// Tone actually simulated: coherent frequency and seeded phase.
  ToneSpec resolved_tone() const;
  /// Samples per channel needed by run_scenario.
  std::size_t samples_per_channel() const;
};

/// Nearest J/n_fft with J odd and coprime to n_fft.
double coherent_frequency(double nominal_rel, std::size_t n_fft);

std::vector<std::string> builtin_scenario_names();
std::optional<Scenario> builtin_scenario(const std::string& name);
/// Built-in name, otherwise a config file path.
Scenario load_scenario(const std::string& name_or_path);
Scenario parse_scenario(const std::string& text, Scenario base = {});
std::string format_scenario(const Scenario& scenario);

struct ScenarioResult {
  std::string name;
  double tone_freq_rel = 0.0;
  double phase = 0.0;
  SpectrumReport before;
  SpectrumReport after;
  std::optional<MismatchEstimate> estimate;
  std::vector<std::filesystem::path> files;

  double max_spur_reduction_db() const { return before.max_spur_dbfs() - after.max_spur_dbfs(); }
  std::string summary_line() const;
};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  /// Calibrate with unquantized real taps instead of the Q2.(W-2) integers.
  bool real_coefficients = false;
};

ScenarioResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Uncalibrated and calibrated metrics over the same aligned span of a capture.
ScenarioResult evaluate_capture(const ChannelCapture& capture, const FilterBank& bank, double tone_freq_rel,
                                std::size_t n_fft, const std::optional<PolyphasePlan>& plan = std::nullopt);

struct SweepRow {
  double value = 0.0;
  double sinad_uncalibrated = 0.0;
  double sinad_calibrated = 0.0;
  double max_spur_uncalibrated = 0.0;
  double max_spur_calibrated = 0.0;
};

Scenario apply_axis(Scenario scenario, SweepAxis axis, double value);
std::vector<SweepRow> run_sweep(const Scenario& scenario, SweepAxis axis, const std::vector<double>& values);
void write_sweep_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows);

void write_spur_csv(std::ostream& out, const SpectrumReport& before, const SpectrumReport& after);
void write_estimate_csv(std::ostream& out, const MismatchEstimate& estimate);

}  // namespace tiadc
