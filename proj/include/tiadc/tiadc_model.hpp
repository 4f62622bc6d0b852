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

#include <cstdint>
#include <span>
#include <vector>

namespace tiadc {

/// Aggregate converter parameters. `channels` sub-ADCs run at fs/M each and
/// interleave to the aggregate rate `fs`.
struct TiadcConfig {
  int channels = 2;
  double fs = 1.0;
  int bits = 12;
  double full_scale = 1.0;

  double sample_period() const { return 1.0 / fs; }
  std::int32_t code_min() const { return -(std::int32_t{1} << (bits - 1)); }
  std::int32_t code_max() const { return (std::int32_t{1} << (bits - 1)) - 1; }
  /// Amplitude of one code step.
  double lsb() const;
  void validate() const;
};

/// x(t) = dc + amplitude * sin(2*pi*freq_rel*fs*t + phase).
struct ToneSpec {
  double amplitude = 0.9;
  double freq_rel = 0.019;
  double phase = 0.0;
  double dc = 0.0;

  void validate(const TiadcConfig& config) const;
  /// Value at time t expressed in aggregate sample periods.
  double value_at(double t_in_ts) const;
};

/// Per-channel offset (full-scale units), relative gain error, and sampling
/// skew (units of Ts).
struct MismatchProfile {
  std::vector<double> offsets;
  std::vector<double> gains;
  std::vector<double> skews;

  static MismatchProfile zeros(int channels);
  int channels() const { return static_cast<int>(gains.size()); }
  bool is_zero() const;
  void validate(int channels) const;
};

enum class CaptureOrigin { simulated, file };

/// Quantized per-channel streams together with the interleaved output.
/// interleaved[k*M + m] == per_channel[m][k].
struct ChannelCapture {
  TiadcConfig config;
  std::vector<std::vector<std::int32_t>> per_channel;
  std::vector<std::int32_t> interleaved;
  CaptureOrigin origin = CaptureOrigin::simulated;

  static ChannelCapture from_interleaved(const TiadcConfig& config, std::vector<std::int32_t> codes,
                                         CaptureOrigin origin);
  std::size_t samples_per_channel() const { return per_channel.empty() ? 0 : per_channel.front().size(); }
};

/// Channel m, sample k: (1 + dg_m) * x((k*M + m + dt_m) * Ts) + do_m.
std::vector<std::vector<double>> sample_channels(const ToneSpec& tone, const TiadcConfig& config,
                                                 const MismatchProfile& profile, std::size_t n_per_channel);

/// Mid-rise saturating quantizer, round half away from zero.
std::int32_t quantize_sample(double sample, const TiadcConfig& config);
std::vector<std::int32_t> quantize_stream(std::span<const double> samples, const TiadcConfig& config);

/// Inverse scaling of quantize_sample.
std::vector<double> dequantize_stream(std::span<const std::int32_t> codes, const TiadcConfig& config);

template <class T>
std::vector<T> interleave_channels(const std::vector<std::vector<T>>& per_channel);
template <class T>
std::vector<std::vector<T>> deinterleave(std::span<const T> stream, int channels);

ChannelCapture simulate_capture(const ToneSpec& tone, const TiadcConfig& config, const MismatchProfile& profile,
                                std::size_t n_total);
ChannelCapture ideal_capture(const ToneSpec& tone, const TiadcConfig& config, std::size_t n_total);

}  // namespace tiadc
