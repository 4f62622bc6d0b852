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


#include "tiadc/tiadc_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tiadc/errors.hpp"

namespace tiadc {

double TiadcConfig::lsb() const { return full_scale / std::ldexp(1.0, bits - 1); }

void TiadcConfig::validate() const {
  if (channels < 2) throw ConfigError("channel count must be >= 2, got " + std::to_string(channels));
  if (bits < 2 || bits > 24) throw ConfigError("word length must be in 2..24, got " + std::to_string(bits));
  if (!(fs > 0.0) || !std::isfinite(fs)) throw ConfigError("sample rate must be positive");
  if (!(full_scale > 0.0) || !std::isfinite(full_scale)) throw ConfigError("full scale must be positive");
}

void ToneSpec::validate(const TiadcConfig& config) const {
  if (!(freq_rel > 0.0 && freq_rel < 0.5)) {
    throw ConfigError("tone frequency must lie in (0, 0.5) fs, got " + std::to_string(freq_rel));
  }
  if (!(amplitude >= 0.0)) throw ConfigError("tone amplitude must be non-negative");
  if (amplitude + std::abs(dc) > config.full_scale) throw ConfigError("tone exceeds full scale");
  if (!std::isfinite(phase)) throw ConfigError("tone phase must be finite");
}

double ToneSpec::value_at(double t_in_ts) const {
  // Reduce the cycle count before multiplying by 2*pi so long records keep
  // full phase precision.
  const double cycles = freq_rel * t_in_ts;
  const double frac = cycles - std::floor(cycles);
  return dc + amplitude * std::sin(2.0 * std::numbers::pi * frac + phase);
}

MismatchProfile MismatchProfile::zeros(int channels) {
  const auto n = static_cast<std::size_t>(std::max(channels, 0));
  return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

bool MismatchProfile::is_zero() const {
  auto zero = [](const std::vector<double>& v) { return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }); };
  return zero(offsets) && zero(gains) && zero(skews);
}

void MismatchProfile::validate(int channels) const {
  const auto n = static_cast<std::size_t>(channels);
  if (offsets.size() != n || gains.size() != n || skews.size() != n) {
    throw ConfigError("mismatch profile must have " + std::to_string(channels) + " entries per array");
  }
  for (std::size_t m = 0; m < n; ++m) {
    if (!(std::abs(gains[m]) < 0.5)) throw ConfigError("gain mismatch outside |dg| < 0.5 on channel " + std::to_string(m));
    if (!(std::abs(skews[m]) < 0.5)) throw ConfigError("skew mismatch outside |dt| < 0.5 on channel " + std::to_string(m));
    if (!std::isfinite(offsets[m])) throw ConfigError("offset must be finite on channel " + std::to_string(m));
  }
}

ChannelCapture ChannelCapture::from_interleaved(const TiadcConfig& config, std::vector<std::int32_t> codes,
                                                CaptureOrigin origin) {
  config.validate();
  const auto m = static_cast<std::size_t>(config.channels);
  if (codes.size() % m != 0) {
    throw ShapeError("interleaved length " + std::to_string(codes.size()) + " is not a multiple of M=" +
                     std::to_string(m));
  }
  for (const auto c : codes) {
    if (c < config.code_min() || c > config.code_max()) {
      throw ShapeError("code " + std::to_string(c) + " outside the " + std::to_string(config.bits) + "-bit range");
    }
  }
  ChannelCapture capture;
  capture.config = config;
  capture.per_channel = deinterleave<std::int32_t>(codes, config.channels);
  capture.interleaved = std::move(codes);
  capture.origin = origin;
  return capture;
}

std::vector<std::vector<double>> sample_channels(const ToneSpec& tone, const TiadcConfig& config,
                                                 const MismatchProfile& profile, std::size_t n_per_channel) {
  config.validate();
  profile.validate(config.channels);
  if (n_per_channel < 1) throw ShapeError("need at least one sample per channel");

  const auto channels = static_cast<std::size_t>(config.channels);
  std::vector<std::vector<double>> out(channels, std::vector<double>(n_per_channel));
  for (std::size_t m = 0; m < channels; ++m) {
    const double gain = 1.0 + profile.gains[m];
    for (std::size_t k = 0; k < n_per_channel; ++k) {
      // Integer grid position plus skew; the integer part is exact in double
      // for any realistic record length.
      const double grid = static_cast<double>(k * channels + m);
      out[m][k] = gain * tone.value_at(grid + profile.skews[m]) + profile.offsets[m];
    }
  }
  return out;
}

std::int32_t quantize_sample(double sample, const TiadcConfig& config) {
  const double scaled = std::round(sample / config.full_scale * std::ldexp(1.0, config.bits - 1));
  if (std::isnan(scaled)) return 0;
  const double clamped = std::clamp(scaled, static_cast<double>(config.code_min()), static_cast<double>(config.code_max()));
  return static_cast<std::int32_t>(clamped);
}

std::vector<std::int32_t> quantize_stream(std::span<const double> samples, const TiadcConfig& config) {
  std::vector<std::int32_t> codes(samples.size());
  std::transform(samples.begin(), samples.end(), codes.begin(),
                 [&](double s) { return quantize_sample(s, config); });
  return codes;
}

std::vector<double> dequantize_stream(std::span<const std::int32_t> codes, const TiadcConfig& config) {
  const double step = config.lsb();
  std::vector<double> out(codes.size());
  std::transform(codes.begin(), codes.end(), out.begin(), [step](std::int32_t c) { return c * step; });
  return out;
}

template <class T>
std::vector<T> interleave_channels(const std::vector<std::vector<T>>& per_channel) {
  if (per_channel.empty()) return {};
  const std::size_t k_len = per_channel.front().size();
  for (const auto& ch : per_channel) {
    if (ch.size() != k_len) throw ShapeError("ragged channel lengths cannot be interleaved");
  }
  const std::size_t m_count = per_channel.size();
  std::vector<T> out(m_count * k_len);
  for (std::size_t m = 0; m < m_count; ++m) {
    for (std::size_t k = 0; k < k_len; ++k) out[k * m_count + m] = per_channel[m][k];
  }
  return out;
}

template <class T>
std::vector<std::vector<T>> deinterleave(std::span<const T> stream, int channels) {
  if (channels < 1) throw ConfigError("channel count must be positive");
  const auto m_count = static_cast<std::size_t>(channels);
  if (stream.size() % m_count != 0) throw ShapeError("stream length is not a multiple of the channel count");
  const std::size_t k_len = stream.size() / m_count;
  std::vector<std::vector<T>> out(m_count, std::vector<T>(k_len));
  for (std::size_t k = 0; k < k_len; ++k) {
    for (std::size_t m = 0; m < m_count; ++m) out[m][k] = stream[k * m_count + m];
  }
  return out;
}

template std::vector<std::int32_t> interleave_channels(const std::vector<std::vector<std::int32_t>>&);
template std::vector<double> interleave_channels(const std::vector<std::vector<double>>&);
template std::vector<std::vector<std::int32_t>> deinterleave(std::span<const std::int32_t>, int);
template std::vector<std::vector<double>> deinterleave(std::span<const double>, int);

ChannelCapture simulate_capture(const ToneSpec& tone, const TiadcConfig& config, const MismatchProfile& profile,
                                std::size_t n_total) {
  config.validate();
  const auto m_count = static_cast<std::size_t>(config.channels);
  if (n_total == 0 || n_total % m_count != 0) {
    throw ShapeError("total sample count " + std::to_string(n_total) + " is not a positive multiple of M=" +
                     std::to_string(m_count));
  }
  const auto analog = sample_channels(tone, config, profile, n_total / m_count);

  ChannelCapture capture;
  capture.config = config;
  capture.origin = CaptureOrigin::simulated;
  capture.per_channel.reserve(m_count);
  for (const auto& ch : analog) capture.per_channel.push_back(quantize_stream(ch, config));
  capture.interleaved = interleave_channels(capture.per_channel);
  return capture;
}

ChannelCapture ideal_capture(const ToneSpec& tone, const TiadcConfig& config, std::size_t n_total) {
  return simulate_capture(tone, config, MismatchProfile::zeros(config.channels), n_total);
}

}  // namespace tiadc
