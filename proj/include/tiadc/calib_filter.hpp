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

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tiadc/polyphase.hpp"
#include "tiadc/tiadc_model.hpp"

namespace tiadc {

/// How the gain part of the centre tap is formed: 1 - dg or 1 / (1 + dg).
enum class GainVariant { subtract, divide };

const char* variant_name(GainVariant v);
GainVariant parse_variant(const std::string& text);

/// Tap count, coefficient word length and gain variant. Taps cover the
/// index range [first_index(), last_index()] around the centre tap n = 0.
struct FilterSpec {
  int n_taps = 30;
  int coeff_bits = 30;
  GainVariant variant = GainVariant::subtract;

  int first_index() const { return -((n_taps + 1) / 2) + 1; }
  int last_index() const { return n_taps / 2; }
  /// Sub-channel samples of delay that make the two-sided filter causal.
  int group_delay() const { return (n_taps + 1) / 2 - 1; }
  /// Fractional bits of the Q2.(W-2) coefficient format.
  int frac_bits() const { return coeff_bits - 2; }
  void validate() const;
};

/// First-order correction taps for one channel, index i <-> n = first_index() + i:
///   w[0] = 1 - dg (or 1/(1+dg)),  w[n] = (-1)^(n+1) / n * dt / M  for n != 0.
/// The timing part is kept odd: for even N the outermost tap n = N/2, whose
/// mirror -N/2 is outside the range, is zero.
std::vector<double> design_taps(double gain, double skew, int channels, const FilterSpec& spec);

/// round(tap * 2^(W-2)), half away from zero. Throws CoefficientOverflowError
/// for |tap| >= 2.
std::vector<std::int32_t> quantize_taps(std::span<const double> taps, int coeff_bits);
std::vector<double> dequantize_taps(std::span<const std::int32_t> taps, int coeff_bits);

/// sum_n w[n] exp(-j omega n) with n running from first_index.
std::complex<double> filter_frequency_response(std::span<const double> taps, int first_index, double omega);

/// The ideal first-order response (1 - dg) - j omega dt / M for |omega| < pi.
std::complex<double> ideal_correction_response(double gain, double skew, int channels, double omega);

/// Per-channel calibration filters plus the offsets to remove first.
struct FilterBank {
  FilterSpec spec;
  std::vector<std::vector<double>> real_taps;
  std::vector<std::vector<std::int32_t>> fixed_taps;
  std::vector<double> offsets;

  int channels() const { return static_cast<int>(real_taps.size()); }
  int group_delay() const { return spec.group_delay(); }

  static FilterBank design(const MismatchProfile& profile, int channels, const FilterSpec& spec);
  static FilterBank identity(int channels, const FilterSpec& spec);
};

/// Coefficient table: channel,tap_index,real_value,fixed_point_integer,W,format
void write_coefficient_csv(std::ostream& out, const FilterBank& bank);
/// Reads a table written by write_coefficient_csv. Offsets are not part of the
/// table and come back as zero.
FilterBank read_coefficient_csv(std::istream& in, GainVariant variant = GainVariant::subtract);

/// Calibrated output of one channel. samples[k] estimates the ideal sample
/// k - delay; entries k < transient used incomplete history.
struct CalibratedStream {
  std::vector<double> samples;
  int delay = 0;
  int transient = 0;
};

/// Offset subtraction in codes, exact integer FIR with the Q2.(W-2) taps, then
/// one scaling back to amplitude units. `plan` selects the polyphase engine.
CalibratedStream calibrate_channel(std::span<const std::int32_t> stream, std::span<const std::int32_t> taps_fx,
                                   double offset, const FilterSpec& spec, const TiadcConfig& config,
                                   const std::optional<PolyphasePlan>& plan = std::nullopt);

/// Same signal path with double-precision taps on unquantized samples.
CalibratedStream calibrate_channel_real(std::span<const double> stream, std::span<const double> taps, double offset,
                                        const FilterSpec& spec);

/// Re-interleaved calibrated output with the filter transient trimmed.
/// samples[k*M + m] estimates ideal aggregate sample (k + first_index)*M + m.
struct CalibratedCapture {
  std::vector<double> samples;
  std::size_t first_index = 0;
};

CalibratedCapture calibrate_capture(const ChannelCapture& capture, const FilterBank& bank,
                                    const std::optional<PolyphasePlan>& plan = std::nullopt);

/// Unquantized variant: per-channel real samples, real taps.
CalibratedCapture calibrate_real(const std::vector<std::vector<double>>& per_channel, const FilterBank& bank);

/// Aligns an uncalibrated stream to a CalibratedCapture, for like-for-like metrics.
std::vector<double> trim_like(std::span<const double> interleaved, const CalibratedCapture& ref, int channels);

}  // namespace tiadc
