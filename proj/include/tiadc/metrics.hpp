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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tiadc {

enum class SpurKind { image, offset };

struct Spur {
  SpurKind kind = SpurKind::image;
  double freq_rel = 0.0;  // folded into [0, 0.5]
  std::size_t bin = 0;
  double level_dbfs = 0.0;
  bool collides_with_signal = false;
};

struct SpectrumReport {
  std::size_t n_fft = 0;
  std::vector<double> magnitude_dbfs;
  std::size_t signal_bin = 0;
  double sinad_db = 0.0;
  double enob = 0.0;
  std::vector<Spur> spurs;

  /// Highest spur level, ignoring entries that collide with the signal.
  double max_spur_dbfs() const;
  /// Highest image-spur level.
  double max_image_dbfs() const;
};

struct SinadOptions {
  /// Four-term Blackman-Harris window; the +/-4 bins around the tone (the
  /// window main lobe) count as signal. Removes the coherence requirement.
  bool windowed = false;
  double full_scale = 1.0;
};

inline constexpr double kFloorDbfs = -300.0;

/// One-sided power per bin of the first n_fft samples (rectangular window),
/// scaled so the bins sum to sum(x^2) over those samples.
std::vector<double> power_bins(std::span<const double> stream, std::size_t n_fft);

/// Rectangular-window magnitude spectrum in dBFS; a full-scale coherent sine
/// peaks at 0 dBFS. Empty bins are floored at kFloorDbfs.
std::vector<double> power_spectrum(std::span<const double> stream, std::size_t n_fft, double full_scale = 1.0);

struct SinadResult {
  double sinad_db = 0.0;
  double enob = 0.0;
  std::size_t signal_bin = 0;
};

/// Signal-bin power over all other non-DC power.
SinadResult sinad(std::span<const double> stream, double signal_freq_rel, std::size_t n_fft,
                  const SinadOptions& options = {});

inline double enob_from_sinad(double sinad_db) { return (sinad_db - 1.76) / 6.02; }

/// Expected mismatch spurs k*fs/M +/- f (images) and k*fs/M (offsets),
/// k = 1..M-1, folded into the first Nyquist zone and de-duplicated.
std::vector<Spur> spur_levels(std::span<const double> magnitude_dbfs, int channels, double signal_freq_rel);

SpectrumReport analyze_spectrum(std::span<const double> stream, double signal_freq_rel, std::size_t n_fft,
                                int channels, const SinadOptions& options = {});

/// bin_index,freq_rel,magnitude_dbfs
void write_spectrum_csv(std::ostream& out, std::span<const double> magnitude_dbfs, std::size_t n_fft);

/// Frequency (fraction of the stream's rate) of the strongest non-DC
/// component, from a windowed spectrum with parabolic peak interpolation.
double estimate_tone_frequency(std::span<const double> stream);

bool is_power_of_two(std::size_t n);

}  // namespace tiadc
