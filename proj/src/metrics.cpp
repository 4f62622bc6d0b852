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


#include "tiadc/metrics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "tiadc/errors.hpp"

namespace tiadc {
namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex g_plan_mutex;

std::vector<std::complex<double>> real_fft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(g_plan_mutex);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(g_plan_mutex);
    fftw_destroy_plan(plan);
  }
  return out;
}

double to_db(double power_ratio) {
  if (!(power_ratio > 0.0)) return kFloorDbfs;
  return std::max(10.0 * std::log10(power_ratio), kFloorDbfs);
}

void check_length(std::span<const double> stream, std::size_t n_fft) {
  if (n_fft < 4 || !is_power_of_two(n_fft)) throw ConfigError(fmt::format("n_fft {} is not a power of two >= 4", n_fft));
  if (stream.size() < n_fft) throw ShapeError(fmt::format("stream of {} samples is shorter than n_fft {}", stream.size(), n_fft));
}

std::vector<double> blackman_harris(std::size_t n) {
  constexpr double a0 = 0.35875, a1 = 0.48829, a2 = 0.14128, a3 = 0.01168;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    w[i] = a0 - a1 * std::cos(t) + a2 * std::cos(2 * t) - a3 * std::cos(3 * t);
  }
  return w;
}

double fold(double f) {
  f -= std::floor(f);
  return f > 0.5 ? 1.0 - f : f;
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double SpectrumReport::max_spur_dbfs() const {
  double best = kFloorDbfs;
  for (const auto& s : spurs) {
    if (!s.collides_with_signal) best = std::max(best, s.level_dbfs);
  }
  return best;
}

double SpectrumReport::max_image_dbfs() const {
  double best = kFloorDbfs;
  for (const auto& s : spurs) {
    if (s.kind == SpurKind::image && !s.collides_with_signal) best = std::max(best, s.level_dbfs);
  }
  return best;
}

std::vector<double> power_bins(std::span<const double> stream, std::size_t n_fft) {
  check_length(stream, n_fft);
  const auto spec = real_fft(stream.first(n_fft));
  const double n = static_cast<double>(n_fft);
  std::vector<double> p(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double edge = (k == 0 || k == n_fft / 2) ? 1.0 : 2.0;
    p[k] = edge * std::norm(spec[k]) / n;
  }
  return p;
}

std::vector<double> power_spectrum(std::span<const double> stream, std::size_t n_fft, double full_scale) {
  check_length(stream, n_fft);
  const auto spec = real_fft(stream.first(n_fft));
  // A sine of amplitude A puts |X| = A*n/2 in its bin.
  const double ref = full_scale * static_cast<double>(n_fft) / 2.0;
  std::vector<double> mag(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) mag[k] = to_db(std::norm(spec[k]) / (ref * ref));
  return mag;
}

SinadResult sinad(std::span<const double> stream, double signal_freq_rel, std::size_t n_fft,
                  const SinadOptions& options) {
  check_length(stream, n_fft);
  if (!(signal_freq_rel > 0.0 && signal_freq_rel < 0.5)) throw ConfigError("signal frequency must lie in (0, 0.5)");
  const double exact_bin = signal_freq_rel * static_cast<double>(n_fft);
  const auto bin = static_cast<std::size_t>(std::llround(exact_bin));

  SinadResult result;
  result.signal_bin = bin;
  double signal = 0.0;
  double noise = 0.0;
  if (!options.windowed) {
    if (std::abs(exact_bin - static_cast<double>(bin)) > 1e-6) {
      throw CoherenceError(fmt::format("tone at {} fs falls between bins ({:.6f}); window or re-plan the capture",
                                       signal_freq_rel, exact_bin));
    }
    const auto p = power_bins(stream, n_fft);
    for (std::size_t k = 1; k < p.size(); ++k) (k == bin ? signal : noise) += p[k];
  } else {
    const auto w = blackman_harris(n_fft);
    std::vector<double> x(n_fft);
    for (std::size_t i = 0; i < n_fft; ++i) x[i] = stream[i] * w[i];
    const auto p = power_bins(x, n_fft);
    constexpr std::size_t kLeak = 4;
    for (std::size_t k = kLeak + 1; k < p.size(); ++k) {
      const std::size_t dist = k > bin ? k - bin : bin - k;
      (dist <= kLeak ? signal : noise) += p[k];
    }
  }
  if (!(noise > 0.0)) {
    result.sinad_db = std::numeric_limits<double>::infinity();
  } else if (!(signal > 0.0)) {
    result.sinad_db = -std::numeric_limits<double>::infinity();
  } else {
    result.sinad_db = 10.0 * std::log10(signal / noise);
  }
  result.enob = enob_from_sinad(result.sinad_db);
  return result;
}

std::vector<Spur> spur_levels(std::span<const double> magnitude_dbfs, int channels, double signal_freq_rel) {
  if (channels < 2) throw ConfigError("spur table needs M >= 2");
  if (magnitude_dbfs.size() < 3) throw ShapeError("spectrum too short");
  const std::size_t n_fft = (magnitude_dbfs.size() - 1) * 2;
  const auto signal_bin = static_cast<std::size_t>(std::llround(fold(signal_freq_rel) * static_cast<double>(n_fft)));

  std::vector<Spur> spurs;
  auto add = [&](SpurKind kind, double f) {
    const double folded = fold(f);
    const auto bin = static_cast<std::size_t>(std::llround(folded * static_cast<double>(n_fft)));
    for (const auto& s : spurs) {
      if (s.kind == kind && s.bin == bin) return;
    }
    Spur s;
    s.kind = kind;
    s.freq_rel = folded;
    s.bin = bin;
    s.level_dbfs = magnitude_dbfs[bin];
    s.collides_with_signal = bin == signal_bin;
    spurs.push_back(s);
  };
  for (int k = 1; k < channels; ++k) {
    const double centre = static_cast<double>(k) / channels;
    add(SpurKind::image, centre - signal_freq_rel);
    add(SpurKind::image, centre + signal_freq_rel);
  }
  for (int k = 1; k < channels; ++k) add(SpurKind::offset, static_cast<double>(k) / channels);
  std::stable_sort(spurs.begin(), spurs.end(), [](const Spur& a, const Spur& b) {
    return a.kind != b.kind ? a.kind == SpurKind::image : a.bin < b.bin;
  });
  return spurs;
}

SpectrumReport analyze_spectrum(std::span<const double> stream, double signal_freq_rel, std::size_t n_fft,
                                int channels, const SinadOptions& options) {
  SpectrumReport report;
  report.n_fft = n_fft;
  report.magnitude_dbfs = power_spectrum(stream, n_fft, options.full_scale);
  const auto s = sinad(stream, signal_freq_rel, n_fft, options);
  report.signal_bin = s.signal_bin;
  report.sinad_db = s.sinad_db;
  report.enob = s.enob;
  report.spurs = spur_levels(report.magnitude_dbfs, channels, signal_freq_rel);
  return report;
}

void write_spectrum_csv(std::ostream& out, std::span<const double> magnitude_dbfs, std::size_t n_fft) {
  out << "bin_index,freq_rel,magnitude_dbfs\n";
  for (std::size_t k = 0; k < magnitude_dbfs.size(); ++k) {
    out << fmt::format("{},{:.10f},{:.6f}\n", k, static_cast<double>(k) / static_cast<double>(n_fft), magnitude_dbfs[k]);
  }
}

double estimate_tone_frequency(std::span<const double> stream) {
  const std::size_t n = stream.size();
  if (n < 16) throw ShapeError("need at least 16 samples to locate a tone");
  const auto w = blackman_harris(n);
  double mean = 0.0;
  for (const double v : stream) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = (stream[i] - mean) * w[i];
  const auto spec = real_fft(x);

  std::size_t peak = 1;
  double best = -1.0;
  // Skip DC and the window's main lobe around it.
  for (std::size_t k = 3; k + 1 < spec.size(); ++k) {
    const double m = std::abs(spec[k]);
    if (m > best) {
      best = m;
      peak = k;
    }
  }
  if (!(best > 0.0)) throw DegenerateFitError("no tone found in the stream");
  const double a = std::log(std::abs(spec[peak - 1]) + 1e-300);
  const double b = std::log(std::abs(spec[peak]) + 1e-300);
  const double c = std::log(std::abs(spec[peak + 1]) + 1e-300);
  const double denom = a - 2.0 * b + c;
  const double delta = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
  return (static_cast<double>(peak) + std::clamp(delta, -0.5, 0.5)) / static_cast<double>(n);
}

}  // namespace tiadc
