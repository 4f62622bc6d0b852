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


#include "tiadc/estimator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "tiadc/metrics.hpp"

namespace tiadc {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Least squares on the columns [sin wn, cos wn, 1] and optionally the
// frequency-derivative column n*(a cos wn - b sin wn).
Eigen::VectorXd solve_columns(std::span<const double> y, double omega, const double* prev_ab) {
  const auto n = static_cast<Eigen::Index>(y.size());
  const Eigen::Index cols = prev_ab ? 4 : 3;
  Eigen::MatrixXd d(n, cols);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i);
    const double s = std::sin(omega * t);
    const double c = std::cos(omega * t);
    d(i, 0) = s;
    d(i, 1) = c;
    d(i, 2) = 1.0;
    if (prev_ab) d(i, 3) = t * (prev_ab[0] * c - prev_ab[1] * s);
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d);
  if (qr.rank() < cols) throw DegenerateFitError("sine fit normal equations are singular");
  return qr.solve(rhs);
}

SineFitResult make_result(std::span<const double> y, double omega, double a, double b, double c, int iterations) {
  SineFitResult r;
  r.amplitude = std::hypot(a, b);
  r.phase = std::atan2(b, a);
  if (r.phase <= -std::numbers::pi) r.phase += kTwoPi;
  r.dc = c;
  r.freq_rel = omega / kTwoPi;
  r.iterations = iterations;
  r.rms_residual = std::sqrt(residual_sum_squares(y, r) / static_cast<double>(y.size()));
  return r;
}

void check_input(std::span<const double> y, double freq) {
  if (y.size() < 16) throw ShapeError(fmt::format("sine fit needs >= 16 samples, got {}", y.size()));
  if (!(freq > 0.0 && freq < 0.5)) throw ConfigError(fmt::format("frequency {} outside (0, 0.5)", freq));
}

void check_amplitude(std::span<const double> y, double a, double b) {
  double scale = 0.0;
  for (const double v : y) scale = std::max(scale, std::abs(v));
  if (!(std::hypot(a, b) > 1e-12 * std::max(scale, 1e-300))) throw DegenerateFitError("no sinusoidal component in the data");
}

double fold_rel(double f) {
  f -= std::floor(f);
  return f > 0.5 ? 1.0 - f : f;
}

}  // namespace

double SineFitResult::value_at(double n) const {
  return amplitude * std::sin(kTwoPi * freq_rel * n + phase) + dc;
}

double residual_sum_squares(std::span<const double> samples, const SineFitResult& fit) {
  double acc = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double e = samples[i] - fit.value_at(static_cast<double>(i));
    acc += e * e;
  }
  return acc;
}

SineFitResult sine_fit_three_param(std::span<const double> samples, double freq_rel) {
  check_input(samples, freq_rel);
  const double omega = kTwoPi * freq_rel;
  const auto x = solve_columns(samples, omega, nullptr);
  check_amplitude(samples, x(0), x(1));
  return make_result(samples, omega, x(0), x(1), x(2), 0);
}

SineFitResult sine_fit_four_param(std::span<const double> samples, double freq_guess_rel,
                                  const SineFitOptions& options) {
  check_input(samples, freq_guess_rel);
  double omega = kTwoPi * freq_guess_rel;
  auto x = solve_columns(samples, omega, nullptr);
  check_amplitude(samples, x(0), x(1));
  double ab[2] = {x(0), x(1)};

  for (int it = 1; it <= options.max_iterations; ++it) {
    const auto step = solve_columns(samples, omega, ab);
    const double d_omega = step(3);
    omega += d_omega;
    if (!(omega > 0.0 && omega < std::numbers::pi)) {
      throw ConvergenceError("frequency iterate left (0, fs/2)", make_result(samples, omega - d_omega, ab[0], ab[1], step(2), it));
    }
    // Re-solve the linear part at the updated frequency.
    x = solve_columns(samples, omega, nullptr);
    check_amplitude(samples, x(0), x(1));
    ab[0] = x(0);
    ab[1] = x(1);
    if (std::abs(d_omega) <= options.rel_tolerance * omega) return make_result(samples, omega, x(0), x(1), x(2), it);
  }
  throw ConvergenceError(fmt::format("sine fit did not converge in {} iterations", options.max_iterations),
                         make_result(samples, omega, x(0), x(1), x(2), options.max_iterations));
}

MismatchEstimate derive_mismatches(std::span<const SineFitResult> fits, const TiadcConfig& config,
                                   double tone_freq_rel) {
  config.validate();
  const int channels = config.channels;
  if (fits.size() != static_cast<std::size_t>(channels)) {
    throw ConfigError(fmt::format("expected {} fits, got {}", channels, fits.size()));
  }
  if (!(tone_freq_rel > 0.0 && tone_freq_rel < 0.5)) throw ConfigError("tone frequency must lie in (0, 0.5)");

  // Position of the tone in each sub-ADC's band; above half the sub-rate it
  // folds and the fitted phase changes sign.
  const double sub = tone_freq_rel * channels - std::floor(tone_freq_rel * channels);
  if (sub == 0.0 || sub == 0.5) throw PhaseAmbiguityError("tone sits on a sub-ADC Nyquist boundary; phases are unobservable");
  const bool folded = sub > 0.5;

  MismatchEstimate est;
  est.fits.assign(fits.begin(), fits.end());
  est.tone_freq_rel = tone_freq_rel;
  est.offsets.assign(fits.size(), 0.0);
  est.gains.assign(fits.size(), 0.0);
  est.skews.assign(fits.size(), 0.0);

  auto aggregate_phase = [&](const SineFitResult& f) { return folded ? std::numbers::pi - f.phase : f.phase; };
  const SineFitResult& ref = fits[0];
  if (!(ref.amplitude > 0.0)) throw DegenerateFitError("reference channel has zero amplitude");
  const double phase0 = aggregate_phase(ref);
  const double period = 1.0 / tone_freq_rel;  // skew ambiguity period in Ts

  for (int m = 1; m < channels; ++m) {
    const auto& f = fits[static_cast<std::size_t>(m)];
    const auto idx = static_cast<std::size_t>(m);
    est.gains[idx] = f.amplitude / ref.amplitude - 1.0;
    est.offsets[idx] = f.dc - ref.dc;
    const double raw = (aggregate_phase(f) - phase0) / (kTwoPi * tone_freq_rel) - m;
    const double skew = raw - std::round(raw / period) * period;
    if (!(std::abs(skew) < 0.5)) {
      throw PhaseAmbiguityError(fmt::format("channel {} skew {:.4f} Ts is outside the unambiguous range", m, skew));
    }
    est.skews[idx] = skew;
  }
  return est;
}

MismatchEstimate estimate_mismatches(const std::vector<std::vector<double>>& per_channel, const TiadcConfig& config,
                                     const EstimatorOptions& options, std::size_t start) {
  config.validate();
  const auto channels = static_cast<std::size_t>(config.channels);
  if (per_channel.size() != channels) throw ConfigError("channel count does not match the configuration");
  for (const auto& ch : per_channel) {
    if (ch.size() < start + options.block_len) {
      throw ShapeError(fmt::format("estimation block [{}, {}) exceeds the {} available samples", start,
                                   start + options.block_len, ch.size()));
    }
  }
  auto block = [&](std::size_t m) {
    return std::span<const double>(per_channel[m]).subspan(start, options.block_len);
  };

  // Coarse aggregate frequency, unless the caller knows it.
  double coarse = 0.0;
  if (options.tone_freq_rel) {
    coarse = *options.tone_freq_rel;
  } else {
    std::vector<std::vector<double>> blocks;
    for (std::size_t m = 0; m < channels; ++m) blocks.emplace_back(block(m).begin(), block(m).end());
    coarse = estimate_tone_frequency(interleave_channels(blocks));
  }
  const double sub_guess = fold_rel(coarse * static_cast<double>(channels));
  if (!(sub_guess > 0.0 && sub_guess < 0.5)) throw PhaseAmbiguityError("tone sits on a sub-ADC Nyquist boundary");

  std::vector<SineFitResult> fits;
  double sub_sum = 0.0;
  for (std::size_t m = 0; m < channels; ++m) {
    fits.push_back(sine_fit_four_param(block(m), sub_guess, options.fit));
    sub_sum += fits.back().freq_rel;
  }

  double tone = coarse;
  if (!options.tone_freq_rel) {
    // Unfold the refined sub-rate frequency back to the aggregate band.
    const double sub = sub_sum / static_cast<double>(channels);
    const double base = std::floor(coarse * static_cast<double>(channels));
    double best = coarse;
    double best_err = 1e300;
    for (const double cand : {(base + sub), (base + 1.0 - sub), (base - sub), (base + 1.0 + sub)}) {
      const double f = cand / static_cast<double>(channels);
      if (f > 0.0 && f < 0.5 && std::abs(f - coarse) < best_err) {
        best_err = std::abs(f - coarse);
        best = f;
      }
    }
    tone = best;
  }
  return derive_mismatches(fits, config, tone);
}

MismatchEstimate estimate_mismatches(const ChannelCapture& capture, const EstimatorOptions& options,
                                     std::size_t start) {
  std::vector<std::vector<double>> per_channel;
  for (const auto& ch : capture.per_channel) per_channel.push_back(dequantize_stream(ch, capture.config));
  return estimate_mismatches(per_channel, capture.config, options, start);
}

}  // namespace tiadc
