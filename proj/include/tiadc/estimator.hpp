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

#include <optional>
#include <span>
#include <vector>

#include "tiadc/errors.hpp"
#include "tiadc/tiadc_model.hpp"

namespace tiadc {

/// y[n] = amplitude * sin(2*pi*freq_rel*n + phase) + dc, with freq_rel in
/// cycles per sample of the fitted sequence.
struct SineFitResult {
  double amplitude = 0.0;
  double freq_rel = 0.0;
  double phase = 0.0;  // (-pi, pi]
  double dc = 0.0;
  double rms_residual = 0.0;
  int iterations = 0;

  double value_at(double n) const;
};

class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, SineFitResult last) : NumericError(what), last_(last) {}
  const SineFitResult& last_iterate() const noexcept { return last_; }

 private:
  SineFitResult last_;
};

struct SineFitOptions {
  int max_iterations = 50;
  double rel_tolerance = 1e-12;
};

/// Linear least squares for amplitude, phase and dc at a fixed frequency.
SineFitResult sine_fit_three_param(std::span<const double> samples, double freq_rel);

/// Four-parameter least-squares sine fit (amplitude, phase, dc, frequency) by
/// Gauss-Newton iteration from `freq_guess_rel`, which must be within about
/// one DFT bin of the true frequency.
SineFitResult sine_fit_four_param(std::span<const double> samples, double freq_guess_rel,
                                  const SineFitOptions& options = {});

double residual_sum_squares(std::span<const double> samples, const SineFitResult& fit);

/// Mismatches of every channel relative to channel 0, which is ideal by definition.
struct MismatchEstimate {
  std::vector<SineFitResult> fits;
  std::vector<double> offsets;
  std::vector<double> gains;
  std::vector<double> skews;
  int reference_channel = 0;
  double tone_freq_rel = 0.0;

  MismatchProfile profile() const { return {offsets, gains, skews}; }
};

/// Maps per-channel fits to offset, gain and skew (units of Ts):
///   dg_m = A_m / A_0 - 1,  do_m = C_m - C_0,
///   dt_m = (phi_m - phi_0 + 2*pi*q) / (2*pi*f) - m  on the branch closest to 0.
/// Fits must come from the same tone; each channel sees it at f*M folded
/// into its own first Nyquist zone.
MismatchEstimate derive_mismatches(std::span<const SineFitResult> fits, const TiadcConfig& config,
                                   double tone_freq_rel);

struct EstimatorOptions {
  std::size_t block_len = 4096;                // samples per channel
  std::optional<double> tone_freq_rel;         // nominal aggregate frequency, if known
  SineFitOptions fit;
};

/// Estimate from samples [start, start + block_len) of every channel.
MismatchEstimate estimate_mismatches(const ChannelCapture& capture, const EstimatorOptions& options = {},
                                     std::size_t start = 0);
MismatchEstimate estimate_mismatches(const std::vector<std::vector<double>>& per_channel, const TiadcConfig& config,
                                     const EstimatorOptions& options = {}, std::size_t start = 0);

}  // namespace tiadc
