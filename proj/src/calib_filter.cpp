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


#include "tiadc/calib_filter.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "tiadc/errors.hpp"
#include "tiadc/kernels.hpp"

namespace tiadc {

const char* variant_name(GainVariant v) { return v == GainVariant::subtract ? "sub" : "div"; }

GainVariant parse_variant(const std::string& text) {
  if (text == "sub" || text == "subtract") return GainVariant::subtract;
  if (text == "div" || text == "divide") return GainVariant::divide;
  throw ConfigError("unknown gain variant '" + text + "' (expected sub or div)");
}

void FilterSpec::validate() const {
  if (n_taps < 1) throw ConfigError("tap count must be >= 1, got " + std::to_string(n_taps));
  if (coeff_bits < 8 || coeff_bits > 32) {
    throw ConfigError("coefficient word length must be in 8..32, got " + std::to_string(coeff_bits));
  }
}

std::vector<double> design_taps(double gain, double skew, int channels, const FilterSpec& spec) {
  spec.validate();
  if (channels < 2) throw ConfigError("channel count must be >= 2");
  if (spec.variant == GainVariant::divide && gain == -1.0) throw NumericError("1/(1+dg) undefined for dg = -1");
  if (!(std::abs(gain) < 0.5)) throw ConfigError("gain mismatch outside |dg| < 0.5");
  if (!(std::abs(skew) < 0.5)) throw ConfigError("skew mismatch outside |dt| < 0.5");

  const int lo = spec.first_index();
  const int hi = spec.last_index();
  const double slope = skew / channels;
  std::vector<double> taps(static_cast<std::size_t>(spec.n_taps), 0.0);
  for (int n = lo; n <= hi; ++n) {
    double w = 0.0;
    if (n == 0) {
      w = spec.variant == GainVariant::subtract ? 1.0 - gain : 1.0 / (1.0 + gain);
    } else if (-n >= lo) {
      const double sign = (n % 2 == 0) ? -1.0 : 1.0;  // (-1)^(n+1)
      w = sign / n * slope;
    }
    taps[static_cast<std::size_t>(n - lo)] = w;
  }
  return taps;
}

std::vector<std::int32_t> quantize_taps(std::span<const double> taps, int coeff_bits) {
  if (coeff_bits < 8 || coeff_bits > 32) throw ConfigError("coefficient word length must be in 8..32");
  const double scale = std::ldexp(1.0, coeff_bits - 2);
  const double lo = -std::ldexp(1.0, coeff_bits - 1);
  const double hi = std::ldexp(1.0, coeff_bits - 1) - 1.0;
  std::vector<std::int32_t> out(taps.size());
  for (std::size_t i = 0; i < taps.size(); ++i) {
    if (!(std::abs(taps[i]) < 2.0)) {
      throw CoefficientOverflowError(fmt::format("tap {} = {} does not fit Q2.{}", i, taps[i], coeff_bits - 2));
    }
    const double q = std::round(taps[i] * scale);
    if (q < lo || q > hi) {
      throw CoefficientOverflowError(fmt::format("tap {} = {} rounds outside Q2.{}", i, taps[i], coeff_bits - 2));
    }
    out[i] = static_cast<std::int32_t>(q);
  }
  return out;
}

std::vector<double> dequantize_taps(std::span<const std::int32_t> taps, int coeff_bits) {
  const double scale = std::ldexp(1.0, -(coeff_bits - 2));
  std::vector<double> out(taps.size());
  std::transform(taps.begin(), taps.end(), out.begin(), [scale](std::int32_t t) { return t * scale; });
  return out;
}

std::complex<double> filter_frequency_response(std::span<const double> taps, int first_index, double omega) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < taps.size(); ++i) {
    const double n = static_cast<double>(first_index) + static_cast<double>(i);
    acc += taps[i] * std::polar(1.0, -omega * n);
  }
  return acc;
}

std::complex<double> ideal_correction_response(double gain, double skew, int channels, double omega) {
  return {1.0 - gain, -omega * skew / channels};
}

FilterBank FilterBank::design(const MismatchProfile& profile, int channels, const FilterSpec& spec) {
  spec.validate();
  profile.validate(channels);
  FilterBank bank;
  bank.spec = spec;
  bank.offsets = profile.offsets;
  for (int m = 0; m < channels; ++m) {
    const auto idx = static_cast<std::size_t>(m);
    bank.real_taps.push_back(design_taps(profile.gains[idx], profile.skews[idx], channels, spec));
    bank.fixed_taps.push_back(quantize_taps(bank.real_taps.back(), spec.coeff_bits));
  }
  return bank;
}

FilterBank FilterBank::identity(int channels, const FilterSpec& spec) {
  return design(MismatchProfile::zeros(channels), channels, spec);
}

void write_coefficient_csv(std::ostream& out, const FilterBank& bank) {
  out << "channel,tap_index,real_value,fixed_point_integer,W,format\n";
  const int lo = bank.spec.first_index();
  const int w = bank.spec.coeff_bits;
  for (std::size_t m = 0; m < bank.real_taps.size(); ++m) {
    for (std::size_t i = 0; i < bank.real_taps[m].size(); ++i) {
      out << fmt::format("{},{},{:.17g},{},{},Q2.{}\n", m, lo + static_cast<int>(i), bank.real_taps[m][i],
                         bank.fixed_taps[m][i], w, w - 2);
    }
  }
}

FilterBank read_coefficient_csv(std::istream& in, GainVariant variant) {
  std::string line;
  std::uint64_t offset = 0;
  if (!std::getline(in, line) || line.rfind("channel,tap_index,real_value,fixed_point_integer,W,format", 0) != 0) {
    throw FormatError("coefficient table header missing", 0);
  }
  offset += line.size() + 1;

  // channel -> tap index -> (real, fixed)
  std::map<int, std::map<int, std::pair<double, std::int32_t>>> rows;
  int width = -1;
  while (std::getline(in, line)) {
    const std::uint64_t row_offset = offset;
    offset += line.size() + 1;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cells[6];
    for (auto& c : cells) {
      if (!std::getline(ss, c, ',')) throw FormatError("coefficient row has fewer than 6 columns", row_offset);
    }
    try {
      const int ch = std::stoi(cells[0]);
      const int n = std::stoi(cells[1]);
      const double real = std::stod(cells[2]);
      const long long fixed = std::stoll(cells[3]);
      const int w = std::stoi(cells[4]);
      if (width < 0) width = w;
      if (w != width) throw FormatError("mixed coefficient word lengths", row_offset);
      if (cells[5] != "Q2." + std::to_string(w - 2)) throw FormatError("format tag does not match W", row_offset);
      if (ch < 0) throw FormatError("negative channel index", row_offset);
      rows[ch][n] = {real, static_cast<std::int32_t>(fixed)};
    } catch (const std::logic_error&) {
      throw FormatError("unparseable coefficient row", row_offset);
    }
  }
  if (rows.empty()) throw FormatError("coefficient table has no rows", offset);

  FilterBank bank;
  bank.spec.coeff_bits = width;
  bank.spec.variant = variant;
  bank.spec.n_taps = static_cast<int>(rows.begin()->second.size());
  bank.spec.validate();
  const int lo = bank.spec.first_index();
  int expected_channel = 0;
  for (const auto& [ch, taps] : rows) {
    if (ch != expected_channel++) throw FormatError("channel indices are not contiguous from 0", offset);
    if (static_cast<int>(taps.size()) != bank.spec.n_taps) throw FormatError("channels have different tap counts", offset);
    std::vector<double> real;
    std::vector<std::int32_t> fixed;
    int n = lo;
    for (const auto& [idx, value] : taps) {
      if (idx != n++) throw FormatError("tap indices do not cover the expected range", offset);
      real.push_back(value.first);
      fixed.push_back(value.second);
    }
    bank.real_taps.push_back(std::move(real));
    bank.fixed_taps.push_back(std::move(fixed));
  }
  bank.offsets.assign(bank.real_taps.size(), 0.0);
  return bank;
}

namespace {

CalibratedStream finish(std::vector<double> samples, const FilterSpec& spec) {
  CalibratedStream out;
  out.samples = std::move(samples);
  out.delay = spec.group_delay();
  out.transient = spec.n_taps - 1;
  return out;
}

}  // namespace

CalibratedStream calibrate_channel(std::span<const std::int32_t> stream, std::span<const std::int32_t> taps_fx,
                                   double offset, const FilterSpec& spec, const TiadcConfig& config,
                                   const std::optional<PolyphasePlan>& plan) {
  spec.validate();
  config.validate();
  if (taps_fx.size() != static_cast<std::size_t>(spec.n_taps)) throw ShapeError("tap array does not match the filter spec");
  if (stream.size() < taps_fx.size()) {
    throw ShapeError(fmt::format("stream of {} samples is shorter than the {}-tap filter", stream.size(), taps_fx.size()));
  }

  const auto offset_code = static_cast<std::int64_t>(std::round(offset / config.lsb()));
  std::vector<std::int32_t> centred(stream.size());
  std::int64_t peak = 0;
  for (std::size_t k = 0; k < stream.size(); ++k) {
    const std::int64_t v = std::int64_t{stream[k]} - offset_code;
    if (v < INT32_MIN || v > INT32_MAX) throw NumericError("offset-corrected code leaves the int32 range");
    centred[k] = static_cast<std::int32_t>(v);
    peak = std::max(peak, v < 0 ? -v : v);
  }
  // Exact int64 accumulation needs max|code| * sum|tap| < 2^63.
  double tap_sum = 0.0;
  for (const auto t : taps_fx) tap_sum += std::abs(static_cast<double>(t));
  if (static_cast<double>(peak) * tap_sum >= std::ldexp(1.0, 63)) {
    throw ConfigError("coefficient word length and tap count could overflow the 64-bit accumulator");
  }

  const std::vector<std::int64_t> acc = plan ? polyphase_convolve(centred, taps_fx, *plan)
                                             : kernels::fir_causal(centred, taps_fx);
  const double scale = std::ldexp(1.0, -spec.frac_bits()) * config.lsb();
  std::vector<double> samples(acc.size());
  std::transform(acc.begin(), acc.end(), samples.begin(), [scale](std::int64_t a) { return static_cast<double>(a) * scale; });
  return finish(std::move(samples), spec);
}

CalibratedStream calibrate_channel_real(std::span<const double> stream, std::span<const double> taps, double offset,
                                        const FilterSpec& spec) {
  spec.validate();
  if (taps.size() != static_cast<std::size_t>(spec.n_taps)) throw ShapeError("tap array does not match the filter spec");
  if (stream.size() < taps.size()) throw ShapeError("stream is shorter than the filter");
  std::vector<double> centred(stream.begin(), stream.end());
  for (auto& v : centred) v -= offset;
  return finish(kernels::fir_causal(std::span<const double>(centred), taps), spec);
}

namespace {

CalibratedCapture interleave_valid(const std::vector<CalibratedStream>& streams, const FilterSpec& spec) {
  const auto skip = static_cast<std::size_t>(spec.n_taps - 1);
  std::vector<std::vector<double>> valid;
  valid.reserve(streams.size());
  for (const auto& s : streams) valid.emplace_back(s.samples.begin() + static_cast<std::ptrdiff_t>(skip), s.samples.end());
  CalibratedCapture out;
  out.samples = interleave_channels(valid);
  out.first_index = skip - static_cast<std::size_t>(spec.group_delay());
  return out;
}

void check_bank(const FilterBank& bank, int channels) {
  if (bank.channels() != channels) {
    throw ConfigError(fmt::format("filter bank has {} channels, capture has {}", bank.channels(), channels));
  }
  if (bank.offsets.size() != static_cast<std::size_t>(channels)) throw ConfigError("filter bank offsets do not match channels");
}

}  // namespace

CalibratedCapture calibrate_capture(const ChannelCapture& capture, const FilterBank& bank,
                                    const std::optional<PolyphasePlan>& plan) {
  check_bank(bank, capture.config.channels);
  std::vector<CalibratedStream> streams;
  for (int m = 0; m < capture.config.channels; ++m) {
    const auto idx = static_cast<std::size_t>(m);
    streams.push_back(calibrate_channel(capture.per_channel[idx], bank.fixed_taps[idx], bank.offsets[idx], bank.spec,
                                        capture.config, plan));
  }
  return interleave_valid(streams, bank.spec);
}

CalibratedCapture calibrate_real(const std::vector<std::vector<double>>& per_channel, const FilterBank& bank) {
  check_bank(bank, static_cast<int>(per_channel.size()));
  std::vector<CalibratedStream> streams;
  for (std::size_t m = 0; m < per_channel.size(); ++m) {
    streams.push_back(calibrate_channel_real(per_channel[m], bank.real_taps[m], bank.offsets[m], bank.spec));
  }
  return interleave_valid(streams, bank.spec);
}

std::vector<double> trim_like(std::span<const double> interleaved, const CalibratedCapture& ref, int channels) {
  const std::size_t begin = ref.first_index * static_cast<std::size_t>(channels);
  if (begin + ref.samples.size() > interleaved.size()) throw ShapeError("stream too short to align with calibrated output");
  return {interleaved.begin() + static_cast<std::ptrdiff_t>(begin),
          interleaved.begin() + static_cast<std::ptrdiff_t>(begin + ref.samples.size())};
}

}  // namespace tiadc
