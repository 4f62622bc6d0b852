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


#include "tiadc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "tiadc/background.hpp"
#include "tiadc/errors.hpp"

namespace tiadc {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(fmt::format("key '{}': '{}' is not a number", key, text));
  }
}

long long to_int(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != std::floor(v)) throw ConfigError(fmt::format("key '{}': '{}' is not an integer", key, text));
  return static_cast<long long>(v);
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(to_double(key, trim(cell)));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += fmt::format("{}{:.17g}", i ? "," : "", v[i]);
  return out;
}

Scenario two_channel() {
  Scenario s;
  s.name = "two_channel";
  s.config = {2, 1.0, 12, 1.0};
  s.tone.freq_rel = 0.019;
  s.profile = {{0.0, 0.0}, {0.0, 0.01}, {0.0, 0.01}};
  s.spec = {30, 30, GainVariant::subtract};
  return s;
}

}  // namespace

const char* mode_name(CoeffMode mode) { return mode == CoeffMode::ground_truth ? "truth" : "est"; }

CoeffMode parse_mode(const std::string& text) {
  if (text == "truth" || text == "ground_truth") return CoeffMode::ground_truth;
  if (text == "est" || text == "estimated") return CoeffMode::estimated;
  throw ConfigError("unknown mode '" + text + "' (expected truth or est)");
}

const char* axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::coeff_bits: return "coeff_bits";
    case SweepAxis::n_taps: return "n_taps";
    case SweepAxis::gain: return "gain";
    case SweepAxis::skew: return "skew";
    case SweepAxis::freq: return "freq";
  }
  return "?";
}

SweepAxis parse_axis(const std::string& text) {
  for (const auto a : {SweepAxis::coeff_bits, SweepAxis::n_taps, SweepAxis::gain, SweepAxis::skew, SweepAxis::freq}) {
    if (text == axis_name(a)) return a;
  }
  throw ConfigError("unknown sweep axis '" + text + "'");
}

std::vector<double> parse_values(const std::string& text) {
  const std::string t = trim(text);
  if (t.find(':') == std::string::npos) {
    auto v = to_list("values", t);
    if (v.empty()) throw ConfigError("empty value list");
    return v;
  }
  std::vector<std::string> parts;
  std::stringstream ss(t);
  std::string cell;
  while (std::getline(ss, cell, ':')) parts.push_back(trim(cell));
  if (parts.size() < 2 || parts.size() > 3) throw ConfigError("range must be a:b or a:b:step");
  const double a = to_double("values", parts[0]);
  const double b = to_double("values", parts[1]);
  const double step = parts.size() == 3 ? to_double("values", parts[2]) : 1.0;
  if (!(step > 0.0) || b < a) throw ConfigError("range needs a <= b and a positive step");
  const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = a + static_cast<double>(i) * step;
  return out;
}

void Scenario::validate() const {
  config.validate();
  profile.validate(config.channels);
  spec.validate();
  plan.validate(static_cast<std::size_t>(spec.n_taps));
  if (!is_power_of_two(n_fft) || n_fft < 16) throw ConfigError(fmt::format("n_fft {} must be a power of two >= 16", n_fft));
  if (estimation_block < 16) throw ConfigError("estimation block must hold at least 16 samples");
  ToneSpec t = resolved_tone();
  t.validate(config);
  double peak_gain = 0.0;
  double peak_offset = 0.0;
  for (int m = 0; m < config.channels; ++m) {
    peak_gain = std::max(peak_gain, std::abs(profile.gains[static_cast<std::size_t>(m)]));
    peak_offset = std::max(peak_offset, std::abs(profile.offsets[static_cast<std::size_t>(m)]));
  }
  if ((1.0 + peak_gain) * (t.amplitude + std::abs(t.dc)) + peak_offset > config.full_scale) {
    throw ConfigError("tone plus mismatches would clip the quantizer; lower the amplitude");
  }
}

double coherent_frequency(double nominal_rel, std::size_t n_fft) {
  if (n_fft < 4) throw ConfigError("n_fft too small");
  const double target = nominal_rel * static_cast<double>(n_fft);
  const auto n = static_cast<long long>(n_fft);
  const auto lower = static_cast<long long>(std::floor(target));
  long long best = -1;
  double best_dist = 1e300;
  for (long long j = std::max(1LL, lower - 8); j <= lower + 9 && j < n / 2; ++j) {
    if (j % 2 == 0 || std::gcd(j, n) != 1) continue;
    const double d = std::abs(static_cast<double>(j) - target);
    if (d < best_dist) {
      best_dist = d;
      best = j;
    }
  }
  if (best < 0) throw ConfigError(fmt::format("no coherent bin near {} fs for n_fft {}", nominal_rel, n_fft));
  return static_cast<double>(best) / static_cast<double>(n_fft);
}

ToneSpec Scenario::resolved_tone() const {
  ToneSpec t = tone;
  t.freq_rel = coherent_frequency(tone.freq_rel, n_fft);
  if (phase) {
    t.phase = *phase;
  } else {
    std::mt19937_64 gen(seed);
    t.phase = std::uniform_real_distribution<double>(-std::numbers::pi, std::numbers::pi)(gen);
  }
  return t;
}

std::size_t Scenario::samples_per_channel() const {
  const auto m = static_cast<std::size_t>(config.channels);
  if (mode == CoeffMode::estimated) return 2 * std::max(estimation_block, (n_fft + m - 1) / m);
  return (n_fft + m - 1) / m + static_cast<std::size_t>(spec.n_taps) - 1;
}

std::vector<std::string> builtin_scenario_names() {
  return {"two_channel", "five_channel", "wideband", "word_length", "tap_count", "gain_sweep", "skew_sweep", "zero"};
}

std::optional<Scenario> builtin_scenario(const std::string& name) {
  Scenario s = two_channel();
  if (name == "two_channel") return s;
  if (name == "five_channel") {
    s.name = "five_channel";
    s.config.channels = 5;
    s.profile = {{0, 0, 0, 0, 0}, {0, 0.01, -0.01, 0.02, -0.02}, {0, 0.01, 0.02, -0.01, -0.02}};
    return s;
  }
  if (name == "wideband") {
    s.name = "wideband";
    s.sweep_axis = SweepAxis::freq;
    s.sweep_values = {0.019, 0.133, 0.266, 0.399};
    return s;
  }
  if (name == "word_length") {
    s.name = "word_length";
    s.sweep_axis = SweepAxis::coeff_bits;
    s.sweep_values = parse_values("12:30");
    return s;
  }
  if (name == "tap_count") {
    s.name = "tap_count";
    s.profile.skews = {0.0, 0.02};
    s.sweep_axis = SweepAxis::n_taps;
    s.sweep_values = {2, 6, 10, 14, 18, 22, 26, 30, 38, 46, 54, 62};
    return s;
  }
  if (name == "gain_sweep") {
    s.name = "gain_sweep";
    s.tone.freq_rel = 0.46;
    s.profile.skews = {0.0, 0.0};
    s.sweep_axis = SweepAxis::gain;
    s.sweep_values = {0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1};
    return s;
  }
  if (name == "skew_sweep") {
    s.name = "skew_sweep";
    s.tone.freq_rel = 0.19;
    s.profile.gains = {0.0, 0.0};
    s.sweep_axis = SweepAxis::skew;
    s.sweep_values = {0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1};
    return s;
  }
  if (name == "zero") {
    s.name = "zero";
    s.profile = MismatchProfile::zeros(2);
    return s;
  }
  return std::nullopt;
}

Scenario parse_scenario(const std::string& text, Scenario s) {
  std::stringstream in(text);
  std::string line;
  int line_no = 0;
  bool given[3] = {false, false, false};  // offsets, gains, skews
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(fmt::format("line {}: key '{}' has no value", line_no, key));

    if (key == "name") s.name = value;
    else if (key == "channels") s.config.channels = static_cast<int>(to_int(key, value));
    else if (key == "fs") s.config.fs = to_double(key, value);
    else if (key == "bits") s.config.bits = static_cast<int>(to_int(key, value));
    else if (key == "full_scale") s.config.full_scale = to_double(key, value);
    else if (key == "amplitude") s.tone.amplitude = to_double(key, value);
    else if (key == "freq") s.tone.freq_rel = to_double(key, value);
    else if (key == "phase") s.phase = to_double(key, value);
    else if (key == "dc") s.tone.dc = to_double(key, value);
    else if (key == "offsets") { s.profile.offsets = to_list(key, value); given[0] = true; }
    else if (key == "gains") { s.profile.gains = to_list(key, value); given[1] = true; }
    else if (key == "skews") { s.profile.skews = to_list(key, value); given[2] = true; }
    else if (key == "taps") s.spec.n_taps = static_cast<int>(to_int(key, value));
    else if (key == "coeff_bits") s.spec.coeff_bits = static_cast<int>(to_int(key, value));
    else if (key == "variant") s.spec.variant = parse_variant(value);
    else if (key == "parallel") s.plan.parallelism = static_cast<int>(to_int(key, value));
    else if (key == "block_len") s.plan.block_len = static_cast<std::size_t>(to_int(key, value));
    else if (key == "mode") s.mode = parse_mode(value);
    else if (key == "seed") s.seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "n_fft") s.n_fft = static_cast<std::size_t>(to_int(key, value));
    else if (key == "estimation_block") s.estimation_block = static_cast<std::size_t>(to_int(key, value));
    else if (key == "sweep_axis") s.sweep_axis = parse_axis(value);
    else if (key == "sweep_values") s.sweep_values = parse_values(value);
    else throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key));
  }
  // Arrays left out of the text become zeros when the channel count changed.
  const auto m = static_cast<std::size_t>(std::max(s.config.channels, 0));
  std::vector<double>* lists[3] = {&s.profile.offsets, &s.profile.gains, &s.profile.skews};
  for (int i = 0; i < 3; ++i) {
    if (!given[i] && lists[i]->size() != m) lists[i]->assign(m, 0.0);
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& name_or_path) {
  if (auto s = builtin_scenario(name_or_path)) return *s;
  std::ifstream in(name_or_path);
  if (!in) {
    throw ConfigError(fmt::format("'{}' is neither a built-in scenario ({}) nor a readable file", name_or_path,
                                  fmt::join(builtin_scenario_names(), ", ")));
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string format_scenario(const Scenario& s) {
  std::string out;
  out += fmt::format("name = {}\n", s.name);
  out += fmt::format("channels = {}\nfs = {:.17g}\nbits = {}\nfull_scale = {:.17g}\n", s.config.channels, s.config.fs,
                     s.config.bits, s.config.full_scale);
  out += fmt::format("amplitude = {:.17g}\nfreq = {:.17g}\ndc = {:.17g}\n", s.tone.amplitude, s.tone.freq_rel, s.tone.dc);
  if (s.phase) out += fmt::format("phase = {:.17g}\n", *s.phase);
  out += fmt::format("offsets = {}\ngains = {}\nskews = {}\n", join(s.profile.offsets), join(s.profile.gains),
                     join(s.profile.skews));
  out += fmt::format("taps = {}\ncoeff_bits = {}\nvariant = {}\n", s.spec.n_taps, s.spec.coeff_bits,
                     variant_name(s.spec.variant));
  out += fmt::format("parallel = {}\nblock_len = {}\nmode = {}\nseed = {}\nn_fft = {}\nestimation_block = {}\n",
                     s.plan.parallelism, s.plan.block_len, mode_name(s.mode), s.seed, s.n_fft, s.estimation_block);
  if (s.sweep_axis) {
    out += fmt::format("sweep_axis = {}\nsweep_values = {}\n", axis_name(*s.sweep_axis), join(s.sweep_values));
  }
  return out;
}

std::string ScenarioResult::summary_line() const {
  return fmt::format("scenario={} freq_rel={:.9f} sinad_uncal_db={:.3f} sinad_cal_db={:.3f} enob_uncal={:.3f} "
                     "enob_cal={:.3f} max_spur_uncal_dbfs={:.3f} max_spur_cal_dbfs={:.3f}",
                     name, tone_freq_rel, before.sinad_db, after.sinad_db, before.enob, after.enob,
                     before.max_spur_dbfs(), after.max_spur_dbfs());
}

namespace {

void write_outputs(ScenarioResult& result, const std::filesystem::path& dir, const FilterBank* bank) {
  std::filesystem::create_directories(dir);
  auto emit = [&](const std::string& file, auto&& writer) {
    const auto path = dir / file;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    writer(out);
    result.files.push_back(path);
  };
  emit("spectrum_uncalibrated.csv", [&](std::ostream& o) { write_spectrum_csv(o, result.before.magnitude_dbfs, result.before.n_fft); });
  emit("spectrum_calibrated.csv", [&](std::ostream& o) { write_spectrum_csv(o, result.after.magnitude_dbfs, result.after.n_fft); });
  emit("spurs.csv", [&](std::ostream& o) { write_spur_csv(o, result.before, result.after); });
  if (bank) emit("coefficients.csv", [&](std::ostream& o) { write_coefficient_csv(o, *bank); });
  if (result.estimate) emit("estimate.csv", [&](std::ostream& o) { write_estimate_csv(o, *result.estimate); });
  emit("summary.txt", [&](std::ostream& o) { o << result.summary_line() << "\n"; });
}

}  // namespace

ScenarioResult evaluate_capture(const ChannelCapture& capture, const FilterBank& bank, double tone_freq_rel,
                                std::size_t n_fft, const std::optional<PolyphasePlan>& plan) {
  const auto cal = calibrate_capture(capture, bank, plan);
  const auto raw = dequantize_stream(capture.interleaved, capture.config);
  const auto aligned = trim_like(raw, cal, capture.config.channels);
  SinadOptions opts;
  opts.full_scale = capture.config.full_scale;
  ScenarioResult r;
  r.tone_freq_rel = tone_freq_rel;
  r.before = analyze_spectrum(aligned, tone_freq_rel, n_fft, capture.config.channels, opts);
  r.after = analyze_spectrum(cal.samples, tone_freq_rel, n_fft, capture.config.channels, opts);
  return r;
}

ScenarioResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  scenario.validate();
  const ToneSpec tone = scenario.resolved_tone();
  const auto& cfg = scenario.config;
  const auto m = static_cast<std::size_t>(cfg.channels);
  const std::size_t per_channel = scenario.samples_per_channel();
  const std::optional<PolyphasePlan> plan =
      scenario.plan.parallelism > 1 ? std::optional<PolyphasePlan>(scenario.plan) : std::nullopt;

  ScenarioResult result;
  std::optional<FilterBank> bank_used;
  SinadOptions sopts;
  sopts.full_scale = cfg.full_scale;

  if (scenario.mode == CoeffMode::ground_truth) {
    FilterBank bank = FilterBank::design(scenario.profile, cfg.channels, scenario.spec);
    if (options.real_coefficients) {
      // Same quantized samples, double-precision taps.
      const auto capture = simulate_capture(tone, cfg, scenario.profile, per_channel * m);
      std::vector<std::vector<double>> analog;
      for (const auto& ch : capture.per_channel) analog.push_back(dequantize_stream(ch, cfg));
      const auto cal = calibrate_real(analog, bank);
      const auto raw = dequantize_stream(capture.interleaved, cfg);
      result.before = analyze_spectrum(trim_like(raw, cal, cfg.channels), tone.freq_rel, scenario.n_fft, cfg.channels, sopts);
      result.after = analyze_spectrum(cal.samples, tone.freq_rel, scenario.n_fft, cfg.channels, sopts);
    } else {
      const auto capture = simulate_capture(tone, cfg, scenario.profile, per_channel * m);
      auto r = evaluate_capture(capture, bank, tone.freq_rel, scenario.n_fft, plan);
      result.before = std::move(r.before);
      result.after = std::move(r.after);
    }
    bank_used = std::move(bank);
  } else {
    const std::size_t block = per_channel / 2;
    const auto capture = simulate_capture(tone, cfg, scenario.profile, per_channel * m);
    EstimatorOptions eopts;
    eopts.block_len = block;
    BackgroundCalibrator calibrator(cfg, scenario.spec, eopts, plan);
    std::vector<std::vector<std::int32_t>> first(m), second(m);
    for (std::size_t c = 0; c < m; ++c) {
      const auto& ch = capture.per_channel[c];
      first[c].assign(ch.begin(), ch.begin() + static_cast<std::ptrdiff_t>(block));
      second[c].assign(ch.begin() + static_cast<std::ptrdiff_t>(block), ch.end());
    }
    calibrator.process_block(first);
    result.estimate = calibrator.last_estimate();
    bank_used = *calibrator.current_bank();
    const auto out = calibrator.process_block(second);
    const auto raw = dequantize_stream(capture.interleaved, cfg);
    const std::size_t begin = out.first_index * m;
    const std::vector<double> aligned(raw.begin() + static_cast<std::ptrdiff_t>(begin),
                                      raw.begin() + static_cast<std::ptrdiff_t>(begin + out.samples.size()));
    result.before = analyze_spectrum(aligned, tone.freq_rel, scenario.n_fft, cfg.channels, sopts);
    result.after = analyze_spectrum(out.samples, tone.freq_rel, scenario.n_fft, cfg.channels, sopts);
  }

  result.name = scenario.name;
  result.tone_freq_rel = tone.freq_rel;
  result.phase = tone.phase;
  if (options.out_dir) write_outputs(result, *options.out_dir, bank_used ? &*bank_used : nullptr);
  return result;
}

Scenario apply_axis(Scenario s, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::coeff_bits: s.spec.coeff_bits = static_cast<int>(std::lround(value)); break;
    case SweepAxis::n_taps: s.spec.n_taps = static_cast<int>(std::lround(value)); break;
    case SweepAxis::gain: s.profile.gains.at(1) = value; break;
    case SweepAxis::skew: s.profile.skews.at(1) = value; break;
    case SweepAxis::freq: s.tone.freq_rel = value; break;
  }
  return s;
}

std::vector<SweepRow> run_sweep(const Scenario& scenario, SweepAxis axis, const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (const double v : values) {
    const auto r = run_scenario(apply_axis(scenario, axis, v));
    rows.push_back({v, r.before.sinad_db, r.after.sinad_db, r.before.max_spur_dbfs(), r.after.max_spur_dbfs()});
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows) {
  out << fmt::format("{},sinad_uncalibrated_db,sinad_calibrated_db,max_spur_uncalibrated_dbfs,max_spur_calibrated_dbfs\n",
                     axis_name(axis));
  for (const auto& r : rows) {
    out << fmt::format("{:.10g},{:.6f},{:.6f},{:.6f},{:.6f}\n", r.value, r.sinad_uncalibrated, r.sinad_calibrated,
                       r.max_spur_uncalibrated, r.max_spur_calibrated);
  }
}

void write_spur_csv(std::ostream& out, const SpectrumReport& before, const SpectrumReport& after) {
  out << "kind,freq_rel,bin,uncalibrated_dbfs,calibrated_dbfs,collides_with_signal\n";
  for (std::size_t i = 0; i < before.spurs.size() && i < after.spurs.size(); ++i) {
    const auto& b = before.spurs[i];
    out << fmt::format("{},{:.10f},{},{:.6f},{:.6f},{}\n", b.kind == SpurKind::image ? "image" : "offset", b.freq_rel,
                       b.bin, b.level_dbfs, after.spurs[i].level_dbfs, b.collides_with_signal ? 1 : 0);
  }
}

void write_estimate_csv(std::ostream& out, const MismatchEstimate& e) {
  out << "channel,offset,gain,skew_ts,fit_amplitude,fit_freq_rel,fit_phase,fit_dc,fit_rms_residual,fit_iterations\n";
  for (std::size_t m = 0; m < e.gains.size(); ++m) {
    const auto& f = e.fits[m];
    out << fmt::format("{},{:.12g},{:.12g},{:.12g},{:.12g},{:.15g},{:.12g},{:.12g},{:.6g},{}\n", m, e.offsets[m],
                       e.gains[m], e.skews[m], f.amplitude, f.freq_rel, f.phase, f.dc, f.rms_residual, f.iterations);
  }
}

}  // namespace tiadc
