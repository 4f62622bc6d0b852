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


// tiadc: simulate, estimate, calibrate and analyse time-interleaved ADC captures.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 data-format error,
// 4 numeric failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "tiadc/capture_file.hpp"
#include "tiadc/errors.hpp"
#include "tiadc/kernels.hpp"
#include "tiadc/scenario.hpp"

namespace fs = std::filesystem;
using namespace tiadc;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitFormat = 3;
constexpr int kExitNumeric = 4;

struct Overrides {
  std::string config = "two_channel";
  std::optional<std::uint64_t> seed;
  std::optional<int> taps;
  std::optional<int> coeff_bits;
  std::optional<std::string> variant;
  std::optional<int> parallel;
  std::optional<std::string> mode;
  std::string out;
};

void add_filter_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--taps", o.taps, "FIR taps N");
  cmd->add_option("--coeff-bits", o.coeff_bits, "coefficient word length W (Q2.(W-2))");
  cmd->add_option("--variant", o.variant, "centre tap: sub (1-dg) or div (1/(1+dg))")->check(CLI::IsMember({"sub", "div"}));
  cmd->add_option("--parallel", o.parallel, "polyphase parallelism L (1 = serial)");
}

void add_scenario_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "built-in scenario name or config file")->capture_default_str();
  cmd->add_option("--seed", o.seed, "phase seed");
  cmd->add_option("--mode", o.mode, "coefficients from ground truth or estimation")->check(CLI::IsMember({"truth", "est"}));
  add_filter_flags(cmd, o);
}

void apply(Scenario& s, const Overrides& o) {
  if (o.seed) s.seed = *o.seed;
  if (o.taps) s.spec.n_taps = *o.taps;
  if (o.coeff_bits) s.spec.coeff_bits = *o.coeff_bits;
  if (o.variant) s.spec.variant = parse_variant(*o.variant);
  if (o.parallel) s.plan.parallelism = *o.parallel;
  if (o.mode) s.mode = parse_mode(*o.mode);
  s.validate();
}

std::optional<PolyphasePlan> plan_for(const Overrides& o) {
  if (!o.parallel || *o.parallel <= 1) return std::nullopt;
  return PolyphasePlan{*o.parallel, 4096};
}

fs::path sidecar_for(const fs::path& capture) {
  fs::path p = capture;
  p.replace_extension(".cfg");
  return p;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

int cmd_simulate(const Overrides& o) {
  Scenario s = load_scenario(o.config);
  apply(s, o);
  const ToneSpec tone = s.resolved_tone();
  const auto m = static_cast<std::size_t>(s.config.channels);
  const auto capture = simulate_capture(tone, s.config, s.profile, s.samples_per_channel() * m);

  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);
  const fs::path cap = dir / "capture.bin";
  write_capture(capture, cap);

  // Sidecar pins the exact tone so a later `calibrate --mode truth` sees the
  // same ground truth.
  Scenario pinned = s;
  pinned.tone.freq_rel = tone.freq_rel;
  pinned.phase = tone.phase;
  open_out(sidecar_for(cap)) << format_scenario(pinned);
  fmt::print("wrote {} ({} samples, M={}, {} bits) and {}\n", cap.string(), capture.interleaved.size(), m,
             s.config.bits, sidecar_for(cap).string());
  return 0;
}

struct ToneChoice {
  double freq_rel;
  bool coherent;
};

ToneChoice choose_tone(const ChannelCapture& capture, std::optional<double> freq, std::size_t n_fft) {
  double f = 0.0;
  if (freq) {
    f = *freq;
  } else {
    const auto raw = dequantize_stream(capture.interleaved, capture.config);
    f = estimate_tone_frequency(std::span<const double>(raw).first(std::min(raw.size(), n_fft)));
    // Snap to the nearest bin when the record looks coherent.
    const double bin = std::round(f * static_cast<double>(n_fft));
    if (std::abs(bin - f * static_cast<double>(n_fft)) < 0.05) f = bin / static_cast<double>(n_fft);
  }
  const double exact = f * static_cast<double>(n_fft);
  return {f, std::abs(exact - std::round(exact)) < 1e-6};
}

int cmd_estimate(const std::string& path, std::optional<double> freq, std::size_t block, const Overrides& o) {
  const auto capture = read_capture(path);
  EstimatorOptions opts;
  opts.block_len = std::min(block, capture.samples_per_channel());
  opts.tone_freq_rel = freq;
  const auto est = estimate_mismatches(capture, opts);
  write_estimate_csv(std::cout, est);
  fmt::print("# tone_freq_rel={:.12f} block={}\n", est.tone_freq_rel, opts.block_len);
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    auto out = open_out(fs::path(o.out) / "estimate.csv");
    write_estimate_csv(out, est);
  }
  return 0;
}

int cmd_calibrate(const std::string& path, const std::optional<std::string>& coeffs, std::optional<double> freq,
                  std::size_t n_fft, const Overrides& o, bool config_given) {
  const auto capture = read_capture(path);
  const int channels = capture.config.channels;

  FilterSpec spec;
  std::optional<Scenario> truth;
  if (config_given) {
    truth = load_scenario(o.config);
  } else if (fs::exists(sidecar_for(path))) {
    truth = load_scenario(sidecar_for(path).string());
  }
  if (truth) spec = truth->spec;
  if (o.taps) spec.n_taps = *o.taps;
  if (o.coeff_bits) spec.coeff_bits = *o.coeff_bits;
  if (o.variant) spec.variant = parse_variant(*o.variant);
  spec.validate();

  std::optional<MismatchEstimate> estimate;
  FilterBank bank;
  const std::string mode = o.mode.value_or(truth && !coeffs ? "truth" : "est");
  if (coeffs) {
    std::ifstream in(*coeffs);
    if (!in) throw ConfigError("cannot open coefficient table " + *coeffs);
    bank = read_coefficient_csv(in, spec.variant);
    if (bank.channels() != channels) throw ConfigError("coefficient table channel count does not match the capture");
  } else if (mode == "truth") {
    if (!truth) throw ConfigError("--mode truth needs a sidecar " + sidecar_for(path).string() + " or --config");
    if (truth->config.channels != channels) throw ConfigError("ground-truth profile channel count does not match the capture");
    bank = FilterBank::design(truth->profile, channels, spec);
  } else {
    EstimatorOptions opts;
    opts.block_len = std::min<std::size_t>(4096, capture.samples_per_channel());
    opts.tone_freq_rel = freq;
    estimate = estimate_mismatches(capture, opts);
    bank = FilterBank::design(estimate->profile(), channels, spec);
  }

  if (!freq && truth) freq = coherent_frequency(truth->tone.freq_rel, n_fft);
  const auto tone = choose_tone(capture, freq, n_fft);
  const auto plan = plan_for(o);

  const auto cal = calibrate_capture(capture, bank, plan);
  const auto raw = dequantize_stream(capture.interleaved, capture.config);
  const auto aligned = trim_like(raw, cal, channels);
  SinadOptions sopts;
  sopts.windowed = !tone.coherent;
  sopts.full_scale = capture.config.full_scale;
  ScenarioResult result;
  result.name = fs::path(path).filename().string();
  result.tone_freq_rel = tone.freq_rel;
  result.before = analyze_spectrum(aligned, tone.freq_rel, n_fft, channels, sopts);
  result.after = analyze_spectrum(cal.samples, tone.freq_rel, n_fft, channels, sopts);

  const fs::path dir = o.out.empty() ? fs::path(path).parent_path() : fs::path(o.out);
  if (!dir.empty()) fs::create_directories(dir);
  {
    auto out = open_out(dir / "calibrated.csv");
    out << "index,value\n";
    const std::size_t base = cal.first_index * static_cast<std::size_t>(channels);
    for (std::size_t i = 0; i < cal.samples.size(); ++i) out << fmt::format("{},{:.12g}\n", base + i, cal.samples[i]);
  }
  {
    auto out = open_out(dir / "coefficients.csv");
    write_coefficient_csv(out, bank);
  }
  {
    auto out = open_out(dir / "spectrum_calibrated.csv");
    write_spectrum_csv(out, result.after.magnitude_dbfs, n_fft);
  }
  if (estimate) {
    auto out = open_out(dir / "estimate.csv");
    write_estimate_csv(out, *estimate);
  }
  fmt::print("mode={} taps={} coeff_bits={} variant={} window={}\n", coeffs ? "table" : mode, spec.n_taps,
             spec.coeff_bits, variant_name(spec.variant), tone.coherent ? "rect" : "blackman-harris");
  fmt::print("{}\n", result.summary_line());
  return 0;
}

int cmd_sweep(Overrides o, std::optional<std::string> axis_text, std::optional<std::string> values_text) {
  Scenario s = load_scenario(o.config);
  apply(s, o);
  const SweepAxis axis = axis_text ? parse_axis(*axis_text)
                                   : s.sweep_axis.value_or(SweepAxis::coeff_bits);
  std::vector<double> values = values_text ? parse_values(*values_text) : s.sweep_values;
  if (values.empty()) throw ConfigError("no sweep values: pass --values or use a scenario that defines them");
  const auto rows = run_sweep(s, axis, values);
  write_sweep_csv(std::cout, axis, rows);
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    auto out = open_out(fs::path(o.out) / fmt::format("sweep_{}.csv", axis_name(axis)));
    write_sweep_csv(out, axis, rows);
  }
  return 0;
}

int cmd_spectrum(const std::string& path, std::size_t n_fft, const Overrides& o) {
  const auto capture = read_capture(path);
  const auto raw = dequantize_stream(capture.interleaved, capture.config);
  const auto mag = power_spectrum(raw, n_fft, capture.config.full_scale);
  if (o.out.empty()) {
    write_spectrum_csv(std::cout, mag, n_fft);
  } else {
    fs::create_directories(o.out);
    auto out = open_out(fs::path(o.out) / "spectrum.csv");
    write_spectrum_csv(out, mag, n_fft);
    fmt::print("wrote {}\n", (fs::path(o.out) / "spectrum.csv").string());
  }
  return 0;
}

int cmd_run(const Overrides& o) {
  Scenario s = load_scenario(o.config);
  apply(s, o);
  RunOptions ro;
  if (!o.out.empty()) ro.out_dir = o.out;
  const auto r = run_scenario(s, ro);
  fmt::print("{}\n", r.summary_line());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-interleaved ADC mismatch simulation, estimation and calibration"};
  app.require_subcommand(1);
  bool show_isa = false;
  app.add_flag("--isa", show_isa, "print the selected FIR kernel variant to stderr");

  Overrides o;
  std::string capture_path;
  std::optional<double> freq;
  std::optional<std::string> coeffs;
  std::optional<std::string> axis;
  std::optional<std::string> values;
  std::size_t n_fft = 4096;
  std::size_t block = 4096;

  auto* simulate = app.add_subcommand("simulate", "simulate a scenario and write a capture file");
  add_scenario_flags(simulate, o);
  simulate->add_option("--out", o.out, "output directory");

  auto* estimate = app.add_subcommand("estimate", "estimate channel mismatches from a capture");
  estimate->add_option("capture", capture_path, "capture file")->required();
  estimate->add_option("--freq", freq, "tone frequency as a fraction of fs (default: detect)");
  estimate->add_option("--block", block, "samples per channel used for the fit")->capture_default_str();
  estimate->add_option("--out", o.out, "output directory");

  auto* calibrate = app.add_subcommand("calibrate", "calibrate a capture and report SINAD before/after");
  calibrate->add_option("capture", capture_path, "capture file")->required();
  auto* cfg_opt = calibrate->add_option("--config", o.config, "ground-truth scenario (default: capture sidecar)");
  calibrate->add_option("--mode", o.mode, "coefficients from ground truth or estimation")->check(CLI::IsMember({"truth", "est"}));
  calibrate->add_option("--coeffs", coeffs, "coefficient table CSV to apply");
  calibrate->add_option("--freq", freq, "tone frequency as a fraction of fs");
  calibrate->add_option("--n-fft", n_fft, "FFT length")->capture_default_str();
  add_filter_flags(calibrate, o);
  calibrate->add_option("--out", o.out, "output directory (default: next to the capture)");

  auto* sweep = app.add_subcommand("sweep", "sweep one parameter and emit a CSV table");
  add_scenario_flags(sweep, o);
  sweep->add_option("--axis", axis, "coeff_bits | n_taps | gain | skew | freq");
  sweep->add_option("--values", values, "a:b, a:b:step or comma list");
  sweep->add_option("--out", o.out, "output directory");

  auto* spectrum = app.add_subcommand("spectrum", "write the magnitude spectrum of a capture");
  spectrum->add_option("capture", capture_path, "capture file")->required();
  spectrum->add_option("--n-fft", n_fft, "FFT length")->capture_default_str();
  spectrum->add_option("--out", o.out, "output directory (default: stdout)");

  auto* run = app.add_subcommand("run", "run one scenario end to end");
  add_scenario_flags(run, o);
  run->add_option("--out", o.out, "output directory for spectra and summaries");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (show_isa) fmt::print(stderr, "fir kernels: {}\n", kernels::isa_name(kernels::active_isa()));

  try {
    if (*simulate) return cmd_simulate(o);
    if (*estimate) return cmd_estimate(capture_path, freq, block, o);
    if (*calibrate) return cmd_calibrate(capture_path, coeffs, freq, n_fft, o, cfg_opt->count() > 0);
    if (*sweep) return cmd_sweep(o, axis, values);
    if (*spectrum) return cmd_spectrum(capture_path, n_fft, o);
    if (*run) return cmd_run(o);
  } catch (const FormatError& e) {
    fmt::print(stderr, "format error: {}\n", e.what());
    return kExitFormat;
  } catch (const NumericError& e) {
    fmt::print(stderr, "numeric error: {}\n", e.what());
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return kExitConfig;
}
