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


#include "tiadc/capture_file.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "tiadc/errors.hpp"

namespace tiadc {
namespace {

void put_le(std::vector<std::uint8_t>& out, std::uint64_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t offset, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= std::uint64_t{bytes[offset + static_cast<std::size_t>(i)]} << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_capture(const ChannelCapture& capture) {
  const auto& cfg = capture.config;
  cfg.validate();
  if (cfg.bits > 16) throw ConfigError(fmt::format("capture files hold at most 16-bit codes, got {}", cfg.bits));
  if (cfg.channels > 0xFFFF) throw ConfigError("too many channels for the capture format");
  if (capture.interleaved.size() % static_cast<std::size_t>(cfg.channels) != 0) {
    throw ShapeError("interleaved length is not a multiple of M");
  }

  std::vector<std::uint8_t> out;
  out.reserve(kCaptureHeaderSize + 2 * capture.interleaved.size());
  out.insert(out.end(), std::begin(kCaptureMagic), std::end(kCaptureMagic));
  put_le(out, kCaptureVersion, 2);
  put_le(out, static_cast<std::uint64_t>(cfg.channels), 2);
  put_le(out, static_cast<std::uint64_t>(cfg.bits), 2);
  put_le(out, std::bit_cast<std::uint64_t>(cfg.fs), 8);
  put_le(out, capture.interleaved.size(), 8);
  for (const auto code : capture.interleaved) {
    if (code < cfg.code_min() || code > cfg.code_max()) throw ShapeError(fmt::format("code {} outside the word length", code));
    put_le(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(code)), 2);
  }
  return out;
}

ChannelCapture decode_capture(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kCaptureHeaderSize) {
    throw FormatError(fmt::format("header truncated: expected {} bytes, got {}", kCaptureHeaderSize, bytes.size()),
                      bytes.size());
  }
  if (std::memcmp(bytes.data(), kCaptureMagic, 4) != 0) throw FormatError("bad magic (expected \"TIAD\")", 0);
  const auto version = get_le(bytes, 4, 2);
  if (version != kCaptureVersion) throw FormatError(fmt::format("unsupported version {}", version), 4);

  TiadcConfig cfg;
  cfg.channels = static_cast<int>(get_le(bytes, 6, 2));
  if (cfg.channels < 2) throw FormatError(fmt::format("channel count {} < 2", cfg.channels), 6);
  cfg.bits = static_cast<int>(get_le(bytes, 8, 2));
  if (cfg.bits < 2 || cfg.bits > 16) throw FormatError(fmt::format("word length {} outside 2..16", cfg.bits), 8);
  cfg.fs = std::bit_cast<double>(get_le(bytes, 10, 8));
  if (!(cfg.fs > 0.0) || !std::isfinite(cfg.fs)) throw FormatError("sample rate must be positive and finite", 10);
  const std::uint64_t count = get_le(bytes, 18, 8);
  if (count % static_cast<std::uint64_t>(cfg.channels) != 0) {
    throw FormatError(fmt::format("sample_count {} is not a multiple of M={}", count, cfg.channels), 18);
  }

  const std::uint64_t payload = bytes.size() - kCaptureHeaderSize;
  if (count > payload / 2 || payload != 2 * count) {
    throw FormatError(fmt::format("payload length mismatch: expected {} bytes, got {}", 2 * count, payload),
                      kCaptureHeaderSize + std::min(payload, 2 * count));
  }

  std::vector<std::int32_t> codes(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t at = kCaptureHeaderSize + 2 * i;
    const auto code = static_cast<std::int16_t>(static_cast<std::uint16_t>(get_le(bytes, at, 2)));
    if (code < cfg.code_min() || code > cfg.code_max()) {
      throw FormatError(fmt::format("sample {} = {} outside the {}-bit range", i, code, cfg.bits), at);
    }
    codes[i] = code;
  }
  return ChannelCapture::from_interleaved(cfg, std::move(codes), CaptureOrigin::file);
}

void write_capture(const ChannelCapture& capture, const std::filesystem::path& path) {
  const auto bytes = encode_capture(capture);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ChannelCapture read_capture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string(), 0);
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_capture(bytes);
}

}  // namespace tiadc
