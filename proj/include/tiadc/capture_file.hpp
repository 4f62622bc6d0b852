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

// Binary capture file, all fields little-endian:
//
//   offset  size  field
//        0     4  magic "TIAD"
//        4     2  version (u16, currently 1)
//        6     2  channel count M (u16)
//        8     2  word length in bits (u16, 2..16)
//       10     8  aggregate sample rate fs (IEEE-754 double)
//       18     8  sample_count (u64, multiple of M)
//       26   2*n  interleaved samples, signed 16-bit two's complement

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tiadc/tiadc_model.hpp"

namespace tiadc {

inline constexpr char kCaptureMagic[4] = {'T', 'I', 'A', 'D'};
inline constexpr std::uint16_t kCaptureVersion = 1;
inline constexpr std::size_t kCaptureHeaderSize = 26;

std::vector<std::uint8_t> encode_capture(const ChannelCapture& capture);
ChannelCapture decode_capture(std::span<const std::uint8_t> bytes);

void write_capture(const ChannelCapture& capture, const std::filesystem::path& path);
ChannelCapture read_capture(const std::filesystem::path& path);

}  // namespace tiadc
