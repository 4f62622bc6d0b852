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


#include <atomic>
#include <stdexcept>

#include "tiadc/errors.hpp"
#include "tiadc/kernels.hpp"

namespace tiadc::kernels {
namespace {

// -1 means "use detected_isa()".
std::atomic<int> g_forced{-1};

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(TIADC_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(TIADC_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() {
  static const Isa best = [] {
    if (isa_available(Isa::avx2)) return Isa::avx2;
    if (isa_available(Isa::neon)) return Isa::neon;
    return Isa::scalar;
  }();
  return best;
}

Isa active_isa() {
  const int forced = g_forced.load(std::memory_order_relaxed);
  return forced < 0 ? detected_isa() : static_cast<Isa>(forced);
}

void force_isa(std::optional<Isa> isa) {
  if (!isa) {
    g_forced.store(-1);
    return;
  }
  g_forced.store(static_cast<int>(isa_available(*isa) ? *isa : Isa::scalar));
}

namespace {

template <class In, class Out>
void check_shape(std::span<const In> in, std::span<const In> taps, std::span<Out> out) {
  if (taps.empty()) throw ShapeError("correlation needs at least one tap");
  if (in.size() < taps.size()) throw ShapeError("correlation input shorter than the tap set");
  if (out.size() != in.size() - taps.size() + 1) throw ShapeError("correlation output has the wrong length");
}

}  // namespace

void correlate_valid(std::span<const std::int32_t> in, std::span<const std::int32_t> taps,
                     std::span<std::int64_t> out, Isa isa) {
  check_shape(in, taps, out);
  if (!isa_available(isa)) isa = Isa::scalar;
  switch (isa) {
#if defined(TIADC_HAVE_AVX2)
    case Isa::avx2: avx2::correlate_valid_i64(in.data(), taps.data(), taps.size(), out.data(), out.size()); return;
#endif
#if defined(TIADC_HAVE_NEON)
    case Isa::neon: neon::correlate_valid_i64(in.data(), taps.data(), taps.size(), out.data(), out.size()); return;
#endif
    default: scalar::correlate_valid_i64(in.data(), taps.data(), taps.size(), out.data(), out.size()); return;
  }
}

void correlate_valid(std::span<const double> in, std::span<const double> taps, std::span<double> out, Isa isa) {
  check_shape(in, taps, out);
  if (!isa_available(isa)) isa = Isa::scalar;
  switch (isa) {
#if defined(TIADC_HAVE_AVX2)
    case Isa::avx2: avx2::correlate_valid_f64(in.data(), taps.data(), taps.size(), out.data(), out.size()); return;
#endif
#if defined(TIADC_HAVE_NEON)
    case Isa::neon: neon::correlate_valid_f64(in.data(), taps.data(), taps.size(), out.data(), out.size()); return;
#endif
    default: scalar::correlate_valid_f64(in.data(), taps.data(), taps.size(), out.data(), out.size()); return;
  }
}

void correlate_valid(std::span<const std::int32_t> in, std::span<const std::int32_t> taps,
                     std::span<std::int64_t> out) {
  correlate_valid(in, taps, out, active_isa());
}

void correlate_valid(std::span<const double> in, std::span<const double> taps, std::span<double> out) {
  correlate_valid(in, taps, out, active_isa());
}

namespace {

template <class In, class Out>
std::vector<Out> fir_causal_impl(std::span<const In> x, std::span<const In> taps) {
  if (taps.empty()) throw ShapeError("FIR needs at least one tap");
  if (x.empty()) return {};
  std::vector<In> padded(taps.size() - 1 + x.size(), In{});
  std::copy(x.begin(), x.end(), padded.begin() + static_cast<std::ptrdiff_t>(taps.size() - 1));
  std::vector<In> reversed(taps.rbegin(), taps.rend());
  std::vector<Out> out(x.size());
  correlate_valid(std::span<const In>(padded), std::span<const In>(reversed), std::span<Out>(out));
  return out;
}

}  // namespace

std::vector<std::int64_t> fir_causal(std::span<const std::int32_t> x, std::span<const std::int32_t> taps) {
  return fir_causal_impl<std::int32_t, std::int64_t>(x, taps);
}

std::vector<double> fir_causal(std::span<const double> x, std::span<const double> taps) {
  return fir_causal_impl<double, double>(x, taps);
}

}  // namespace tiadc::kernels
