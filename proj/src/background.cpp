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


#include "tiadc/background.hpp"

#include <fmt/format.h>

#include "tiadc/errors.hpp"

namespace tiadc {

BackgroundCalibrator::BackgroundCalibrator(const TiadcConfig& config, const FilterSpec& spec,
                                           EstimatorOptions estimator, std::optional<PolyphasePlan> plan)
    : config_(config), spec_(spec), estimator_(std::move(estimator)), plan_(plan) {
  config_.validate();
  spec_.validate();
  bank_ = std::make_shared<const FilterBank>(FilterBank::identity(config_.channels, spec_));
  history_.assign(static_cast<std::size_t>(config_.channels),
                  std::vector<std::int32_t>(static_cast<std::size_t>(spec_.n_taps - 1), 0));
}

std::shared_ptr<const FilterBank> BackgroundCalibrator::current_bank() const {
  std::lock_guard lock(bank_mutex_);
  return bank_;
}

BackgroundCalibrator::BlockOutput BackgroundCalibrator::process_block(
    const std::vector<std::vector<std::int32_t>>& block) {
  const auto channels = static_cast<std::size_t>(config_.channels);
  if (block.size() != channels) throw ConfigError(fmt::format("block has {} channels, expected {}", block.size(), channels));
  const std::size_t len = block.front().size();
  for (const auto& ch : block) {
    if (ch.size() != len) throw ShapeError("ragged block");
  }
  if (len == 0) throw ShapeError("empty block");

  // One bank for the whole block.
  const auto bank = current_bank();
  const auto history_len = static_cast<std::size_t>(spec_.n_taps - 1);

  std::vector<std::vector<double>> outputs(channels);
  for (std::size_t m = 0; m < channels; ++m) {
    std::vector<std::int32_t> stream = history_[m];
    stream.insert(stream.end(), block[m].begin(), block[m].end());
    auto cal = calibrate_channel(stream, bank->fixed_taps[m], bank->offsets[m], spec_, config_, plan_);
    outputs[m].assign(cal.samples.begin() + static_cast<std::ptrdiff_t>(history_len), cal.samples.end());
    // Keep the newest N-1 codes for the next block.
    history_[m].assign(stream.end() - static_cast<std::ptrdiff_t>(history_len), stream.end());
  }

  BlockOutput out;
  out.samples = interleave_channels(outputs);
  // Output k of this block estimates input consumed_ + k - D; the first
  // block's leading D outputs refer to samples before the capture started.
  const auto delay = static_cast<std::size_t>(spec_.group_delay());
  out.first_index = consumed_ >= delay ? consumed_ - delay : 0;
  if (consumed_ < delay) {
    const std::size_t drop = (delay - consumed_) * channels;
    out.samples.erase(out.samples.begin(), out.samples.begin() + static_cast<std::ptrdiff_t>(std::min(drop, out.samples.size())));
  }
  out.calibrated = bank_estimated_;

  // Re-estimate on this block; the result applies from the next block on.
  std::vector<std::vector<double>> analog;
  for (const auto& ch : block) analog.push_back(dequantize_stream(ch, config_));
  EstimatorOptions opts = estimator_;
  opts.block_len = len;
  last_estimate_ = estimate_mismatches(analog, config_, opts);
  auto next = std::make_shared<const FilterBank>(FilterBank::design(last_estimate_->profile(), config_.channels, spec_));
  {
    std::lock_guard lock(bank_mutex_);
    bank_ = std::move(next);
  }
  bank_estimated_ = true;
  consumed_ += len;
  ++blocks_;
  return out;
}

}  // namespace tiadc
