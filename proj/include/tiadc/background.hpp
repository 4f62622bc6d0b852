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

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "tiadc/calib_filter.hpp"
#include "tiadc/estimator.hpp"

namespace tiadc {

/// Block-wise background calibration: each block is filtered with the bank
/// derived from the previous block, then re-estimated. The new bank replaces
/// the old one between blocks, never while a block is being filtered.
class BackgroundCalibrator {
 public:
  BackgroundCalibrator(const TiadcConfig& config, const FilterSpec& spec, EstimatorOptions estimator,
                       std::optional<PolyphasePlan> plan = std::nullopt);

  struct BlockOutput {
    /// Interleaved; samples[k*M + m] estimates ideal aggregate sample
    /// (first_index + k)*M + m.
    std::vector<double> samples;
    std::size_t first_index = 0;
    /// Bank used for this block was estimated from earlier data.
    bool calibrated = false;
  };

  /// `block` holds one equal-length code sequence per channel.
  BlockOutput process_block(const std::vector<std::vector<std::int32_t>>& block);

  std::shared_ptr<const FilterBank> current_bank() const;
  const std::optional<MismatchEstimate>& last_estimate() const { return last_estimate_; }
  std::size_t blocks_processed() const { return blocks_; }

 private:
  TiadcConfig config_;
  FilterSpec spec_;
  EstimatorOptions estimator_;
  std::optional<PolyphasePlan> plan_;

  mutable std::mutex bank_mutex_;
  std::shared_ptr<const FilterBank> bank_;
  bool bank_estimated_ = false;

  std::vector<std::vector<std::int32_t>> history_;
  std::optional<MismatchEstimate> last_estimate_;
  std::size_t blocks_ = 0;
  std::size_t consumed_ = 0;
};

}  // namespace tiadc
