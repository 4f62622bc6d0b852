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


#include "tiadc/polyphase.hpp"

#include <algorithm>
#include <atomic>
#include <string>
#include <thread>

#include "tiadc/errors.hpp"
#include "tiadc/kernels.hpp"

namespace tiadc {

void PolyphasePlan::validate(std::size_t n_taps) const {
  if (parallelism < 1) throw ConfigError("parallelism L must be >= 1, got " + std::to_string(parallelism));
  if (block_len < std::max<std::size_t>(n_taps, 1)) {
    throw ConfigError("block length " + std::to_string(block_len) + " is shorter than the filter (" +
                      std::to_string(n_taps) + " taps)");
  }
}

template <class T>
std::vector<std::vector<T>> decompose(std::span<const T> stream, int parallelism) {
  if (parallelism < 1) throw ConfigError("parallelism L must be >= 1, got " + std::to_string(parallelism));
  const auto l = static_cast<std::size_t>(parallelism);
  std::vector<std::vector<T>> portions(l);
  for (std::size_t j = 0; j < l; ++j) {
    portions[j].reserve(stream.size() / l + 1);
    for (std::size_t n = j; n < stream.size(); n += l) portions[j].push_back(stream[n]);
  }
  return portions;
}

namespace {

// Lengths must look like the output of decompose: non-increasing, spread <= 1.
void check_portion_lengths(const std::vector<std::size_t>& lengths) {
  if (lengths.empty()) throw ShapeError("need at least one portion");
  for (std::size_t j = 1; j < lengths.size(); ++j) {
    if (lengths[j] > lengths[j - 1] || lengths[0] - lengths[j] > 1) {
      throw ShapeError("portion lengths are not a decomposition of one stream (portion " + std::to_string(j) +
                       " has " + std::to_string(lengths[j]) + " samples, portion 0 has " +
                       std::to_string(lengths[0]) + ")");
    }
  }
}

template <class T>
std::vector<std::size_t> lengths_of(const std::vector<std::vector<T>>& portions) {
  std::vector<std::size_t> out;
  out.reserve(portions.size());
  for (const auto& p : portions) out.push_back(p.size());
  return out;
}

}  // namespace

template <class T>
std::vector<T> recompose(const std::vector<std::vector<T>>& portions) {
  check_portion_lengths(lengths_of(portions));
  const std::size_t l = portions.size();
  std::size_t total = 0;
  for (const auto& p : portions) total += p.size();
  std::vector<T> out(total);
  for (std::size_t j = 0; j < l; ++j) {
    for (std::size_t q = 0; q < portions[j].size(); ++q) out[q * l + j] = portions[j][q];
  }
  return out;
}

template std::vector<std::vector<std::int32_t>> decompose(std::span<const std::int32_t>, int);
template std::vector<std::vector<std::int64_t>> decompose(std::span<const std::int64_t>, int);
template std::vector<std::vector<double>> decompose(std::span<const double>, int);
template std::vector<std::int32_t> recompose(const std::vector<std::vector<std::int32_t>>&);
template std::vector<std::int64_t> recompose(const std::vector<std::vector<std::int64_t>>&);
template std::vector<double> recompose(const std::vector<std::vector<double>>&);

namespace {

struct Task {
  std::size_t phase;
  std::size_t begin;
  std::size_t end;
};

// Reversed polyphase components: component p holds taps[p], taps[p + L], ...
// stored back to front for correlate_valid.
std::vector<std::vector<std::int32_t>> reversed_components(std::span<const std::int32_t> taps, std::size_t l) {
  std::vector<std::vector<std::int32_t>> comps(l);
  for (std::size_t p = 0; p < l; ++p) {
    for (std::size_t i = p; i < taps.size(); i += l) comps[p].push_back(taps[i]);
    std::reverse(comps[p].begin(), comps[p].end());
  }
  return comps;
}

// Output portion j, samples [begin, end):
//   y_j[q] = sum_p sum_r h_p[r] * x_s[q - r - c],  s = (j - p) mod L,  c = (p > j)
void run_task(const Task& task, const std::vector<std::vector<std::int32_t>>& portions,
              const std::vector<std::vector<std::int32_t>>& comps, std::vector<std::int64_t>& out,
              std::vector<std::int32_t>& window, std::vector<std::int64_t>& partial) {
  const std::size_t l = portions.size();
  const std::size_t j = task.phase;
  const std::size_t n_out = task.end - task.begin;
  std::fill(out.begin() + static_cast<std::ptrdiff_t>(task.begin), out.begin() + static_cast<std::ptrdiff_t>(task.end),
            0);
  for (std::size_t p = 0; p < l; ++p) {
    const auto& comp = comps[p];
    if (comp.empty()) continue;
    const std::size_t s = (j + l - p) % l;
    const std::ptrdiff_t carry = p > j ? 1 : 0;
    const auto& src = portions[s];
    const std::size_t history = comp.size() - 1;

    // Source indices [begin - carry - history, end - carry); negatives are the
    // zero initial state.
    window.assign(n_out + history, 0);
    const std::ptrdiff_t first = static_cast<std::ptrdiff_t>(task.begin) - carry - static_cast<std::ptrdiff_t>(history);
    for (std::size_t w = 0; w < window.size(); ++w) {
      const std::ptrdiff_t idx = first + static_cast<std::ptrdiff_t>(w);
      if (idx >= 0) window[w] = src[static_cast<std::size_t>(idx)];
    }
    partial.resize(n_out);
    kernels::correlate_valid(std::span<const std::int32_t>(window), std::span<const std::int32_t>(comp),
                             std::span<std::int64_t>(partial));
    for (std::size_t q = 0; q < n_out; ++q) out[task.begin + q] += partial[q];
  }
}

}  // namespace

std::vector<std::vector<std::int64_t>> parallel_convolve(const std::vector<std::vector<std::int32_t>>& portions,
                                                         std::span<const std::int32_t> taps,
                                                         const PolyphasePlan& plan) {
  plan.validate(taps.size());
  if (taps.empty()) throw ShapeError("convolution needs at least one tap");
  if (portions.size() != static_cast<std::size_t>(plan.parallelism)) {
    throw ShapeError("expected " + std::to_string(plan.parallelism) + " portions, got " +
                     std::to_string(portions.size()));
  }
  check_portion_lengths(lengths_of(portions));

  const std::size_t l = portions.size();
  const auto comps = reversed_components(taps, l);

  std::vector<std::vector<std::int64_t>> outputs(l);
  std::vector<Task> tasks;
  for (std::size_t j = 0; j < l; ++j) {
    outputs[j].assign(portions[j].size(), 0);
    for (std::size_t b = 0; b < portions[j].size(); b += plan.block_len) {
      tasks.push_back({j, b, std::min(b + plan.block_len, portions[j].size())});
    }
  }

  // Tasks write disjoint ranges, so the result does not depend on scheduling.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    std::vector<std::int32_t> window;
    std::vector<std::int64_t> partial;
    for (std::size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1)) {
      run_task(tasks[t], portions, comps, outputs[tasks[t].phase], window, partial);
    }
  };
  const std::size_t n_workers = std::min<std::size_t>(l, tasks.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  return outputs;
}

std::vector<std::int64_t> polyphase_convolve(std::span<const std::int32_t> stream, std::span<const std::int32_t> taps,
                                             const PolyphasePlan& plan) {
  return recompose(parallel_convolve(decompose(stream, plan.parallelism), taps, plan));
}

}  // namespace tiadc
