/*
 * Copyright 2026 The kernelgen Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef KERNELGEN_TESTS_SUPPORT_SYNTHETIC_HPP
#define KERNELGEN_TESTS_SUPPORT_SYNTHETIC_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "kernelgen/dataset.hpp"

namespace kernelgen::testing {

/// y = sin(2 pi t / 1.5) + 0.3 t + 0.1 eps on n evenly spaced times in [0, 10].
inline TimeSeriesDataset sine_plus_trend(int n, std::uint64_t seed, int n_test = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> eps(0.0, 1.0);
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(n, 0.0, 10.0);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i)
    y(i) = std::sin(2 * std::numbers::pi * t(i) / 1.5) + 0.3 * t(i) + 0.1 * eps(rng);
  return TimeSeriesDataset::with_test_suffix(std::move(t), std::move(y), n_test);
}

/// i.i.d. standard normal values on times 0..n-1.
inline TimeSeriesDataset white_noise(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> eps(0.0, 1.0);
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(n, 0.0, n - 1.0);
  Eigen::VectorXd y(n);
  for (auto& v : y) v = eps(rng);
  return TimeSeriesDataset::with_test_suffix(std::move(t), std::move(y), 0);
}

}  // namespace kernelgen::testing

#endif  // KERNELGEN_TESTS_SUPPORT_SYNTHETIC_HPP
