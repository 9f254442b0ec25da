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

#ifndef KERNELGEN_TESTS_SUPPORT_FIXTURES_HPP
#define KERNELGEN_TESTS_SUPPORT_FIXTURES_HPP

#include <cmath>

#include "kernelgen/dataset.hpp"
#include "kernelgen/parse.hpp"

namespace kernelgen::testing {

// Two nested change windows over SE, WN and C with fixed hyperparameters.
inline KernelExpr nested_window_kernel() {
  return parse(
      "CW(SE[variance=1.5, lengthscale=12] + "
      "CW(WN[variance=0.05] + SE[variance=0.8, lengthscale=3], WN[variance=0.02])"
      "[start=50, end=80, steepness=2], C[variance=0.7])[start=20, end=110, steepness=4]");
}

inline constexpr double kNestedWindowNoise = 0.01;

// 132 monthly observations, the last 12 held out. No randomness.
inline TimeSeriesDataset monthly_series() {
  Eigen::VectorXd t(132), y(132);
  for (int i = 0; i < 132; ++i) {
    t(i) = i;
    y(i) = std::sin(i / 6.0) + 0.01 * i + 0.2 * std::cos(i * 1.7);
  }
  return TimeSeriesDataset::with_test_suffix(t, y, 12);
}

}  // namespace kernelgen::testing

#endif  // KERNELGEN_TESTS_SUPPORT_FIXTURES_HPP
