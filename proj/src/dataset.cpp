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

#include "kernelgen/dataset.hpp"

#include <cmath>
#include <string>

#include "kernelgen/errors.hpp"

namespace kernelgen {

TimeSeriesDataset::TimeSeriesDataset(Eigen::VectorXd times, Eigen::VectorXd values,
                                     Eigen::Index n_train)
    : times_(std::move(times)), values_(std::move(values)), n_train_(n_train) {
  if (times_.size() != values_.size()) {
    throw InvalidDataset("times and values differ in length (" + std::to_string(times_.size()) +
                         " vs " + std::to_string(values_.size()) + ")");
  }
  if (n_train_ < 1 || n_train_ > times_.size()) {
    throw InvalidDataset("training prefix length " + std::to_string(n_train_) +
                         " out of range for " + std::to_string(times_.size()) + " points");
  }
  for (Eigen::Index i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_(i)) || !std::isfinite(values_(i))) {
      throw InvalidDataset("non-finite observation at index " + std::to_string(i));
    }
    if (i > 0 && !(times_(i) > times_(i - 1))) {
      throw InvalidDataset("times not strictly increasing at index " + std::to_string(i));
    }
  }
}

TimeSeriesDataset TimeSeriesDataset::with_test_suffix(Eigen::VectorXd times,
                                                      Eigen::VectorXd values,
                                                      Eigen::Index n_test) {
  const Eigen::Index n = times.size();
  return TimeSeriesDataset(std::move(times), std::move(values), n - n_test);
}

}  // namespace kernelgen
