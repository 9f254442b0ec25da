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

#ifndef KERNELGEN_DATASET_HPP
#define KERNELGEN_DATASET_HPP

#include <Eigen/Dense>

namespace kernelgen {

/// Ordered (time, value) observations; the first `n_train` form the training
/// prefix and the rest the test suffix.
class TimeSeriesDataset {
 public:
  /// Throws InvalidDataset unless times are strictly increasing, the lengths
  /// agree and 1 <= n_train <= size.
  TimeSeriesDataset(Eigen::VectorXd times, Eigen::VectorXd values, Eigen::Index n_train);

  /// Convenience: split with `n_test` trailing points held out.
  static TimeSeriesDataset with_test_suffix(Eigen::VectorXd times, Eigen::VectorXd values,
                                            Eigen::Index n_test);

  const Eigen::VectorXd& times() const { return times_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::Index size() const { return times_.size(); }
  Eigen::Index n_train() const { return n_train_; }
  Eigen::Index n_test() const { return times_.size() - n_train_; }

  auto train_times() const { return times_.head(n_train_); }
  auto train_values() const { return values_.head(n_train_); }
  auto test_times() const { return times_.tail(n_test()); }
  auto test_values() const { return values_.tail(n_test()); }

 private:
  Eigen::VectorXd times_;
  Eigen::VectorXd values_;
  Eigen::Index n_train_;
};

}  // namespace kernelgen

#endif  // KERNELGEN_DATASET_HPP
