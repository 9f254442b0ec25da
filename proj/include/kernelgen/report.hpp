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

#ifndef KERNELGEN_REPORT_HPP
#define KERNELGEN_REPORT_HPP

#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "kernelgen/dataset.hpp"
#include "kernelgen/kernel_expr.hpp"

namespace kernelgen {

/// Two-sided standard normal quantile: P(|Z| <= z) = level.
double interval_zscore(double level);

/// Posterior predictions at every observed time, training and test.
struct PredictionTable {
  Eigen::VectorXd time, mean, lower, upper;
};

/// mean +- z sqrt(var), where var is the posterior variance plus the noise
/// variance unless `latent_only`.
PredictionTable predict(const KernelExpr& expr, const TimeSeriesDataset& data,
                        double noise_variance, double level, bool latent_only);

/// Header "time,mean,lower,upper", shortest round-trip number text.
std::string predictions_csv(const PredictionTable& table);

/// Observations as circles (training and test classes), the mean as a
/// polyline over a shaded interval polygon, and a dashed line between the
/// last training and first test time.
std::string plot_svg(const TimeSeriesDataset& data, const PredictionTable& table);

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace kernelgen

#endif  // KERNELGEN_REPORT_HPP
