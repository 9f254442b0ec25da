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

#ifndef KERNELGEN_OPTIMIZE_HPP
#define KERNELGEN_OPTIMIZE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "kernelgen/dataset.hpp"
#include "kernelgen/kernel_expr.hpp"

namespace kernelgen {

/// Objective for minimization: returns f(x) and writes the gradient. A
/// non-finite return marks x as infeasible; the line search backs off.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct LbfgsOptions {
  int max_iters = 200;
  int memory = 10;
  double gradient_tol = 1e-6;  // on the infinity norm
  double relative_tol = 1e-10;  // on the per-iteration decrease of f
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value;
  int iterations;
  bool converged;
};

/// Limited-memory BFGS with an Armijo backtracking line search. Never
/// returns a point worse than x0.
LbfgsResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0, const LbfgsOptions& options = {});

inline constexpr double kNoiseFloor = 1e-8;

/// Observation noise: fixed at `variance`, or learned with `variance` as the
/// starting value. Learned noise never drops below kNoiseFloor.
struct NoiseModel {
  bool learn = true;
  double variance = 0.1;
  bool operator==(const NoiseModel&) const = default;
};

struct OptimizeConfig {
  int restarts = 5;     // restart 0 starts from the given values
  int max_iters = 200;  // L-BFGS iterations per restart
  std::uint64_t seed = 0;
  // Hyperparameters (in hyperparam_vector order) that restarts redraw; the
  // rest, and the noise, keep their given values. Empty redraws everything.
  std::vector<bool> resample;
};

struct FitResult {
  KernelExpr expr;
  double noise_variance;
  double lml;
};

/// Maximizes the log marginal likelihood of the training split. Positive
/// hyperparameters and the noise are optimized in log space; a change
/// window's end is carried as start + exp(w) so the window never inverts.
/// Restarts beyond the first draw log-uniform values in [1e-2, 1e2] times
/// the data scale of each parameter from their own seeded generator; the
/// best restart wins, lower index on ties. Throws OptimizationFailed if no
/// restart reaches a finite likelihood.
FitResult optimize_hyperparams(const KernelExpr& expr, const TimeSeriesDataset& data,
                               const NoiseModel& noise, const OptimizeConfig& config);

}  // namespace kernelgen

#endif  // KERNELGEN_OPTIMIZE_HPP
