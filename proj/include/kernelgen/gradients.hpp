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

#ifndef KERNELGEN_GRADIENTS_HPP
#define KERNELGEN_GRADIENTS_HPP

#include <vector>

#include <Eigen/Dense>

#include "kernelgen/kernel_expr.hpp"

namespace kernelgen {

/// K(x, x) together with dK/dtheta_i for every hyperparameter, in
/// hyperparam_vector order.
struct GramDerivatives {
  Eigen::MatrixXd value;
  std::vector<Eigen::MatrixXd> partials;
};

GramDerivatives gram_derivatives(const KernelExpr& expr, const Eigen::VectorXd& x);

/// Log marginal likelihood of y under K(x, x) + noise I and its gradient
///   dL/dtheta = tr((a a^T - A^-1) dK/dtheta) / 2,   a = A^-1 y.
struct LmlGradient {
  double value;
  Eigen::VectorXd kernel;  // with respect to each hyperparameter
  double noise;            // with respect to the noise variance
};

LmlGradient lml_gradient(const KernelExpr& expr, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y, double noise_variance);

}  // namespace kernelgen

#endif  // KERNELGEN_GRADIENTS_HPP
