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

#ifndef KERNELGEN_POSTERIOR_HPP
#define KERNELGEN_POSTERIOR_HPP

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "kernelgen/cholesky.hpp"
#include "kernelgen/dataset.hpp"
#include "kernelgen/errors.hpp"
#include "kernelgen/hyperparams.hpp"
#include "kernelgen/kernels.hpp"

namespace kernelgen {

/// y* | X*, X, y ~ N(mean, covariance), with chol * chol^T = covariance + jitter I.
template <typename Scalar>
struct PosteriorGaussian {
  Vector<Scalar> mean;
  Matrix<Scalar> covariance;
  Matrix<Scalar> chol;
  Scalar jitter = 0;        // added to covariance before factorizing
  Scalar train_jitter = 0;  // added to K(X,X) + noise I before factorizing
};

/// Conditions the GP prior with kernel `expr` on (train_x, train_y) and
/// returns the Gaussian over test_x:
///   mean = K(X,X*)^T (K(X,X) + noise I)^-1 y
///   cov  = K(X*,X*) - K(X,X*)^T (K(X,X) + noise I)^-1 K(X,X*)
/// Both solves go through the Cholesky factor; no inverse is formed.
template <typename Scalar>
PosteriorGaussian<Scalar> posterior(const KernelExpr& expr, const Vector<Scalar>& train_x,
                                    const Vector<Scalar>& train_y, const Vector<Scalar>& test_x,
                                    Scalar noise_variance) {
  if (train_x.size() < 1 || test_x.size() < 1) {
    throw InvalidDataset("posterior needs at least one training and one test point");
  }
  Matrix<Scalar> k_train = gram(expr, train_x);
  k_train.diagonal().array() += noise_variance;
  const auto train = cholesky(k_train);
  const auto L = train.lower.template triangularView<Eigen::Lower>();

  const Matrix<Scalar> k_cross = gram(expr, train_x, test_x);
  const Matrix<Scalar> k_test = gram(expr, test_x);

  Vector<Scalar> alpha = L.solve(train_y);
  L.transpose().solveInPlace(alpha);
  const Matrix<Scalar> v = L.solve(k_cross);

  PosteriorGaussian<Scalar> post;
  post.mean = k_cross.transpose() * alpha;
  post.covariance = k_test - v.transpose() * v;
  post.covariance = (Scalar(0.5) * (post.covariance + post.covariance.transpose())).eval();
  post.train_jitter = train.jitter;

  JitterPolicy policy;
  Scalar prior_scale = k_test.diagonal().cwiseAbs().mean();
  if (prior_scale > Scalar(0)) policy.scale = static_cast<double>(prior_scale);
  auto factor = cholesky(post.covariance, policy);
  post.chol = std::move(factor.lower);
  post.jitter = factor.jitter;
  return post;
}

template <typename Scalar = double>
PosteriorGaussian<Scalar> posterior(const KernelExpr& expr, const TimeSeriesDataset& data,
                                    double noise_variance) {
  return posterior<Scalar>(expr, data.train_times().template cast<Scalar>(),
                           data.train_values().template cast<Scalar>(),
                           data.test_times().template cast<Scalar>(), Scalar(noise_variance));
}

/// log N(y | 0, K + noise I) = -y^T a / 2 - sum log L_ii - n/2 log 2 pi
template <typename Scalar>
Scalar log_marginal_likelihood(const KernelExpr& expr, const Vector<Scalar>& x,
                               const Vector<Scalar>& y, Scalar noise_variance) {
  using std::log;
  if (x.size() < 1) throw InvalidDataset("log marginal likelihood needs data");
  Matrix<Scalar> k = gram(expr, x);
  k.diagonal().array() += noise_variance;
  const auto factor = cholesky(k);
  const auto L = factor.lower.template triangularView<Eigen::Lower>();
  const Vector<Scalar> half = L.solve(y);
  return Scalar(-0.5) * half.squaredNorm() - factor.lower.diagonal().array().log().sum() -
         Scalar(0.5) * Scalar(x.size()) * log(Scalar(2) * std::numbers::pi_v<Scalar>);
}

template <typename Scalar = double>
Scalar log_marginal_likelihood(const KernelExpr& expr, const TimeSeriesDataset& data,
                               double noise_variance) {
  return log_marginal_likelihood<Scalar>(expr, data.train_times().template cast<Scalar>(),
                                         data.train_values().template cast<Scalar>(),
                                         Scalar(noise_variance));
}

/// Number of fitted parameters charged by BIC: every kernel hyperparameter
/// plus the noise variance.
inline std::size_t bic_parameter_count(const KernelExpr& expr) {
  return hyperparam_count(expr) + 1;
}

/// -2 LML + p log N1. Lower is better.
inline double bic(double lml, std::size_t parameter_count, Eigen::Index n_train) {
  return -2.0 * lml + static_cast<double>(parameter_count) * std::log(static_cast<double>(n_train));
}

inline double bic(const KernelExpr& expr, const TimeSeriesDataset& data, double noise_variance) {
  return bic(log_marginal_likelihood(expr, data, noise_variance), bic_parameter_count(expr),
             data.n_train());
}

}  // namespace kernelgen

#endif  // KERNELGEN_POSTERIOR_HPP
