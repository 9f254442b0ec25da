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

#ifndef KERNELGEN_CHOLESKY_HPP
#define KERNELGEN_CHOLESKY_HPP

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "kernelgen/errors.hpp"
#include "kernelgen/kernels.hpp"

namespace kernelgen {

/// Diagonal inflation tried in order, as multiples of `scale` (defaults to
/// the mean of the matrix diagonal).
struct JitterPolicy {
  std::array<double, 5> ladder{0.0, 1e-10, 1e-8, 1e-6, 1e-4};
  std::optional<double> scale;
};

template <typename Scalar>
struct CholeskyFactor {
  Matrix<Scalar> lower;
  Scalar jitter;  // absolute diagonal inflation that succeeded
};

/// Lower-triangular L with L L^T = m + jitter I for the first rung of the
/// ladder that factorizes. An exactly zero matrix factors as L = 0.
/// Throws NotPositiveDefinite when every rung fails.
template <typename Scalar>
CholeskyFactor<Scalar> cholesky(const Matrix<Scalar>& m, const JitterPolicy& policy = {}) {
  using std::abs;
  using std::isfinite;
  if (m.rows() != m.cols()) throw NotPositiveDefinite("cholesky of a non-square matrix");
  const Eigen::Index n = m.rows();
  if (!m.allFinite()) throw NotPositiveDefinite("matrix has non-finite entries");
  if (n > 0 && m.isZero(0)) return {Matrix<Scalar>::Zero(n, n), Scalar(0)};

  Scalar scale = policy.scale ? Scalar(*policy.scale) : m.diagonal().mean();
  if (!(scale > Scalar(0))) scale = m.diagonal().cwiseAbs().mean();
  if (!(scale > Scalar(0))) scale = Scalar(1);

  for (double rung : policy.ladder) {
    const Scalar jitter = Scalar(rung) * scale;
    Matrix<Scalar> shifted = m;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Matrix<Scalar>> llt(shifted);
    if (llt.info() != Eigen::Success) continue;
    Matrix<Scalar> lower = llt.matrixL();
    if (!lower.allFinite() || (lower.diagonal().array() <= Scalar(0)).any()) continue;
    return {std::move(lower), jitter};
  }
  throw NotPositiveDefinite("matrix of size " + std::to_string(n) +
                            " is not positive definite even with jitter");
}

}  // namespace kernelgen

#endif  // KERNELGEN_CHOLESKY_HPP
