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

#ifndef KERNELGEN_TESTS_SUPPORT_ORACLES_HPP
#define KERNELGEN_TESTS_SUPPORT_ORACLES_HPP

#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "kernelgen/kernels.hpp"
#include "support/random_kernels.hpp"

namespace kernelgen::testing {

/// Posterior and LML through an explicit long-double inverse. Takes the
/// training jitter the Cholesky route reported so both solve the same system.
struct DenseOracle {
  Vector<long double> mean;
  Matrix<long double> covariance;
  long double lml;
};

inline DenseOracle dense_oracle(const KernelExpr& e, const Vector<double>& x,
                                const Vector<double>& y, const Vector<double>& xs, double noise,
                                double train_jitter) {
  using LD = long double;
  const Vector<LD> xl = x.cast<LD>(), yl = y.cast<LD>(), sl = xs.cast<LD>();
  Matrix<LD> a = gram(e, xl);
  a.diagonal().array() += LD(noise) + LD(train_jitter);
  const Eigen::FullPivLU<Matrix<LD>> lu(a);
  const Matrix<LD> inv = lu.inverse();
  const Matrix<LD> kc = gram(e, xl, sl);
  DenseOracle out;
  out.mean = kc.transpose() * (inv * yl);
  out.covariance = gram(e, sl) - kc.transpose() * inv * kc;
  LD logdet = 0;
  const Matrix<LD> lu_u = lu.matrixLU().template triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < a.rows(); ++i) logdet += std::log(std::abs(lu_u(i, i)));
  out.lml = -0.5L * yl.dot(inv * yl) - 0.5L * logdet -
            0.5L * LD(x.size()) * std::log(2.0L * std::numbers::pi_v<LD>);
  return out;
}

struct PosteriorInstance {
  KernelExpr expr;
  Vector<double> x, y, xs;
  double noise;
};

inline double condition_number(const Matrix<double>& m) {
  Eigen::SelfAdjointEigenSolver<Matrix<double>> eig(m, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  return lo > 0 ? eig.eigenvalues().maxCoeff() / lo : INFINITY;
}

/// Random instance whose K(X,X) + noise I has condition number at most
/// `max_condition`; badly conditioned draws are rejected because neither the
/// Cholesky route nor the explicit inverse is accurate to 1e-8 there.
inline PosteriorInstance random_instance(RandomKernels& gen, int depth, double max_condition,
                                         int* rejected = nullptr) {
  for (;;) {
    PosteriorInstance inst{gen.expr(depth), {}, {}, {}, gen.integer(0, 1) ? 0.1 : 0.0};
    const auto n = gen.integer(1, 20), ns = gen.integer(1, 5);
    const auto g = gen.grid(n, -3, 3);
    inst.x = Eigen::Map<const Vector<double>>(g.data(), n);
    const auto gs = gen.grid(ns, -4, 4);
    inst.xs = Eigen::Map<const Vector<double>>(gs.data(), ns);
    inst.y.resize(n);
    for (auto& v : inst.y) v = gen.uniform(-2, 2);
    Matrix<double> a = gram(inst.expr, inst.x);
    a.diagonal().array() += inst.noise;
    if (condition_number(a) <= max_condition) return inst;
    if (rejected) ++*rejected;
  }
}

/// max |a - b| / max(|b|_inf, floor)
template <typename A, typename B>
double relative_error(const A& a, const B& b, double floor) {
  const double diff = static_cast<double>((a.template cast<long double>() - b).cwiseAbs().maxCoeff());
  const double scale = std::max(static_cast<double>(b.cwiseAbs().maxCoeff()), floor);
  return diff / scale;
}

}  // namespace kernelgen::testing

#endif  // KERNELGEN_TESTS_SUPPORT_ORACLES_HPP
