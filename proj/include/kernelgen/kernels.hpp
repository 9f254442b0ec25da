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

#ifndef KERNELGEN_KERNELS_HPP
#define KERNELGEN_KERNELS_HPP

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "kernelgen/bessel.hpp"
#include "kernelgen/kernel_expr.hpp"

namespace kernelgen {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Precomputed constants of the periodic kernel. The printed form
///   sigma^2 (exp(cos(r)/l^2) - I0(1/l^2)) / (exp(1/l^2) - I0(1/l^2))
/// is divided through by exp(1/l^2), which leaves
///   sigma^2 (expm1(a (cos r - 1)) - m) / (-m),   a = 1/l^2, m = exp(-a) I0(a) - 1
/// and never overflows.
template <typename Scalar>
struct PeriodicConstants {
  Scalar variance;
  Scalar inv_l2;
  Scalar omega;  // 2 pi / period
  Scalar i0e_m1;

  explicit PeriodicConstants(const Periodic& k)
      : variance(k.variance),
        inv_l2(Scalar(1) / (Scalar(k.lengthscale) * Scalar(k.lengthscale))),
        omega(Scalar(2) * std::numbers::pi_v<Scalar> / Scalar(k.period)),
        i0e_m1(bessel::i0e_minus_one(inv_l2)) {}

  Scalar operator()(Scalar x, Scalar xp) const {
    using std::cos;
    using std::expm1;
    const Scalar c = cos(omega * (x - xp));
    return variance * (expm1(inv_l2 * (c - Scalar(1))) - i0e_m1) / (-i0e_m1);
  }
};

template <typename Scalar>
Scalar eval_base(const BaseKernel& params, Scalar x, Scalar xp) {
  using std::exp;
  return std::visit(overloaded{
                        [&](const WhiteNoise& k) -> Scalar {
                          return x == xp ? Scalar(k.variance) : Scalar(0);
                        },
                        [&](const Constant& k) -> Scalar { return Scalar(k.variance); },
                        [&](const Linear& k) -> Scalar {
                          return Scalar(k.variance) * (x - Scalar(k.offset)) *
                                 (xp - Scalar(k.offset));
                        },
                        [&](const SquaredExp& k) -> Scalar {
                          const Scalar d = (x - xp) / Scalar(k.lengthscale);
                          return Scalar(k.variance) * exp(-d * d / Scalar(2));
                        },
                        [&](const Periodic& k) -> Scalar {
                          return PeriodicConstants<Scalar>(k)(x, xp);
                        },
                    },
                    params);
}

/// 0.5 (1 + tanh((location - x) / steepness)) for rising, one minus that for falling.
template <typename Scalar>
Scalar eval_sigmoid(const SigmoidFactor& f, Scalar x) {
  using std::tanh;
  const Scalar t = tanh((Scalar(f.location) - x) / Scalar(f.steepness));
  return f.orientation == Orientation::rising ? Scalar(0.5) * (Scalar(1) + t)
                                              : Scalar(0.5) * (Scalar(1) - t);
}

/// Weights of the three regions of a change window: `outside` applies with
/// `before` ahead of `start` and with `after` past `end`, `inside` between.
template <typename Scalar>
struct WindowWeights {
  Scalar before;
  Scalar inside;
  Scalar after;
};

template <typename Scalar>
WindowWeights<Scalar> window_weights(const KernelExpr::ChangeWindow& cw, Scalar x) {
  const Scalar s_start = eval_sigmoid(SigmoidFactor{cw.start, cw.steepness}, x);
  const Scalar s_end = eval_sigmoid(SigmoidFactor{cw.end, cw.steepness}, x);
  return {s_start, (Scalar(1) - s_start) * s_end, (Scalar(1) - s_start) * (Scalar(1) - s_end)};
}

/// Pointwise recursive evaluation k(x, x').
template <typename Scalar>
Scalar eval(const KernelExpr& expr, Scalar x, Scalar xp) {
  return std::visit(
      overloaded{
          [&](const BaseKernel& b) { return eval_base(b, x, xp); },
          [&](const KernelExpr::Sum& s) {
            Scalar acc(0);
            for (const auto& t : s.terms) acc += eval(t, x, xp);
            return acc;
          },
          [&](const KernelExpr::Product& p) {
            Scalar acc(1);
            for (const auto& f : p.factors) acc *= eval(f, x, xp);
            return acc;
          },
          [&](const KernelExpr::ChangePoint& c) {
            const SigmoidFactor f{c.location, c.steepness};
            const Scalar a = eval_sigmoid(f, x);
            const Scalar b = eval_sigmoid(f, xp);
            return a * eval(c.left, x, xp) * b +
                   (Scalar(1) - a) * eval(c.right, x, xp) * (Scalar(1) - b);
          },
          [&](const KernelExpr::ChangeWindow& c) {
            const auto u = window_weights(c, x);
            const auto v = window_weights(c, xp);
            return u.inside * v.inside * eval(c.inside, x, xp) +
                   (u.before * v.before + u.after * v.after) * eval(c.outside, x, xp);
          },
          [&](const SigmoidFactor& f) { return eval_sigmoid(f, x) * eval_sigmoid(f, xp); },
      },
      expr.node().value);
}

namespace detail {

template <typename Scalar, typename Fn>
Matrix<Scalar> fill(const Vector<Scalar>& rows, const Vector<Scalar>& cols, Fn&& fn) {
  Matrix<Scalar> m(rows.size(), cols.size());
  for (Eigen::Index j = 0; j < cols.size(); ++j)
    for (Eigen::Index i = 0; i < rows.size(); ++i) m(i, j) = fn(rows(i), cols(j));
  return m;
}

template <typename Scalar>
Matrix<Scalar> base_gram(const BaseKernel& params, const Vector<Scalar>& rows,
                         const Vector<Scalar>& cols) {
  using std::exp;
  return std::visit(
      overloaded{
          [&](const WhiteNoise& k) {
            return fill(rows, cols, [v = Scalar(k.variance)](Scalar a, Scalar b) {
              return a == b ? v : Scalar(0);
            });
          },
          [&](const Constant& k) -> Matrix<Scalar> {
            return Matrix<Scalar>::Constant(rows.size(), cols.size(), Scalar(k.variance));
          },
          [&](const Linear& k) -> Matrix<Scalar> {
            const Vector<Scalar> r = rows.array() - Scalar(k.offset);
            const Vector<Scalar> c = cols.array() - Scalar(k.offset);
            return (r * c.transpose()) * Scalar(k.variance);
          },
          [&](const SquaredExp& k) {
            const Scalar scale = Scalar(-0.5) / (Scalar(k.lengthscale) * Scalar(k.lengthscale));
            return fill(rows, cols, [v = Scalar(k.variance), scale](Scalar a, Scalar b) {
              const Scalar d = a - b;
              return v * exp(scale * d * d);
            });
          },
          [&](const Periodic& k) { return fill(rows, cols, PeriodicConstants<Scalar>(k)); },
      },
      params);
}

template <typename Scalar>
Vector<Scalar> sigmoid_vector(const SigmoidFactor& f, const Vector<Scalar>& x) {
  return x.unaryExpr([&](Scalar v) { return eval_sigmoid(f, v); });
}

}  // namespace detail

/// Cross-Gram matrix K(rows, cols). Sums become matrix sums and products
/// become Hadamard products; CP and CW are evaluated from their definitions.
template <typename Scalar>
Matrix<Scalar> gram(const KernelExpr& expr, const Vector<Scalar>& rows, const Vector<Scalar>& cols) {
  return std::visit(
      overloaded{
          [&](const BaseKernel& b) { return detail::base_gram(b, rows, cols); },
          [&](const KernelExpr::Sum& s) {
            Matrix<Scalar> acc = gram(s.terms.front(), rows, cols);
            for (std::size_t i = 1; i < s.terms.size(); ++i) acc += gram(s.terms[i], rows, cols);
            return acc;
          },
          [&](const KernelExpr::Product& p) {
            Matrix<Scalar> acc = gram(p.factors.front(), rows, cols);
            for (std::size_t i = 1; i < p.factors.size(); ++i)
              acc.array() *= gram(p.factors[i], rows, cols).array();
            return acc;
          },
          [&](const KernelExpr::ChangePoint& c) -> Matrix<Scalar> {
            const SigmoidFactor f{c.location, c.steepness};
            const Vector<Scalar> sr = detail::sigmoid_vector(f, rows);
            const Vector<Scalar> sc = detail::sigmoid_vector(f, cols);
            const Vector<Scalar> tr = Scalar(1) - sr.array();
            const Vector<Scalar> tc = Scalar(1) - sc.array();
            return (sr * sc.transpose()).cwiseProduct(gram(c.left, rows, cols)) +
                   (tr * tc.transpose()).cwiseProduct(gram(c.right, rows, cols));
          },
          [&](const KernelExpr::ChangeWindow& c) -> Matrix<Scalar> {
            Vector<Scalar> rb(rows.size()), ri(rows.size()), ra(rows.size());
            Vector<Scalar> cb(cols.size()), ci(cols.size()), ca(cols.size());
            for (Eigen::Index i = 0; i < rows.size(); ++i) {
              const auto w = window_weights(c, rows(i));
              rb(i) = w.before;
              ri(i) = w.inside;
              ra(i) = w.after;
            }
            for (Eigen::Index j = 0; j < cols.size(); ++j) {
              const auto w = window_weights(c, cols(j));
              cb(j) = w.before;
              ci(j) = w.inside;
              ca(j) = w.after;
            }
            const Matrix<Scalar> outside_weight = rb * cb.transpose() + ra * ca.transpose();
            return (ri * ci.transpose()).cwiseProduct(gram(c.inside, rows, cols)) +
                   outside_weight.cwiseProduct(gram(c.outside, rows, cols));
          },
          [&](const SigmoidFactor& f) -> Matrix<Scalar> {
            return detail::sigmoid_vector(f, rows) * detail::sigmoid_vector(f, cols).transpose();
          },
      },
      expr.node().value);
}

template <typename Scalar>
Matrix<Scalar> gram(const KernelExpr& expr, const Vector<Scalar>& grid) {
  return gram(expr, grid, grid);
}

}  // namespace kernelgen

#endif  // KERNELGEN_KERNELS_HPP
