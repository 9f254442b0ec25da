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

#include "kernelgen/gradients.hpp"

#include <cmath>
#include <numbers>

#include "kernelgen/bessel.hpp"
#include "kernelgen/cholesky.hpp"
#include "kernelgen/kernels.hpp"

namespace kernelgen {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// A sigmoid evaluated on the grid with its derivatives in location and steepness.
struct SigmoidGrid {
  VectorXd value, d_location, d_steepness;
};

SigmoidGrid sigmoid_grid(double location, double steepness, Orientation o, const VectorXd& x) {
  const double sign = o == Orientation::rising ? 1.0 : -1.0;
  SigmoidGrid g{VectorXd(x.size()), VectorXd(x.size()), VectorXd(x.size())};
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double u = (location - x(i)) / steepness;
    const double t = std::tanh(u);
    const double half_sech2 = 0.5 * (1.0 - t * t);
    g.value(i) = 0.5 * (1.0 + sign * t);
    g.d_location(i) = sign * half_sech2 / steepness;
    g.d_steepness(i) = -sign * half_sech2 * u / steepness;
  }
  return g;
}

// d(w w^T) given dw
MatrixXd outer_derivative(const VectorXd& w, const VectorXd& dw) {
  return dw * w.transpose() + w * dw.transpose();
}

GramDerivatives base_derivatives(const BaseKernel& base, const VectorXd& x) {
  const Eigen::Index n = x.size();
  GramDerivatives out{gram(KernelExpr::base(base), x), {}};
  std::visit(
      overloaded{
          [&](const WhiteNoise&) {
            MatrixXd d = MatrixXd::Zero(n, n);
            for (Eigen::Index j = 0; j < n; ++j)
              for (Eigen::Index i = 0; i < n; ++i)
                if (x(i) == x(j)) d(i, j) = 1.0;
            out.partials.push_back(std::move(d));
          },
          [&](const Constant&) { out.partials.push_back(MatrixXd::Ones(n, n)); },
          [&](const Linear& k) {
            const VectorXd c = x.array() - k.offset;
            out.partials.push_back(c * c.transpose());
            MatrixXd d(n, n);
            for (Eigen::Index j = 0; j < n; ++j)
              for (Eigen::Index i = 0; i < n; ++i) d(i, j) = -k.variance * (c(i) + c(j));
            out.partials.push_back(std::move(d));
          },
          [&](const SquaredExp& k) {
            out.partials.push_back(out.value / k.variance);
            MatrixXd d(n, n);
            const double l3 = k.lengthscale * k.lengthscale * k.lengthscale;
            for (Eigen::Index j = 0; j < n; ++j)
              for (Eigen::Index i = 0; i < n; ++i) {
                const double r = x(i) - x(j);
                d(i, j) = out.value(i, j) * r * r / l3;
              }
            out.partials.push_back(std::move(d));
          },
          [&](const Periodic& k) {
            // K = s2 (1 - E/m), E = expm1(a (c - 1)), m = i0e(a) - 1, a = l^-2, c = cos(w r)
            const double a = 1.0 / (k.lengthscale * k.lengthscale);
            const double m = bessel::i0e_minus_one(a);
            const double dm = bessel::i1e(a) - bessel::i0e(a);
            const double da_dl = -2.0 * a / k.lengthscale;
            const double w = 2.0 * std::numbers::pi / k.period;
            MatrixXd dl(n, n), dp(n, n);
            for (Eigen::Index j = 0; j < n; ++j)
              for (Eigen::Index i = 0; i < n; ++i) {
                const double r = x(i) - x(j);
                const double c = std::cos(w * r);
                const double ex = std::exp(a * (c - 1.0));
                const double e = std::expm1(a * (c - 1.0));
                const double df_da = -((c - 1.0) * ex * m - e * dm) / (m * m);
                dl(i, j) = k.variance * df_da * da_dl;
                // dE/dp = a ex (-sin(w r) r) (-w / p)
                dp(i, j) = -k.variance / m * a * ex * std::sin(w * r) * r * w / k.period;
              }
            out.partials.push_back(out.value / k.variance);
            out.partials.push_back(std::move(dl));
            out.partials.push_back(std::move(dp));
          },
      },
      base);
  return out;
}

GramDerivatives derivatives(const KernelExpr& expr, const VectorXd& x);

void append(std::vector<MatrixXd>& into, std::vector<MatrixXd>&& from) {
  for (auto& m : from) into.push_back(std::move(m));
}

GramDerivatives product_derivatives(const std::vector<KernelExpr>& factors, const VectorXd& x) {
  std::vector<GramDerivatives> parts;
  for (const auto& f : factors) parts.push_back(derivatives(f, x));
  const std::size_t k = parts.size();
  // others[i] = Hadamard product of all factor values except i
  std::vector<MatrixXd> prefix(k + 1), suffix(k + 1);
  const Eigen::Index n = x.size();
  prefix[0] = MatrixXd::Ones(n, n);
  suffix[k] = MatrixXd::Ones(n, n);
  for (std::size_t i = 0; i < k; ++i) prefix[i + 1] = prefix[i].cwiseProduct(parts[i].value);
  for (std::size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1].cwiseProduct(parts[i].value);
  GramDerivatives out{prefix[k], {}};
  for (std::size_t i = 0; i < k; ++i) {
    const MatrixXd others = prefix[i].cwiseProduct(suffix[i + 1]);
    for (auto& d : parts[i].partials) out.partials.push_back(d.cwiseProduct(others));
  }
  return out;
}

GramDerivatives derivatives(const KernelExpr& expr, const VectorXd& x) {
  return std::visit(
      overloaded{
          [&](const BaseKernel& b) { return base_derivatives(b, x); },
          [&](const KernelExpr::Sum& s) {
            GramDerivatives out = derivatives(s.terms.front(), x);
            for (std::size_t i = 1; i < s.terms.size(); ++i) {
              auto part = derivatives(s.terms[i], x);
              out.value += part.value;
              append(out.partials, std::move(part.partials));
            }
            return out;
          },
          [&](const KernelExpr::Product& p) { return product_derivatives(p.factors, x); },
          [&](const KernelExpr::ChangePoint& c) {
            const auto s = sigmoid_grid(c.location, c.steepness, Orientation::rising, x);
            const VectorXd t = 1.0 - s.value.array();
            auto left = derivatives(c.left, x);
            auto right = derivatives(c.right, x);
            const MatrixXd ws = s.value * s.value.transpose(), wt = t * t.transpose();
            GramDerivatives out{ws.cwiseProduct(left.value) + wt.cwiseProduct(right.value), {}};
            for (const VectorXd* d : {&s.d_location, &s.d_steepness}) {
              const VectorXd dt = -*d;
              out.partials.push_back(outer_derivative(s.value, *d).cwiseProduct(left.value) +
                                     outer_derivative(t, dt).cwiseProduct(right.value));
            }
            for (auto& d : left.partials) out.partials.push_back(ws.cwiseProduct(d));
            for (auto& d : right.partials) out.partials.push_back(wt.cwiseProduct(d));
            return out;
          },
          [&](const KernelExpr::ChangeWindow& c) {
            const auto sa = sigmoid_grid(c.start, c.steepness, Orientation::rising, x);
            const auto sb = sigmoid_grid(c.end, c.steepness, Orientation::rising, x);
            const VectorXd ta = 1.0 - sa.value.array(), tb = 1.0 - sb.value.array();
            const VectorXd before = sa.value;
            const VectorXd inside = ta.cwiseProduct(sb.value);
            const VectorXd after = ta.cwiseProduct(tb);
            auto in = derivatives(c.inside, x);
            auto out_k = derivatives(c.outside, x);
            const MatrixXd w_in = inside * inside.transpose();
            const MatrixXd w_out = before * before.transpose() + after * after.transpose();
            GramDerivatives out{w_in.cwiseProduct(in.value) + w_out.cwiseProduct(out_k.value), {}};

            auto push = [&](const VectorXd& d_before, const VectorXd& d_inside,
                            const VectorXd& d_after) {
              out.partials.push_back(
                  outer_derivative(inside, d_inside).cwiseProduct(in.value) +
                  (outer_derivative(before, d_before) + outer_derivative(after, d_after))
                      .cwiseProduct(out_k.value));
            };
            const VectorXd zero = VectorXd::Zero(x.size());
            // start moves sigma_a only; end moves sigma_b only; steepness moves both
            push(sa.d_location, -sa.d_location.cwiseProduct(sb.value),
                 -sa.d_location.cwiseProduct(tb));
            push(zero, ta.cwiseProduct(sb.d_location), -ta.cwiseProduct(sb.d_location));
            push(sa.d_steepness,
                 -sa.d_steepness.cwiseProduct(sb.value) + ta.cwiseProduct(sb.d_steepness),
                 -sa.d_steepness.cwiseProduct(tb) - ta.cwiseProduct(sb.d_steepness));
            for (auto& d : in.partials) out.partials.push_back(w_in.cwiseProduct(d));
            for (auto& d : out_k.partials) out.partials.push_back(w_out.cwiseProduct(d));
            return out;
          },
          [&](const SigmoidFactor& f) {
            const auto s = sigmoid_grid(f.location, f.steepness, f.orientation, x);
            return GramDerivatives{s.value * s.value.transpose(),
                                   {outer_derivative(s.value, s.d_location),
                                    outer_derivative(s.value, s.d_steepness)}};
          },
      },
      expr.node().value);
}

}  // namespace

GramDerivatives gram_derivatives(const KernelExpr& expr, const Eigen::VectorXd& x) {
  return derivatives(expr, x);
}

LmlGradient lml_gradient(const KernelExpr& expr, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y, double noise_variance) {
  auto g = derivatives(expr, x);
  MatrixXd a = std::move(g.value);
  a.diagonal().array() += noise_variance;
  const auto factor = cholesky(a);
  const auto L = factor.lower.triangularView<Eigen::Lower>();
  VectorXd alpha = L.solve(y);
  const double quad = alpha.squaredNorm();
  L.transpose().solveInPlace(alpha);
  MatrixXd inv = MatrixXd::Identity(x.size(), x.size());
  L.solveInPlace(inv);
  L.transpose().solveInPlace(inv);
  const MatrixXd w = alpha * alpha.transpose() - inv;

  LmlGradient out;
  out.value = -0.5 * quad - factor.lower.diagonal().array().log().sum() -
              0.5 * static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi);
  out.kernel.resize(static_cast<Eigen::Index>(g.partials.size()));
  for (std::size_t i = 0; i < g.partials.size(); ++i)
    out.kernel(static_cast<Eigen::Index>(i)) = 0.5 * w.cwiseProduct(g.partials[i]).sum();
  out.noise = 0.5 * w.trace();
  return out;
}

}  // namespace kernelgen
