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

#ifndef KERNELGEN_ALGEBRA_HPP
#define KERNELGEN_ALGEBRA_HPP

#include <set>
#include <span>
#include <variant>
#include <vector>

#include "kernelgen/kernel_expr.hpp"

namespace kernelgen {

// Cores of a canonical product term; together they form the set
// K = {WN, C, prod PER, SE prod PER}.

struct PeriodicProduct {
  std::vector<Periodic> factors;  // non-empty
  bool operator==(const PeriodicProduct&) const = default;
};

struct SmoothPeriodic {
  SquaredExp se;
  std::vector<Periodic> factors;  // may be empty
  bool operator==(const SmoothPeriodic&) const = default;
};

using KernelCore = std::variant<WhiteNoise, Constant, PeriodicProduct, SmoothPeriodic>;

/// core * prod LIN * prod sigmoid
struct ProductTerm {
  KernelCore core;
  std::vector<Linear> lin_factors;
  std::vector<SigmoidFactor> sigmoid_factors;
  bool operator==(const ProductTerm&) const = default;
};

/// Sum of product terms (grammar G).
struct CanonicalKernel {
  std::vector<ProductTerm> terms;  // non-empty
  bool operator==(const CanonicalKernel&) const = default;
};

/// Replaces every CP/CW node by a sum of products of its children with
/// sigmoid weighting leaves. Returns `expr` itself when it has none.
KernelExpr expand_changes(const KernelExpr& expr);

/// Rewrites into sum-of-products form: distributes products over sums, then
/// within each product merges SE*SE, lets WN absorb stationary factors
/// (variance times k(x,x)) and folds C into the scale of another factor.
/// PER products are kept unmerged; sigmoid factors accumulate untouched.
CanonicalKernel simplify(const KernelExpr& expr);

KernelExpr to_expr(const ProductTerm& term);
KernelExpr to_expr(const CanonicalKernel& canon);

/// True iff the term's core is a member of K and the term respects the
/// normal-form invariants (non-empty PER product, valid parameters).
bool in_normal_form(const ProductTerm& term);

/// Hyperparameter-wise comparison with absolute tolerance.
bool approx_equal(const ProductTerm& a, const ProductTerm& b, double tol);

/// Base-kernel kinds that appear in a canonical kernel.
std::set<BaseKind> base_kinds(const CanonicalKernel& canon);
bool has_sigmoids(const CanonicalKernel& canon);

/// max |gram(e1) - gram(e2)| <= tol on grid x grid, evaluated in long double.
bool numeric_equiv(const KernelExpr& e1, const KernelExpr& e2, std::span<const double> grid,
                   double tol);

}  // namespace kernelgen

#endif  // KERNELGEN_ALGEBRA_HPP
