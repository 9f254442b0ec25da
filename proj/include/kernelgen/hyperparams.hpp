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

#ifndef KERNELGEN_HYPERPARAMS_HPP
#define KERNELGEN_HYPERPARAMS_HPP

#include <span>
#include <string>
#include <vector>

#include "kernelgen/kernel_expr.hpp"

namespace kernelgen {

enum class ParamDomain { positive, real };

struct Hyperparam {
  std::string path;  // child indices from the root, e.g. "/0/1"; "" is the root
  std::string name;  // "variance", "lengthscale", "location", ...
  double value;
  ParamDomain domain;
};

/// Pre-order enumeration: a node's own parameters come before its children's.
/// Arities: WN 1, C 1, LIN 2, SE 2, PER 3, CP 2, CW 3, sigmoid 2.
std::vector<Hyperparam> hyperparam_vector(const KernelExpr& expr);

std::size_t hyperparam_count(const KernelExpr& expr);

/// Rebuilds `expr` with values taken in hyperparam_vector order.
/// Throws InvalidKernel if the count differs or a value leaves its domain.
KernelExpr with_hyperparams(const KernelExpr& expr, std::span<const double> values);

}  // namespace kernelgen

#endif  // KERNELGEN_HYPERPARAMS_HPP
