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

#ifndef KERNELGEN_DESCRIBE_HPP
#define KERNELGEN_DESCRIBE_HPP

#include <string>

#include "kernelgen/kernel_expr.hpp"

namespace kernelgen {

/// Short English phrase for a kernel, built from a fixed lexicon:
/// SE * LIN -> "a smooth function with linearly (LIN) increasing amplitude".
std::string describe(const KernelExpr& expr);

}  // namespace kernelgen

#endif  // KERNELGEN_DESCRIBE_HPP
