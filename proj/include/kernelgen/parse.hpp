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

#ifndef KERNELGEN_PARSE_HPP
#define KERNELGEN_PARSE_HPP

#include <optional>
#include <string>
#include <string_view>

#include "kernelgen/kernel_expr.hpp"

namespace kernelgen {

/// Time range of the dataset a kernel is being bound to. When present, CP
/// locations default to the midpoint and CW windows to the middle third.
struct TimeRange {
  double min;
  double max;
};

struct ParseOptions {
  std::optional<TimeRange> data_range;
};

/// Parses kernel text such as "CW(SE + CW(WN + SE, WN), C)" or
/// "SE[variance=2, lengthscale=0.5] * LIN". Throws ParseError.
///
/// Grammar (see docs/kernel_grammar.md):
///   sum     := product ('+' product)*
///   product := atom ('*' atom)*
///   atom    := NAME params? | ('CP' | 'CW') '(' sum ',' sum ')' params? | '(' sum ')'
///   params  := '[' NAME '=' NUMBER (',' NAME '=' NUMBER)* ']'
KernelExpr parse(std::string_view text, const ParseOptions& options = {});

/// Canonical text; hyperparameters are printed only when they differ from
/// the unbound defaults, so parse(render(e)) == e.
std::string render(const KernelExpr& expr);

/// Same as render but with every hyperparameter omitted; a structure key.
std::string render_structure(const KernelExpr& expr);

}  // namespace kernelgen

#endif  // KERNELGEN_PARSE_HPP
