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

#include "kernelgen/describe.hpp"

#include <cstdio>
#include <vector>

namespace kernelgen {

namespace {

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string noun(BaseKind kind) {
  switch (kind) {
    case BaseKind::se:
      return "a smooth function";
    case BaseKind::per:
      return "a periodic function";
    case BaseKind::wn:
      return "uncorrelated noise";
    case BaseKind::c:
      return "a constant";
    case BaseKind::lin:
      return "a linear function";
  }
  return {};
}

std::string amplitude_modifier(std::size_t lin_count) {
  if (lin_count == 1) return "with linearly (LIN) increasing amplitude";
  return "with polynomially increasing amplitude (degree " + std::to_string(lin_count) + ")";
}

std::string phrase(const KernelExpr& expr, bool nested);

std::string product_phrase(const KernelExpr::Product& p) {
  std::vector<std::string> nouns;
  std::vector<std::string> modifiers;
  std::size_t lins = 0;
  for (const auto& f : p.factors) {
    if (const auto* base = f.as<BaseKernel>(); base && std::holds_alternative<Linear>(*base)) {
      ++lins;
    } else if (const auto* s = f.as<SigmoidFactor>()) {
      modifiers.push_back(std::string(s->orientation == Orientation::rising ? "before " : "after ") +
                          short_number(s->location));
    } else {
      nouns.push_back(phrase(f, true));
    }
  }
  std::string out;
  if (nouns.empty()) {
    out = lins == 1 ? noun(BaseKind::lin) : "a polynomial of degree " + std::to_string(lins);
  } else {
    for (std::size_t i = 0; i < nouns.size(); ++i) {
      if (i) out += " times ";
      out += nouns[i];
    }
    if (lins) out += " " + amplitude_modifier(lins);
  }
  for (const auto& m : modifiers) out += ", " + m;
  return out;
}

std::string phrase(const KernelExpr& expr, bool nested) {
  return std::visit(
      overloaded{
          [](const BaseKernel& b) { return noun(kind_of(b)); },
          [&](const KernelExpr::Sum& s) {
            std::string out;
            for (std::size_t i = 0; i < s.terms.size(); ++i) {
              if (i) out += " plus ";
              out += phrase(s.terms[i], false);
            }
            return nested ? "(" + out + ")" : out;
          },
          [](const KernelExpr::Product& p) { return product_phrase(p); },
          [](const KernelExpr::ChangePoint& c) {
            return phrase(c.left, true) + " then " + phrase(c.right, true) +
                   ", with a change at " + short_number(c.location);
          },
          [](const KernelExpr::ChangeWindow& c) {
            return phrase(c.inside, true) + " inside and " + phrase(c.outside, true) +
                   " outside, with a change between " + short_number(c.start) + " and " +
                   short_number(c.end);
          },
          [](const SigmoidFactor& s) {
            return std::string("a weight that is active ") +
                   (s.orientation == Orientation::rising ? "before " : "after ") +
                   short_number(s.location);
          },
      },
      expr.node().value);
}

}  // namespace

std::string describe(const KernelExpr& expr) { return phrase(expr, false); }

}  // namespace kernelgen
