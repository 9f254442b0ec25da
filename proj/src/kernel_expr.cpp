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

#include "kernelgen/kernel_expr.hpp"

#include <cmath>
#include <string>

#include "kernelgen/errors.hpp"
#include "kernelgen/format.hpp"

namespace kernelgen {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidKernel(std::string(what) + " must be positive and finite, got " +
                        format_shortest(value));
  }
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw InvalidKernel(std::string(what) + " must be finite");
  }
}

}  // namespace

BaseKind kind_of(const BaseKernel& base) {
  return static_cast<BaseKind>(base.index());
}

std::string_view kind_name(BaseKind kind) {
  switch (kind) {
    case BaseKind::wn:
      return "WN";
    case BaseKind::c:
      return "C";
    case BaseKind::lin:
      return "LIN";
    case BaseKind::se:
      return "SE";
    case BaseKind::per:
      return "PER";
  }
  return "?";
}

bool is_stationary(const BaseKernel& base) {
  return !std::holds_alternative<Linear>(base);
}

double stationary_diagonal(const BaseKernel& base) {
  return std::visit(overloaded{
                        [](const Linear&) -> double {
                          throw InvalidKernel("LIN has no constant diagonal");
                        },
                        [](const auto& k) -> double { return k.variance; },
                    },
                    base);
}

void validate(const BaseKernel& base) {
  std::visit(overloaded{
                 [](const WhiteNoise& k) { require_positive(k.variance, "WN variance"); },
                 [](const Constant& k) { require_positive(k.variance, "C variance"); },
                 [](const Linear& k) {
                   require_positive(k.variance, "LIN variance");
                   require_finite(k.offset, "LIN offset");
                 },
                 [](const SquaredExp& k) {
                   require_positive(k.variance, "SE variance");
                   require_positive(k.lengthscale, "SE lengthscale");
                 },
                 [](const Periodic& k) {
                   require_positive(k.variance, "PER variance");
                   require_positive(k.lengthscale, "PER lengthscale");
                   require_positive(k.period, "PER period");
                 },
             },
             base);
}

void validate(const SigmoidFactor& factor) {
  require_finite(factor.location, "sigmoid location");
  require_positive(factor.steepness, "sigmoid steepness");
}

KernelExpr KernelExpr::base(BaseKernel params) {
  validate(params);
  return KernelExpr(std::make_shared<const ExprNode>(ExprNode{std::move(params)}));
}

KernelExpr KernelExpr::sum(std::vector<KernelExpr> terms) {
  if (terms.size() < 2) throw InvalidKernel("sum needs at least two terms");
  return KernelExpr(std::make_shared<const ExprNode>(ExprNode{Sum{std::move(terms)}}));
}

KernelExpr KernelExpr::product(std::vector<KernelExpr> factors) {
  if (factors.size() < 2) throw InvalidKernel("product needs at least two factors");
  return KernelExpr(std::make_shared<const ExprNode>(ExprNode{Product{std::move(factors)}}));
}

KernelExpr KernelExpr::change_point(KernelExpr left, KernelExpr right, double location,
                                    double steepness) {
  require_finite(location, "CP location");
  require_positive(steepness, "CP steepness");
  return KernelExpr(std::make_shared<const ExprNode>(
      ExprNode{ChangePoint{std::move(left), std::move(right), location, steepness}}));
}

KernelExpr KernelExpr::change_window(KernelExpr inside, KernelExpr outside, double start,
                                     double end, double steepness) {
  require_finite(start, "CW start");
  require_finite(end, "CW end");
  require_positive(steepness, "CW steepness");
  if (!(start < end)) {
    throw InvalidKernel("CW start must be less than end");
  }
  return KernelExpr(std::make_shared<const ExprNode>(
      ExprNode{ChangeWindow{std::move(inside), std::move(outside), start, end, steepness}}));
}

KernelExpr KernelExpr::sigmoid(SigmoidFactor factor) {
  validate(factor);
  return KernelExpr(std::make_shared<const ExprNode>(ExprNode{factor}));
}

bool KernelExpr::operator==(const KernelExpr& other) const {
  if (node_ == other.node_) return true;
  const auto& a = node_->value;
  const auto& b = other.node_->value;
  if (a.index() != b.index()) return false;
  return std::visit(
      overloaded{
          [&](const BaseKernel& x) { return x == std::get<BaseKernel>(b); },
          [&](const Sum& x) { return x.terms == std::get<Sum>(b).terms; },
          [&](const Product& x) { return x.factors == std::get<Product>(b).factors; },
          [&](const ChangePoint& x) {
            const auto& y = std::get<ChangePoint>(b);
            return x.location == y.location && x.steepness == y.steepness && x.left == y.left &&
                   x.right == y.right;
          },
          [&](const ChangeWindow& x) {
            const auto& y = std::get<ChangeWindow>(b);
            return x.start == y.start && x.end == y.end && x.steepness == y.steepness &&
                   x.inside == y.inside && x.outside == y.outside;
          },
          [&](const SigmoidFactor& x) { return x == std::get<SigmoidFactor>(b); },
      },
      a);
}

bool has_changes(const KernelExpr& expr) {
  return std::visit(overloaded{
                        [](const BaseKernel&) { return false; },
                        [](const SigmoidFactor&) { return false; },
                        [](const KernelExpr::Sum& s) {
                          for (const auto& t : s.terms)
                            if (has_changes(t)) return true;
                          return false;
                        },
                        [](const KernelExpr::Product& p) {
                          for (const auto& f : p.factors)
                            if (has_changes(f)) return true;
                          return false;
                        },
                        [](const KernelExpr::ChangePoint&) { return true; },
                        [](const KernelExpr::ChangeWindow&) { return true; },
                    },
                    expr.node().value);
}

std::size_t node_count(const KernelExpr& expr) {
  return std::visit(overloaded{
                        [](const BaseKernel&) -> std::size_t { return 1; },
                        [](const SigmoidFactor&) -> std::size_t { return 1; },
                        [](const KernelExpr::Sum& s) {
                          std::size_t n = 1;
                          for (const auto& t : s.terms) n += node_count(t);
                          return n;
                        },
                        [](const KernelExpr::Product& p) {
                          std::size_t n = 1;
                          for (const auto& f : p.factors) n += node_count(f);
                          return n;
                        },
                        [](const KernelExpr::ChangePoint& c) {
                          return 1 + node_count(c.left) + node_count(c.right);
                        },
                        [](const KernelExpr::ChangeWindow& c) {
                          return 1 + node_count(c.inside) + node_count(c.outside);
                        },
                    },
                    expr.node().value);
}

}  // namespace kernelgen
