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

#ifndef KERNELGEN_KERNEL_EXPR_HPP
#define KERNELGEN_KERNEL_EXPR_HPP

#include <memory>
#include <string_view>
#include <variant>
#include <vector>

namespace kernelgen {

// Base kernel hyperparameters. Variances are in signal units squared,
// lengthscales/periods/offsets in time units (PER's lengthscale is
// dimensionless, it sits inside the exponent).

struct WhiteNoise {
  double variance = 1.0;
  bool operator==(const WhiteNoise&) const = default;
};

struct Constant {
  double variance = 1.0;
  bool operator==(const Constant&) const = default;
};

/// sigma^2 (x - offset)(x' - offset)
struct Linear {
  double variance = 1.0;
  double offset = 0.0;
  bool operator==(const Linear&) const = default;
};

struct SquaredExp {
  double variance = 1.0;
  double lengthscale = 1.0;
  bool operator==(const SquaredExp&) const = default;
};

struct Periodic {
  double variance = 1.0;
  double lengthscale = 1.0;
  double period = 1.0;
  bool operator==(const Periodic&) const = default;
};

using BaseKernel = std::variant<WhiteNoise, Constant, Linear, SquaredExp, Periodic>;

enum class BaseKind { wn, c, lin, se, per };

BaseKind kind_of(const BaseKernel& base);
std::string_view kind_name(BaseKind kind);

bool is_stationary(const BaseKernel& base);
/// k(x, x) for a stationary base kernel; throws InvalidKernel for LIN.
double stationary_diagonal(const BaseKernel& base);

/// `rising` is the tanh sigmoid 0.5 * (1 + tanh((location - x) / steepness)),
/// which is close to one before `location`; `falling` is its complement.
enum class Orientation { rising, falling };

struct SigmoidFactor {
  double location = 0.0;
  double steepness = 1.0;
  Orientation orientation = Orientation::rising;
  bool operator==(const SigmoidFactor&) const = default;
};

struct ExprNode;

/// Immutable compositional kernel expression. Copies share structure, so a
/// KernelExpr is cheap to pass by value and safe to read from many threads.
class KernelExpr {
 public:
  struct Sum;
  struct Product;
  struct ChangePoint;
  struct ChangeWindow;

  static KernelExpr base(BaseKernel params);
  static KernelExpr sum(std::vector<KernelExpr> terms);
  static KernelExpr product(std::vector<KernelExpr> factors);
  /// sigma(x) left sigma(x') + (1 - sigma(x)) right (1 - sigma(x')).
  static KernelExpr change_point(KernelExpr left, KernelExpr right, double location,
                                 double steepness = 1.0);
  /// `inside` on [start, end], `outside` elsewhere. Evaluated as
  ///   b(x) outside b(x') + w(x) inside w(x') + a(x) outside a(x')
  /// with w = (1 - s_start) s_end, b = s_start, a = (1 - s_start)(1 - s_end)
  /// and s the rising sigmoid; this equals CP(outside, CP(inside, outside))
  /// with the two locations at start and end.
  static KernelExpr change_window(KernelExpr inside, KernelExpr outside, double start,
                                  double end, double steepness = 1.0);
  /// The rank-one weighting kernel s(x) s(x') produced by expanding CP/CW.
  static KernelExpr sigmoid(SigmoidFactor factor);

  const ExprNode& node() const { return *node_; }

  template <typename T>
  const T* as() const;

  bool operator==(const KernelExpr& other) const;

 private:
  explicit KernelExpr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  std::shared_ptr<const ExprNode> node_;
};

struct KernelExpr::Sum {
  std::vector<KernelExpr> terms;
};

struct KernelExpr::Product {
  std::vector<KernelExpr> factors;
};

struct KernelExpr::ChangePoint {
  KernelExpr left;
  KernelExpr right;
  double location;
  double steepness;
};

struct KernelExpr::ChangeWindow {
  KernelExpr inside;
  KernelExpr outside;
  double start;
  double end;
  double steepness;
};

struct ExprNode {
  using Variant = std::variant<BaseKernel, KernelExpr::Sum, KernelExpr::Product,
                               KernelExpr::ChangePoint, KernelExpr::ChangeWindow, SigmoidFactor>;
  Variant value;
};

template <typename T>
const T* KernelExpr::as() const {
  return std::get_if<T>(&node_->value);
}

/// Throws InvalidKernel when a hyperparameter is out of its domain.
void validate(const BaseKernel& base);
void validate(const SigmoidFactor& factor);

/// True if the tree contains CP or CW nodes.
bool has_changes(const KernelExpr& expr);

/// Number of nodes; used to bound random generation and search.
std::size_t node_count(const KernelExpr& expr);

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace kernelgen

#endif  // KERNELGEN_KERNEL_EXPR_HPP
