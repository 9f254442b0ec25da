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

#include "kernelgen/algebra.hpp"

#include <cmath>
#include <optional>

#include "kernelgen/errors.hpp"
#include "kernelgen/kernels.hpp"

namespace kernelgen {

namespace {

using Leaf = std::variant<BaseKernel, SigmoidFactor>;
using LeafProduct = std::vector<Leaf>;

KernelExpr weighted(std::vector<SigmoidFactor> weights, const KernelExpr& kernel) {
  std::vector<KernelExpr> factors;
  for (const auto& w : weights) factors.push_back(KernelExpr::sigmoid(w));
  factors.push_back(kernel);
  return KernelExpr::product(std::move(factors));
}

// Sum of products of leaves, in left-to-right order.
std::vector<LeafProduct> distribute(const KernelExpr& expr) {
  return std::visit(
      overloaded{
          [](const BaseKernel& b) { return std::vector<LeafProduct>{{Leaf{b}}}; },
          [](const SigmoidFactor& f) { return std::vector<LeafProduct>{{Leaf{f}}}; },
          [](const KernelExpr::Sum& s) {
            std::vector<LeafProduct> out;
            for (const auto& t : s.terms) {
              auto part = distribute(t);
              out.insert(out.end(), part.begin(), part.end());
            }
            return out;
          },
          [](const KernelExpr::Product& p) {
            std::vector<LeafProduct> acc{{}};
            for (const auto& f : p.factors) {
              const auto part = distribute(f);
              std::vector<LeafProduct> next;
              next.reserve(acc.size() * part.size());
              for (const auto& left : acc) {
                for (const auto& right : part) {
                  LeafProduct merged = left;
                  merged.insert(merged.end(), right.begin(), right.end());
                  next.push_back(std::move(merged));
                }
              }
              acc = std::move(next);
            }
            return acc;
          },
          [](const KernelExpr::ChangePoint&) -> std::vector<LeafProduct> {
            throw InvalidKernel("distribute called on unexpanded change point");
          },
          [](const KernelExpr::ChangeWindow&) -> std::vector<LeafProduct> {
            throw InvalidKernel("distribute called on unexpanded change window");
          },
      },
      expr.node().value);
}

ProductTerm normalize(const LeafProduct& leaves) {
  double scale = 1.0;
  std::optional<double> white;
  std::optional<SquaredExp> se;
  std::vector<Periodic> periodic;
  ProductTerm term{Constant{1.0}, {}, {}};

  for (const auto& leaf : leaves) {
    if (const auto* f = std::get_if<SigmoidFactor>(&leaf)) {
      term.sigmoid_factors.push_back(*f);
      continue;
    }
    std::visit(overloaded{
                   [&](const Constant& k) { scale *= k.variance; },
                   [&](const WhiteNoise& k) { white = white ? *white * k.variance : k.variance; },
                   [&](const SquaredExp& k) {
                     if (!se) {
                       se = k;
                       return;
                     }
                     // exp(-d^2/2a^2) exp(-d^2/2b^2) = exp(-d^2/2c^2), c^-2 = a^-2 + b^-2
                     const double inv = 1.0 / (se->lengthscale * se->lengthscale) +
                                        1.0 / (k.lengthscale * k.lengthscale);
                     se = SquaredExp{se->variance * k.variance, 1.0 / std::sqrt(inv)};
                   },
                   [&](const Periodic& k) { periodic.push_back(k); },
                   [&](const Linear& k) { term.lin_factors.push_back(k); },
               },
               std::get<BaseKernel>(leaf));
  }

  if (white) {
    double variance = *white * scale;
    if (se) variance *= se->variance;
    for (const auto& p : periodic) variance *= p.variance;
    term.core = WhiteNoise{variance};
  } else if (se) {
    se->variance *= scale;
    term.core = SmoothPeriodic{*se, std::move(periodic)};
  } else if (!periodic.empty()) {
    periodic.front().variance *= scale;
    term.core = PeriodicProduct{std::move(periodic)};
  } else if (!term.lin_factors.empty()) {
    term.lin_factors.front().variance *= scale;
    term.core = Constant{1.0};
  } else {
    term.core = Constant{scale};
  }
  return term;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

bool close(const Periodic& a, const Periodic& b, double tol) {
  return close(a.variance, b.variance, tol) && close(a.lengthscale, b.lengthscale, tol) &&
         close(a.period, b.period, tol);
}

bool close(const std::vector<Periodic>& a, const std::vector<Periodic>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!close(a[i], b[i], tol)) return false;
  return true;
}

}  // namespace

KernelExpr expand_changes(const KernelExpr& expr) {
  if (!has_changes(expr)) return expr;
  return std::visit(
      overloaded{
          [&](const BaseKernel&) { return expr; },
          [&](const SigmoidFactor&) { return expr; },
          [](const KernelExpr::Sum& s) {
            std::vector<KernelExpr> terms;
            for (const auto& t : s.terms) terms.push_back(expand_changes(t));
            return KernelExpr::sum(std::move(terms));
          },
          [](const KernelExpr::Product& p) {
            std::vector<KernelExpr> factors;
            for (const auto& f : p.factors) factors.push_back(expand_changes(f));
            return KernelExpr::product(std::move(factors));
          },
          [](const KernelExpr::ChangePoint& c) {
            const SigmoidFactor before{c.location, c.steepness, Orientation::rising};
            const SigmoidFactor after{c.location, c.steepness, Orientation::falling};
            return KernelExpr::sum({weighted({before}, expand_changes(c.left)),
                                    weighted({after}, expand_changes(c.right))});
          },
          [](const KernelExpr::ChangeWindow& c) {
            const SigmoidFactor before_start{c.start, c.steepness, Orientation::rising};
            const SigmoidFactor after_start{c.start, c.steepness, Orientation::falling};
            const SigmoidFactor before_end{c.end, c.steepness, Orientation::rising};
            const SigmoidFactor after_end{c.end, c.steepness, Orientation::falling};
            const KernelExpr outside = expand_changes(c.outside);
            return KernelExpr::sum({weighted({before_start}, outside),
                                    weighted({after_start, before_end}, expand_changes(c.inside)),
                                    weighted({after_start, after_end}, outside)});
          },
      },
      expr.node().value);
}

CanonicalKernel simplify(const KernelExpr& expr) {
  CanonicalKernel canon;
  for (const auto& product : distribute(expand_changes(expr)))
    canon.terms.push_back(normalize(product));
  return canon;
}

KernelExpr to_expr(const ProductTerm& term) {
  std::vector<KernelExpr> factors;
  std::visit(overloaded{
                 [&](const WhiteNoise& k) { factors.push_back(KernelExpr::base(k)); },
                 [&](const Constant& k) {
                   // C{1} left behind after folding the scale into a LIN factor
                   const bool implicit_unit = k.variance == 1.0 && !term.lin_factors.empty();
                   if (!implicit_unit) factors.push_back(KernelExpr::base(k));
                 },
                 [&](const PeriodicProduct& k) {
                   for (const auto& p : k.factors) factors.push_back(KernelExpr::base(p));
                 },
                 [&](const SmoothPeriodic& k) {
                   factors.push_back(KernelExpr::base(k.se));
                   for (const auto& p : k.factors) factors.push_back(KernelExpr::base(p));
                 },
             },
             term.core);
  for (const auto& l : term.lin_factors) factors.push_back(KernelExpr::base(l));
  for (const auto& s : term.sigmoid_factors) factors.push_back(KernelExpr::sigmoid(s));
  if (factors.size() == 1) return factors.front();
  return KernelExpr::product(std::move(factors));
}

KernelExpr to_expr(const CanonicalKernel& canon) {
  if (canon.terms.empty()) throw InvalidKernel("canonical kernel has no terms");
  if (canon.terms.size() == 1) return to_expr(canon.terms.front());
  std::vector<KernelExpr> terms;
  for (const auto& t : canon.terms) terms.push_back(to_expr(t));
  return KernelExpr::sum(std::move(terms));
}

bool in_normal_form(const ProductTerm& term) {
  try {
    const bool core_ok =
        std::visit(overloaded{
                       [](const WhiteNoise& k) {
                         validate(BaseKernel{k});
                         return true;
                       },
                       [](const Constant& k) {
                         validate(BaseKernel{k});
                         return true;
                       },
                       [](const PeriodicProduct& k) {
                         for (const auto& p : k.factors) validate(BaseKernel{p});
                         return !k.factors.empty();
                       },
                       [](const SmoothPeriodic& k) {
                         validate(BaseKernel{k.se});
                         for (const auto& p : k.factors) validate(BaseKernel{p});
                         return true;
                       },
                   },
                   term.core);
    for (const auto& l : term.lin_factors) validate(BaseKernel{l});
    for (const auto& s : term.sigmoid_factors) validate(s);
    return core_ok;
  } catch (const InvalidKernel&) {
    return false;
  }
}

bool approx_equal(const ProductTerm& a, const ProductTerm& b, double tol) {
  if (a.core.index() != b.core.index()) return false;
  const bool core_close = std::visit(
      overloaded{
          [&](const WhiteNoise& k) {
            return close(k.variance, std::get<WhiteNoise>(b.core).variance, tol);
          },
          [&](const Constant& k) {
            return close(k.variance, std::get<Constant>(b.core).variance, tol);
          },
          [&](const PeriodicProduct& k) {
            return close(k.factors, std::get<PeriodicProduct>(b.core).factors, tol);
          },
          [&](const SmoothPeriodic& k) {
            const auto& o = std::get<SmoothPeriodic>(b.core);
            return close(k.se.variance, o.se.variance, tol) &&
                   close(k.se.lengthscale, o.se.lengthscale, tol) && close(k.factors, o.factors, tol);
          },
      },
      a.core);
  if (!core_close) return false;
  if (a.lin_factors.size() != b.lin_factors.size()) return false;
  for (std::size_t i = 0; i < a.lin_factors.size(); ++i) {
    if (!close(a.lin_factors[i].variance, b.lin_factors[i].variance, tol) ||
        !close(a.lin_factors[i].offset, b.lin_factors[i].offset, tol))
      return false;
  }
  if (a.sigmoid_factors.size() != b.sigmoid_factors.size()) return false;
  for (std::size_t i = 0; i < a.sigmoid_factors.size(); ++i) {
    const auto& x = a.sigmoid_factors[i];
    const auto& y = b.sigmoid_factors[i];
    if (x.orientation != y.orientation || !close(x.location, y.location, tol) ||
        !close(x.steepness, y.steepness, tol))
      return false;
  }
  return true;
}

std::set<BaseKind> base_kinds(const CanonicalKernel& canon) {
  std::set<BaseKind> kinds;
  for (const auto& t : canon.terms) {
    std::visit(overloaded{
                   [&](const WhiteNoise&) { kinds.insert(BaseKind::wn); },
                   [&](const Constant& k) {
                     if (!(k.variance == 1.0 && !t.lin_factors.empty()))
                       kinds.insert(BaseKind::c);
                   },
                   [&](const PeriodicProduct&) { kinds.insert(BaseKind::per); },
                   [&](const SmoothPeriodic& k) {
                     kinds.insert(BaseKind::se);
                     if (!k.factors.empty()) kinds.insert(BaseKind::per);
                   },
               },
               t.core);
    if (!t.lin_factors.empty()) kinds.insert(BaseKind::lin);
  }
  return kinds;
}

bool has_sigmoids(const CanonicalKernel& canon) {
  for (const auto& t : canon.terms)
    if (!t.sigmoid_factors.empty()) return true;
  return false;
}

bool numeric_equiv(const KernelExpr& e1, const KernelExpr& e2, std::span<const double> grid,
                   double tol) {
  if (grid.empty()) throw InvalidKernel("numeric_equiv needs a non-empty grid");
  // Extended precision keeps evaluation rounding well below tol even when
  // deep products reach entries of order 1e9.
  const Vector<long double> x =
      Eigen::Map<const Vector<double>>(grid.data(), static_cast<Eigen::Index>(grid.size()))
          .cast<long double>();
  const Matrix<long double> diff = gram(e1, x) - gram(e2, x);
  return diff.cwiseAbs().maxCoeff() <= static_cast<long double>(tol);
}

}  // namespace kernelgen
