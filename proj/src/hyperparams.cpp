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

#include "kernelgen/hyperparams.hpp"

#include "kernelgen/errors.hpp"

namespace kernelgen {

namespace {

void collect(const KernelExpr& expr, const std::string& path, std::vector<Hyperparam>& out) {
  auto pos = [&](const char* name, double v) {
    out.push_back({path, name, v, ParamDomain::positive});
  };
  auto real = [&](const char* name, double v) { out.push_back({path, name, v, ParamDomain::real}); };
  auto child = [&](const KernelExpr& c, std::size_t i) {
    collect(c, path + "/" + std::to_string(i), out);
  };
  std::visit(overloaded{
                 [&](const BaseKernel& base) {
                   std::visit(overloaded{
                                  [&](const WhiteNoise& k) { pos("variance", k.variance); },
                                  [&](const Constant& k) { pos("variance", k.variance); },
                                  [&](const Linear& k) {
                                    pos("variance", k.variance);
                                    real("offset", k.offset);
                                  },
                                  [&](const SquaredExp& k) {
                                    pos("variance", k.variance);
                                    pos("lengthscale", k.lengthscale);
                                  },
                                  [&](const Periodic& k) {
                                    pos("variance", k.variance);
                                    pos("lengthscale", k.lengthscale);
                                    pos("period", k.period);
                                  },
                              },
                              base);
                 },
                 [&](const KernelExpr::Sum& s) {
                   for (std::size_t i = 0; i < s.terms.size(); ++i) child(s.terms[i], i);
                 },
                 [&](const KernelExpr::Product& p) {
                   for (std::size_t i = 0; i < p.factors.size(); ++i) child(p.factors[i], i);
                 },
                 [&](const KernelExpr::ChangePoint& c) {
                   real("location", c.location);
                   pos("steepness", c.steepness);
                   child(c.left, 0);
                   child(c.right, 1);
                 },
                 [&](const KernelExpr::ChangeWindow& c) {
                   real("start", c.start);
                   real("end", c.end);
                   pos("steepness", c.steepness);
                   child(c.inside, 0);
                   child(c.outside, 1);
                 },
                 [&](const SigmoidFactor& f) {
                   real("location", f.location);
                   pos("steepness", f.steepness);
                 },
             },
             expr.node().value);
}

class Rebuilder {
 public:
  explicit Rebuilder(std::span<const double> values) : values_(values) {}

  KernelExpr rebuild(const KernelExpr& expr) {
    return std::visit(
        overloaded{
            [&](const BaseKernel& base) {
              return KernelExpr::base(std::visit(
                  overloaded{
                      [&](const WhiteNoise&) -> BaseKernel { return WhiteNoise{next()}; },
                      [&](const Constant&) -> BaseKernel { return Constant{next()}; },
                      [&](const Linear&) -> BaseKernel {
                        const double v = next();
                        return Linear{v, next()};
                      },
                      [&](const SquaredExp&) -> BaseKernel {
                        const double v = next();
                        return SquaredExp{v, next()};
                      },
                      [&](const Periodic&) -> BaseKernel {
                        const double v = next();
                        const double l = next();
                        return Periodic{v, l, next()};
                      },
                  },
                  base));
            },
            [&](const KernelExpr::Sum& s) {
              std::vector<KernelExpr> terms;
              for (const auto& t : s.terms) terms.push_back(rebuild(t));
              return KernelExpr::sum(std::move(terms));
            },
            [&](const KernelExpr::Product& p) {
              std::vector<KernelExpr> factors;
              for (const auto& f : p.factors) factors.push_back(rebuild(f));
              return KernelExpr::product(std::move(factors));
            },
            [&](const KernelExpr::ChangePoint& c) {
              const double loc = next();
              const double steep = next();
              KernelExpr left = rebuild(c.left);
              KernelExpr right = rebuild(c.right);
              return KernelExpr::change_point(left, right, loc, steep);
            },
            [&](const KernelExpr::ChangeWindow& c) {
              const double start = next();
              const double end = next();
              const double steep = next();
              KernelExpr inside = rebuild(c.inside);
              KernelExpr outside = rebuild(c.outside);
              return KernelExpr::change_window(inside, outside, start, end, steep);
            },
            [&](const SigmoidFactor& f) {
              const double loc = next();
              return KernelExpr::sigmoid({loc, next(), f.orientation});
            },
        },
        expr.node().value);
  }

  bool exhausted() const { return index_ == values_.size(); }

 private:
  double next() {
    if (index_ >= values_.size()) throw InvalidKernel("too few hyperparameter values");
    return values_[index_++];
  }

  std::span<const double> values_;
  std::size_t index_ = 0;
};

}  // namespace

std::vector<Hyperparam> hyperparam_vector(const KernelExpr& expr) {
  std::vector<Hyperparam> out;
  collect(expr, "", out);
  return out;
}

std::size_t hyperparam_count(const KernelExpr& expr) { return hyperparam_vector(expr).size(); }

KernelExpr with_hyperparams(const KernelExpr& expr, std::span<const double> values) {
  Rebuilder r(values);
  KernelExpr out = r.rebuild(expr);
  if (!r.exhausted()) throw InvalidKernel("too many hyperparameter values");
  return out;
}

}  // namespace kernelgen
