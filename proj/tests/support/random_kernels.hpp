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

#ifndef KERNELGEN_TESTS_RANDOM_KERNELS_HPP
#define KERNELGEN_TESTS_RANDOM_KERNELS_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "kernelgen/kernel_expr.hpp"

namespace kernelgen::testing {

// Random valid parseable expressions for property tests. Depth 1 is a single
// base kernel; each extra level may add a sum, product, CP or CW node.
class RandomKernels {
 public:
  explicit RandomKernels(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  BaseKernel base() {
    switch (integer(0, 4)) {
      case 0:
        return WhiteNoise{log_uniform(0.1, 10)};
      case 1:
        return Constant{log_uniform(0.1, 10)};
      case 2:
        return Linear{log_uniform(0.1, 10), uniform(-2, 2)};
      case 3:
        return SquaredExp{log_uniform(0.1, 10), log_uniform(0.3, 3)};
      default:
        return Periodic{log_uniform(0.1, 10), log_uniform(0.3, 3), log_uniform(0.5, 5)};
    }
  }

  KernelExpr expr(int depth) {
    if (depth <= 1 || integer(0, 3) == 0) return KernelExpr::base(base());
    switch (integer(0, 3)) {
      case 0:
        return KernelExpr::sum(children(depth - 1));
      case 1:
        return KernelExpr::product(children(depth - 1));
      case 2:
        return KernelExpr::change_point(expr(depth - 1), expr(depth - 1), uniform(-3, 3),
                                        log_uniform(0.2, 2));
      default: {
        const double start = uniform(-3, 2);
        return KernelExpr::change_window(expr(depth - 1), expr(depth - 1), start,
                                         start + uniform(0.2, 3), log_uniform(0.2, 2));
      }
    }
  }

  std::vector<double> grid(int n, double lo, double hi) {
    std::vector<double> g(n);
    for (auto& v : g) v = uniform(lo, hi);
    std::sort(g.begin(), g.end());
    return g;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::vector<KernelExpr> children(int depth) {
    std::vector<KernelExpr> out;
    const int n = integer(2, 3);
    for (int i = 0; i < n; ++i) out.push_back(expr(depth));
    return out;
  }

  std::mt19937_64 rng_;
};

inline std::vector<double> uniform_grid(int n, double lo, double hi) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

}  // namespace kernelgen::testing

#endif  // KERNELGEN_TESTS_RANDOM_KERNELS_HPP
