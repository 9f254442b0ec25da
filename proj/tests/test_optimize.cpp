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

#include <cmath>
#include <random>

#include "doctest.h"
#include "kernelgen/cholesky.hpp"
#include "kernelgen/gradients.hpp"
#include "kernelgen/hyperparams.hpp"
#include "kernelgen/optimize.hpp"
#include "kernelgen/parse.hpp"
#include "kernelgen/posterior.hpp"
#include "support/random_kernels.hpp"

using namespace kernelgen;
using Eigen::VectorXd;

namespace {

std::vector<double> values_of(const KernelExpr& e) {
  std::vector<double> v;
  for (const auto& h : hyperparam_vector(e)) v.push_back(h.value);
  return v;
}

// One draw from GP(0, k) on x plus white noise.
VectorXd draw_gp(const KernelExpr& k, const VectorXd& x, double noise, std::uint64_t seed) {
  Eigen::MatrixXd cov = gram(k, x);
  cov.diagonal().array() += noise;
  const auto L = cholesky(cov).lower;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0, 1);
  VectorXd e(x.size());
  for (auto& v : e) v = z(rng);
  return L * e;
}

bool close_rel(double a, double b, double rel, double abs_floor) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

}  // namespace

TEST_CASE("L-BFGS minimizes the Rosenbrock function") {
  const Objective rosen = [](const VectorXd& x, VectorXd& g) {
    g.resize(2);
    g(0) = -2 * (1 - x(0)) - 400 * x(0) * (x(1) - x(0) * x(0));
    g(1) = 200 * (x(1) - x(0) * x(0));
    return (1 - x(0)) * (1 - x(0)) + 100 * (x(1) - x(0) * x(0)) * (x(1) - x(0) * x(0));
  };
  LbfgsOptions opt;
  opt.relative_tol = 0;
  opt.gradient_tol = 1e-9;
  const auto r = minimize_lbfgs(rosen, VectorXd::Constant(2, -1.2), opt);
  CHECK(r.converged);
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gram derivatives match central differences") {
  testing::RandomKernels gen(61);
  const double h = 1e-5;
  for (int i = 0; i < 60; ++i) {
    const auto e = gen.expr(3);
    const auto g = gen.grid(8, -3, 3);
    const VectorXd x = Eigen::Map<const VectorXd>(g.data(), 8);
    const auto d = gram_derivatives(e, x);
    const auto params = hyperparam_vector(e);
    REQUIRE(d.partials.size() == params.size());
    CHECK((d.value - gram(e, x)).cwiseAbs().maxCoeff() <= 1e-12);
    const auto base = values_of(e);
    for (std::size_t p = 0; p < params.size(); ++p) {
      // log-space step for positive parameters, plain step otherwise
      const bool positive = params[p].domain == ParamDomain::positive;
      auto at = [&](double t) {
        auto v = base;
        v[p] = positive ? base[p] * std::exp(t) : base[p] + t;
        return gram(with_hyperparams(e, v), x);
      };
      const Eigen::MatrixXd fd = (at(h) - at(-h)) / (2 * h);
      const Eigen::MatrixXd analytic = positive ? Eigen::MatrixXd(d.partials[p] * base[p]) : d.partials[p];
      INFO(render(e) << " param " << params[p].path << ":" << params[p].name);
      const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
      CHECK((fd - analytic).cwiseAbs().maxCoeff() <= 1e-4 * scale);
    }
  }
}

TEST_CASE("LML gradient matches central differences in log space") {
  testing::RandomKernels gen(67);
  const double h = 1e-5;
  const char* shapes[] = {"SE", "PER", "LIN", "SE * LIN", "PER + SE", "LIN * PER + WN", "SE * PER"};
  int checked = 0;
  for (int i = 0; i < 40; ++i) {
    auto e = parse(shapes[i % 7]);
    std::vector<double> v;
    for (const auto& p : hyperparam_vector(e)) {
      if (p.name == "offset") v.push_back(gen.uniform(-1, 1));
      else if (p.name == "period") v.push_back(gen.log_uniform(1, 4));
      else v.push_back(gen.log_uniform(0.5, 2));
    }
    e = with_hyperparams(e, v);
    const auto g = gen.grid(15, 0, 6);
    const VectorXd x = Eigen::Map<const VectorXd>(g.data(), 15);
    VectorXd y(15);
    for (auto& yy : y) yy = gen.uniform(-1, 1);
    const double noise = gen.log_uniform(0.05, 0.5);
    const auto grad = lml_gradient(e, x, y, noise);
    CHECK(grad.value == doctest::Approx(log_marginal_likelihood(e, x, y, noise)).epsilon(1e-12));
    const auto params = hyperparam_vector(e);
    for (std::size_t p = 0; p < params.size(); ++p) {
      const bool positive = params[p].domain == ParamDomain::positive;
      auto lml_at = [&](double t) {
        auto w = v;
        w[p] = positive ? v[p] * std::exp(t) : v[p] + t;
        return log_marginal_likelihood(with_hyperparams(e, w), x, y, noise);
      };
      const double fd = (lml_at(h) - lml_at(-h)) / (2 * h);
      const double analytic = positive ? grad.kernel(p) * v[p] : grad.kernel(p);
      INFO(render(e) << " " << params[p].name);
      CHECK(close_rel(analytic, fd, 1e-4, 1e-7));
      ++checked;
    }
    const double fd_noise = (log_marginal_likelihood(e, x, y, noise * std::exp(h)) -
                             log_marginal_likelihood(e, x, y, noise * std::exp(-h))) /
                            (2 * h);
    CHECK(close_rel(grad.noise * noise, fd_noise, 1e-4, 1e-7));
  }
  CHECK(checked > 80);
}

TEST_CASE("max_iters = 0 returns the initial hyperparameters") {
  const VectorXd t = VectorXd::LinSpaced(20, 0, 19);
  const VectorXd y = t.array().sin();
  const auto data = TimeSeriesDataset::with_test_suffix(t, y, 2);
  const auto e = parse("SE[variance=1.7, lengthscale=0.3] + PER[period=6.1]");
  OptimizeConfig cfg;
  cfg.restarts = 1;
  cfg.max_iters = 0;
  const auto fit = optimize_hyperparams(e, data, NoiseModel{true, 0.37}, cfg);
  CHECK(fit.expr == e);
  CHECK(fit.noise_variance == 0.37);
  CHECK(fit.lml == doctest::Approx(log_marginal_likelihood(e, data, 0.37)).epsilon(1e-12));
}

TEST_CASE("optimization is deterministic and never worse than the start") {
  const VectorXd t = VectorXd::LinSpaced(40, 0, 10);
  const VectorXd y = (t.array() * 1.3).sin() + 0.2 * t.array();
  const auto data = TimeSeriesDataset::with_test_suffix(t, y, 5);
  const auto e = parse("SE + LIN");
  OptimizeConfig cfg;
  cfg.restarts = 3;
  cfg.seed = 99;
  const auto a = optimize_hyperparams(e, data, NoiseModel{}, cfg);
  const auto b = optimize_hyperparams(e, data, NoiseModel{}, cfg);
  CHECK(a.expr == b.expr);
  CHECK(a.noise_variance == b.noise_variance);
  CHECK(a.lml == b.lml);
  CHECK(a.lml >= log_marginal_likelihood(e, data, 0.1));
  CHECK(a.lml == doctest::Approx(log_marginal_likelihood(a.expr, data, a.noise_variance)).epsilon(1e-12));

  cfg.seed = 100;
  const auto c = optimize_hyperparams(e, data, NoiseModel{}, cfg);
  CHECK(c.lml >= log_marginal_likelihood(e, data, 0.1));
}

TEST_CASE("fixed noise is left untouched") {
  const VectorXd t = VectorXd::LinSpaced(15, 0, 7);
  const VectorXd y = t.array().cos();
  const auto data = TimeSeriesDataset::with_test_suffix(t, y, 3);
  OptimizeConfig cfg;
  cfg.restarts = 2;
  const auto fit = optimize_hyperparams(parse("SE"), data, NoiseModel{false, 0.01}, cfg);
  CHECK(fit.noise_variance == 0.01);
}

TEST_CASE("SE lengthscale is recovered from its own draws") {
  const auto truth = parse("SE[lengthscale=2]");
  const VectorXd t = VectorXd::LinSpaced(80, 0, 30);
  int recovered = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const VectorXd y = draw_gp(truth, t, 1e-4, seed);
    const auto data = TimeSeriesDataset::with_test_suffix(t, y, 1);
    OptimizeConfig cfg;
    cfg.restarts = 3;
    cfg.seed = seed;
    const auto fit = optimize_hyperparams(parse("SE"), data, NoiseModel{true, 0.01}, cfg);
    const double l = fit.expr.as<BaseKernel>() ? std::get<SquaredExp>(*fit.expr.as<BaseKernel>()).lengthscale : 0;
    MESSAGE("seed " << seed << ": lengthscale " << l << ", noise " << fit.noise_variance);
    if (std::abs(l - 2.0) <= 0.5) ++recovered;
  }
  CHECK(recovered == 5);
}

TEST_CASE("BIC prefers SE over WN on a smooth series") {
  const VectorXd t = VectorXd::LinSpaced(50, 0, 10);
  const VectorXd y = t.array().sin();
  const auto data = TimeSeriesDataset::with_test_suffix(t, y, 1);
  OptimizeConfig cfg;
  cfg.restarts = 3;
  const auto se = optimize_hyperparams(parse("SE"), data, NoiseModel{}, cfg);
  const auto wn = optimize_hyperparams(parse("WN"), data, NoiseModel{}, cfg);
  CHECK(bic(se.expr, data, se.noise_variance) < bic(wn.expr, data, wn.noise_variance));
}

TEST_CASE("optimizer input validation") {
  const auto one = TimeSeriesDataset(VectorXd::Constant(1, 0.0), VectorXd::Constant(1, 1.0), 1);
  CHECK_THROWS_AS(optimize_hyperparams(parse("SE"), one, NoiseModel{}, OptimizeConfig{}),
                  InvalidDataset);
}
