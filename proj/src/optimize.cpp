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

#include "kernelgen/optimize.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <random>

#include "kernelgen/errors.hpp"
#include "kernelgen/gradients.hpp"
#include "kernelgen/hyperparams.hpp"

namespace kernelgen {

namespace {

using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

LbfgsResult run_lbfgs(const Objective& f, VectorXd x, const LbfgsOptions& opt) {
  VectorXd g(x.size());
  double fx = f(x, g);
  LbfgsResult result{x, fx, 0, false};
  if (!std::isfinite(fx) || !g.allFinite()) return result;

  std::deque<VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  VectorXd g_new(x.size());
  for (int iter = 0; iter < opt.max_iters; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() <= opt.gradient_tol) {
      result.converged = true;
      break;
    }
    // two-loop recursion
    VectorXd d = -g;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t i = s_hist.size(); i-- > 0;) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(d);
      d -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(d);
      d += (alpha[i] - beta) * s_hist[i];
    }
    double slope = g.dot(d);
    if (!(slope < 0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -g;
      slope = -g.squaredNorm();
    }
    double step = s_hist.empty() ? std::min(1.0, 1.0 / g.lpNorm<Eigen::Infinity>()) : 1.0;

    bool accepted = false;
    VectorXd x_new;
    double f_new = kInf;
    for (int k = 0; k < 40; ++k, step *= 0.5) {
      x_new = x + step * d;
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && g_new.allFinite() && f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    const VectorXd s = x_new - x;
    const VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      if (static_cast<int>(s_hist.size()) == opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
    }
    const double decrease = fx - f_new;
    x = std::move(x_new);
    fx = f_new;
    g = g_new;
    result.iterations = iter + 1;
    if (decrease <= opt.relative_tol * std::max(1.0, std::abs(fx))) {
      result.converged = true;
      break;
    }
  }
  result.x = std::move(x);
  result.value = fx;
  return result;
}

// Unconstrained coordinates u <-> hyperparameters theta (+ noise).
class Transform {
 public:
  Transform(const std::vector<Hyperparam>& params, bool learn_noise)
      : params_(params), learn_noise_(learn_noise) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      Kind k = params[i].domain == ParamDomain::positive ? Kind::log : Kind::identity;
      if (params[i].name == "end") k = Kind::window_end;
      kinds_.push_back(k);
    }
  }

  Eigen::Index size() const {
    return static_cast<Eigen::Index>(params_.size()) + (learn_noise_ ? 1 : 0);
  }

  VectorXd to_unconstrained(const std::vector<double>& theta, double noise) const {
    VectorXd u(size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
      switch (kinds_[i]) {
        case Kind::log:
          u(idx(i)) = std::log(theta[i]);
          break;
        case Kind::identity:
          u(idx(i)) = theta[i];
          break;
        case Kind::window_end:
          u(idx(i)) = std::log(theta[i] - theta[i - 1]);
          break;
      }
    }
    if (learn_noise_) u(size() - 1) = std::log(std::max(noise - kNoiseFloor, 1e-300));
    return u;
  }

  // Returns false when u leaves the region where exp stays well scaled.
  bool to_constrained(const VectorXd& u, std::vector<double>& theta, double& noise) const {
    theta.resize(params_.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double v = u(idx(i));
      if (kinds_[i] != Kind::identity && std::abs(v) > 40) return false;
      switch (kinds_[i]) {
        case Kind::log:
          theta[i] = std::exp(v);
          break;
        case Kind::identity:
          theta[i] = v;
          break;
        case Kind::window_end:
          theta[i] = theta[i - 1] + std::exp(v);
          if (!(theta[i] > theta[i - 1])) return false;
          break;
      }
    }
    if (learn_noise_) {
      const double v = u(size() - 1);
      if (std::abs(v) > 40) return false;
      noise = kNoiseFloor + std::exp(v);
    }
    return true;
  }

  // Chain rule from d/dtheta (and d/dnoise) to d/du.
  VectorXd pull_back(const VectorXd& u, const std::vector<double>& theta, const VectorXd& d_theta,
                     double d_noise) const {
    VectorXd g(size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
      switch (kinds_[i]) {
        case Kind::log:
          g(idx(i)) = d_theta(idx(i)) * theta[i];
          break;
        case Kind::identity:
          g(idx(i)) = d_theta(idx(i));
          break;
        case Kind::window_end:
          g(idx(i)) = d_theta(idx(i)) * (theta[i] - theta[i - 1]);
          g(idx(i - 1)) += d_theta(idx(i));  // the end moves with the start
          break;
      }
    }
    if (learn_noise_) g(size() - 1) = d_noise * std::exp(u(size() - 1));
    return g;
  }

 private:
  enum class Kind { log, identity, window_end };
  static Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

  std::vector<Hyperparam> params_;
  std::vector<Kind> kinds_;
  bool learn_noise_;
};

struct DataScales {
  double t_min, t_max, range, y_var;
};

DataScales data_scales(const TimeSeriesDataset& data) {
  const VectorXd t = data.train_times();
  const VectorXd y = data.train_values();
  const double range = std::max(t(t.size() - 1) - t(0), 1e-12);
  const double var = std::max((y.array() - y.mean()).square().mean(), 1e-12);
  return {t(0), t(t.size() - 1), range, var};
}

std::vector<double> random_start(const std::vector<Hyperparam>& params, const DataScales& s,
                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](double scale) { return scale * std::pow(10.0, -2.0 + 4.0 * unit(rng)); };
  std::vector<double> theta(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    const bool periodic = i + 1 < params.size() && params[i + 1].path == p.path &&
                          params[i + 1].name == "period";
    const bool linear = i + 1 < params.size() && params[i + 1].path == p.path &&
                        params[i + 1].name == "offset";
    if (p.name == "variance") {
      theta[i] = log_uniform(linear ? s.y_var / (s.range * s.range) : s.y_var);
    } else if (p.name == "lengthscale") {
      theta[i] = log_uniform(periodic ? 1.0 : s.range);  // PER's lengthscale is dimensionless
    } else if (p.name == "period") {
      theta[i] = log_uniform(s.range);
    } else if (p.name == "steepness") {
      theta[i] = log_uniform(0.1 * s.range);
    } else if (p.name == "end") {
      theta[i] = theta[i - 1] + (s.t_max - theta[i - 1]) * (0.05 + 0.95 * unit(rng));
    } else if (p.name == "start") {
      theta[i] = s.t_min + 0.9 * s.range * unit(rng);
    } else {  // offset, location
      theta[i] = s.t_min + s.range * unit(rng);
    }
  }
  return theta;
}

}  // namespace

LbfgsResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0, const LbfgsOptions& options) {
  return run_lbfgs(f, std::move(x0), options);
}

FitResult optimize_hyperparams(const KernelExpr& expr, const TimeSeriesDataset& data,
                               const NoiseModel& noise, const OptimizeConfig& config) {
  if (data.n_train() < 2) throw InvalidDataset("optimization needs at least two training points");
  if (config.restarts < 1) throw OptimizationFailed("restarts must be at least 1");
  if (!(noise.variance >= 0)) throw OptimizationFailed("noise variance must be non-negative");
  if (!config.resample.empty() && config.resample.size() != hyperparam_count(expr))
    throw OptimizationFailed("resample mask does not match the hyperparameter count");

  const VectorXd x = data.train_times();
  const VectorXd y = data.train_values();
  const auto params = hyperparam_vector(expr);
  const Transform transform(params, noise.learn);
  const DataScales scales = data_scales(data);

  const Objective negative_lml = [&](const VectorXd& u, VectorXd& grad) {
    std::vector<double> theta;
    double nv = noise.variance;
    if (!transform.to_constrained(u, theta, nv)) return kInf;
    try {
      const auto candidate = with_hyperparams(expr, theta);
      const auto g = lml_gradient(candidate, x, y, nv);
      grad = -transform.pull_back(u, theta, g.kernel, g.noise);
      return -g.value;
    } catch (const Error&) {
      return kInf;
    }
  };

  std::vector<double> initial;
  for (const auto& p : params) initial.push_back(p.value);
  const double initial_noise = noise.learn ? std::max(noise.variance, kNoiseFloor * 2) : noise.variance;

  std::optional<FitResult> best;
  for (int r = 0; r < config.restarts; ++r) {
    std::vector<double> start = initial;
    double start_noise = initial_noise;
    if (r > 0) {
      std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                        static_cast<std::uint32_t>(config.seed >> 32),
                        static_cast<std::uint32_t>(r)};
      std::mt19937_64 rng(seq);
      const auto drawn = random_start(params, scales, rng);
      for (std::size_t i = 0; i < start.size(); ++i)
        if (config.resample.empty() || config.resample[i]) start[i] = drawn[i];
      // a redrawn end must stay past a kept start
      for (std::size_t i = 1; i < start.size(); ++i)
        if (params[i].name == "end" && !(start[i] > start[i - 1]))
          start[i] = start[i - 1] + (drawn[i] - drawn[i - 1]);
      if (noise.learn && config.resample.empty()) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        start_noise = scales.y_var * std::pow(10.0, -3.0 + 3.0 * unit(rng));
      }
    }
    LbfgsOptions opt;
    opt.max_iters = config.max_iters;
    opt.relative_tol = 1e-9;
    const auto res = run_lbfgs(negative_lml, transform.to_unconstrained(start, start_noise), opt);
    if (!std::isfinite(res.value)) continue;

    FitResult fit{expr, start_noise, -res.value};
    if (res.iterations == 0) {
      // keep the exact starting values rather than their log round-trip
      fit.expr = with_hyperparams(expr, start);
    } else {
      std::vector<double> theta;
      double nv = noise.variance;
      transform.to_constrained(res.x, theta, nv);
      fit.expr = with_hyperparams(expr, theta);
      fit.noise_variance = nv;
    }
    if (!best || fit.lml > best->lml) best = std::move(fit);
  }
  if (!best) throw OptimizationFailed("no restart reached a finite log marginal likelihood");
  return *best;
}

}  // namespace kernelgen
