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

// Acceptance suite. Each criterion prints one PASS/FAIL line with its
// runtime; a criterion that overruns its time budget fails. Seeds are fixed
// here and were not tuned against the outcome.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "kernelgen/algebra.hpp"
#include "kernelgen/codegen.hpp"
#include "kernelgen/ingest.hpp"
#include "kernelgen/parse.hpp"
#include "kernelgen/posterior.hpp"
#include "kernelgen/sampler.hpp"
#include "kernelgen/search.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_kernels.hpp"
#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"

using namespace kernelgen;
using Eigen::VectorXd;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail.str("");
      detail << "failed: " << what;
    }
  }
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<void(Outcome&)> run;
};

VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// --- 1 ---------------------------------------------------------------------

void posterior_oracle(Outcome& out) {
  testing::RandomKernels gen(1001);
  int rejected = 0;
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const auto inst = testing::random_instance(gen, 3, 1e6, &rejected);
    const auto post = posterior(inst.expr, inst.x, inst.y, inst.xs, inst.noise);
    const auto ref = testing::dense_oracle(inst.expr, inst.x, inst.y, inst.xs, inst.noise,
                                           post.train_jitter);
    const double prior = gram(inst.expr, inst.xs).cwiseAbs().maxCoeff();
    const double mean_err =
        testing::relative_error(post.mean, ref.mean, inst.y.cwiseAbs().maxCoeff());
    const double cov_err = testing::relative_error(post.covariance, ref.covariance, prior);
    const double lml = log_marginal_likelihood(inst.expr, inst.x, inst.y, inst.noise);
    const double lml_err = std::abs(lml - static_cast<double>(ref.lml)) /
                           std::max(1.0, std::abs(static_cast<double>(ref.lml)));
    worst = std::max({worst, mean_err, cov_err, lml_err});
    out.require(mean_err <= 1e-8 && cov_err <= 1e-8 && lml_err <= 1e-8,
                "instance " + std::to_string(i) + ": " + render(inst.expr));
  }
  if (out.ok)
    out.detail << "50 instances, worst relative error " << worst << ", " << rejected
               << " draws with cond > 1e6 redrawn";
}

// --- 2 ---------------------------------------------------------------------

void noiseless_interpolation(Outcome& out) {
  const VectorXd x = VectorXd::LinSpaced(12, 0.0, 11.0);
  const VectorXd y = (0.7 * x.array()).sin() + 0.1 * x.array();
  double worst_mean = 0, worst_var = 0;
  for (const char* text : {"SE", "SE * LIN", "SE * LIN + PER[period=3]", "SE + WN[variance=0.5]",
                           "CP(SE, PER[period=2])[location=5]"}) {
    const auto post = posterior(parse(text), x, y, x, 0.0);
    const double m = (post.mean - y).cwiseAbs().maxCoeff();
    const double v = post.covariance.diagonal().cwiseAbs().maxCoeff();
    worst_mean = std::max(worst_mean, m);
    worst_var = std::max(worst_var, v);
    out.require(m <= 1e-6 && v <= 1e-6, text);
  }
  if (out.ok)
    out.detail << "5 kernels, max |mean - y| " << worst_mean << ", max diag " << worst_var;
}

// --- 3 ---------------------------------------------------------------------

void simplifier_soundness(Outcome& out) {
  const auto grid = testing::uniform_grid(20, -3.0, 3.0);
  testing::RandomKernels gen(3003);
  int terms = 0;
  double largest = 0;
  for (int i = 0; i < 100; ++i) {
    const auto e = gen.expr(4);
    largest = std::max(largest, gram(e, as_vector(grid)).cwiseAbs().maxCoeff());
    const auto canon = simplify(e);
    out.require(numeric_equiv(e, to_expr(canon), grid, 1e-9), "not equivalent: " + render(e));
    for (const auto& t : canon.terms) out.require(in_normal_form(t), "core outside K: " + render(e));
    terms += static_cast<int>(canon.terms.size());
  }
  if (out.ok)
    out.detail << "100 expressions, " << terms << " canonical terms, absolute tolerance 1e-9, "
               << "largest Gram entry " << largest;
}

// --- 4 ---------------------------------------------------------------------

// Entrywise product of the factors' Gram matrices, computed without simplify.
Matrix<double> product_gram(const std::vector<const char*>& factors, const VectorXd& x) {
  Matrix<double> acc = Matrix<double>::Ones(x.size(), x.size());
  for (const char* f : factors) acc.array() *= gram(parse(f), x).array();
  return acc;
}

void rewrite_rules(Outcome& out) {
  const VectorXd x = as_vector(testing::uniform_grid(20, -3.0, 3.0));
  struct Rule {
    std::vector<const char*> factors;
    const char* expected;
  };
  const std::vector<Rule> rules{
      {{"SE", "SE"}, "SE[lengthscale=0.70710678118654746]"},
      {{"SE[variance=2, lengthscale=0.5]", "SE[variance=3, lengthscale=1.5]"}, nullptr},
      {{"WN[variance=2]", "PER[variance=3, lengthscale=0.8, period=1.7]"}, "WN[variance=6]"},
      {{"WN[variance=2]", "SE[variance=7, lengthscale=0.1]"}, "WN[variance=14]"},
      {{"WN", "C[variance=3]"}, "WN[variance=3]"},
      {{"C[variance=4]", "SE[variance=1, lengthscale=2]"}, "SE[variance=4, lengthscale=2]"},
      {{"C[variance=4]", "PER[period=2]"}, "PER[variance=4, period=2]"},
  };
  double worst = 0;
  for (const auto& r : rules) {
    std::vector<KernelExpr> fs;
    std::string label;
    for (const char* f : r.factors) {
      fs.push_back(parse(f));
      label += (label.empty() ? "" : " * ") + std::string(f);
    }
    const auto canon = simplify(KernelExpr::product(fs));
    out.require(canon.terms.size() == 1, label + " is not a single term");
    const double gap = (gram(to_expr(canon), x) - product_gram(r.factors, x)).cwiseAbs().maxCoeff();
    worst = std::max(worst, gap);
    out.require(gap <= 1e-12, label + " differs from the factor product");
    if (r.expected) {
      const auto want = gram(parse(r.expected), x);
      out.require((gram(to_expr(canon), x) - want).cwiseAbs().maxCoeff() <= 1e-12,
                  label + " is not " + r.expected);
    }
  }
  if (out.ok) out.detail << rules.size() << " fixtures, max gap " << worst;
}

// --- 5 ---------------------------------------------------------------------

void psd_property(Outcome& out) {
  testing::RandomKernels gen(5005);
  double lowest = INFINITY;
  for (int i = 0; i < 100; ++i) {
    const auto e = gen.expr(4);
    const Matrix<double> k = gram(e, as_vector(gen.grid(15, -3, 3)));
    Eigen::SelfAdjointEigenSolver<Matrix<double>> eig(k, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    lowest = std::min(lowest, lo);
    out.require(lo >= -1e-8, "negative eigenvalue for " + render(e));
  }
  if (out.ok) out.detail << "100 expressions, lowest eigenvalue " << lowest;
}

// --- 6 ---------------------------------------------------------------------

void sampler_fidelity(Outcome& out) {
  constexpr int kDraws = 50000;
  testing::RandomKernels gen(6006);
  double worst_ratio = 0, worst_cov = 0;
  for (int i = 0; i < 20; ++i) {
    const auto inst = testing::random_instance(gen, 3, 1e6);
    const auto post = posterior(inst.expr, inst.x, inst.y, inst.xs, inst.noise);
    const auto draws = sample_posterior(post, kDraws, 60000 + static_cast<std::uint64_t>(i));

    // chol * chol^T is the covariance plus the posterior's own jitter
    Matrix<double> target = post.covariance;
    target.diagonal().array() += post.jitter;
    const VectorXd mean = draws.colwise().mean().transpose();
    const Matrix<double> centered = draws.rowwise() - mean.transpose();
    const Matrix<double> cov = centered.transpose() * centered / double(kDraws - 1);

    for (Eigen::Index j = 0; j < mean.size(); ++j) {
      const double bound = 3 * std::sqrt(target(j, j) / kDraws);
      const double err = std::abs(mean(j) - post.mean(j));
      const double ratio = bound > 0 ? err / bound : (err == 0 ? 0 : INFINITY);
      worst_ratio = std::max(worst_ratio, ratio);
      out.require(ratio <= 1.0, "mean outside 3 sigma in posterior " + std::to_string(i) + ": " +
                                    render(inst.expr));
    }
    const double norm = target.norm();
    const double cov_err = norm > 0 ? (cov - target).norm() / norm : (cov - target).norm();
    worst_cov = std::max(worst_cov, cov_err);
    out.require(cov_err <= 0.05, "covariance off by more than 5% in posterior " + std::to_string(i));
  }
  out.detail << (out.ok ? "" : "; ") << "20 posteriors x 50000 draws, worst mean error "
             << worst_ratio << " of the bound, worst covariance error " << worst_cov;
}

// --- 7 ---------------------------------------------------------------------

void codegen_structure(Outcome& out) {
  const auto data = testing::monthly_series();
  const auto e = testing::nested_window_kernel();
  out.require(data.n_train() == 120 && data.n_test() == 12, "fixture is not 120/12");
  const auto p =
      emit_program(e, data, EmitOptions{Dialect::stan2, testing::kNestedWindowNoise, {}, {}});

  std::size_t last = 0;
  for (const char* section : {"\nfunctions {", "\ndata {", "\nparameters {",
                              "\ntransformed parameters {", "\nmodel {",
                              "\ngenerated quantities {"}) {
    const auto at = p.rendered.find(section);
    out.require(at != std::string::npos && at > last, std::string("section order at") + section);
    if (at != std::string::npos) last = at;
  }
  for (const char* decl : {"int<lower=1> N1;", "vector[N1] x1;", "vector[N1] y1;",
                           "int<lower=1> N2;", "vector[N2] x2;"})
    out.require(p.data_block.find(decl) != std::string::npos, std::string("missing ") + decl);
  out.require(p.parameters_block.find("vector[N2] z;") != std::string::npos, "missing z[N2]");
  out.require(p.generated_quantities_block.find("vector[N2] y2 = mu + L * z;") != std::string::npos,
              "missing y2 = mu + L * z");

  std::ifstream in(std::string(KERNELGEN_GOLDEN_DIR) + "/nested_window.stan", std::ios::binary);
  std::ostringstream golden;
  golden << in.rdbuf();
  out.require(in.good() || !golden.str().empty(), "golden snapshot missing");
  out.require(golden.str() == p.rendered, "program differs from the golden snapshot");

  const auto r = compare_semantics(p, e, data, testing::kNestedWindowNoise, 50000, 11);
  out.require(r.passed(), "validate_semantics failed");
  out.detail << (out.ok ? "" : "; ") << p.rendered.size()
             << " bytes, golden match; semantics mean ratio " << r.max_mean_ratio
             << ", covariance error " << r.covariance_rel_error;
}

// --- 8 ---------------------------------------------------------------------

void round_trip(Outcome& out) {
  testing::RandomKernels gen(8008);
  for (int i = 0; i < 500; ++i) {
    const auto e = gen.expr(gen.integer(1, 4));
    out.require(parse(render(e)) == e, "round trip lost " + render(e));
  }
  const auto se = KernelExpr::base(SquaredExp{});
  const auto wn = KernelExpr::base(WhiteNoise{});
  out.require(parse("SE * LIN") == KernelExpr::product({se, KernelExpr::base(Linear{})}),
              "SE * LIN shape");
  const auto inner = KernelExpr::change_window(KernelExpr::sum({wn, se}), wn, 0.0, 1.0);
  const auto nested = KernelExpr::change_window(KernelExpr::sum({se, inner}),
                                                KernelExpr::base(Constant{}), 0.0, 1.0);
  out.require(parse("CW(SE + CW(WN + SE, WN), C)") == nested, "nested CW shape");
  if (out.ok) out.detail << "500 random expressions and both fixture strings";
}

// --- 9 ---------------------------------------------------------------------

void structure_recovery(Outcome& out) {
  const auto data = testing::sine_plus_trend(100, 7);
  SearchConfig config;
  config.max_depth = 3;
  config.restarts = 3;
  config.seed = 9009;
  const auto result = search(data, config);
  const auto kinds = base_kinds(simplify(result.best));
  out.require(kinds.count(BaseKind::per) > 0, "no PER factor in " + render_structure(result.best));
  out.require(kinds.count(BaseKind::lin) > 0, "no LIN factor in " + render_structure(result.best));

  double best_base = INFINITY;
  double previous = INFINITY;
  for (const auto& rec : result.trace.records) {
    if (rec.round == 0 && rec.error.empty()) best_base = std::min(best_base, rec.bic);
    if (rec.accepted) {
      out.require(rec.bic <= previous, "accepted BIC increased in round " + std::to_string(rec.round));
      previous = rec.bic;
    }
  }
  out.require(result.bic < best_base, "does not beat the best base kernel");
  out.detail << (out.ok ? "" : "; ") << render_structure(result.best) << ", BIC " << result.bic
             << " vs best base " << best_base << ", " << result.trace.records.size()
             << " candidates";
}

// --- 10 --------------------------------------------------------------------

int run_cli(const std::string& args) {
  const int status = std::system((std::string(KERNELGEN_CLI) + " " + args + " > /dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void cli_determinism(Outcome& out) {
  testing::TempDir dir;
  std::string csv = "date,value\n";
  for (int i = 0; i < 60; ++i) {
    char date[16];
    std::snprintf(date, sizeof date, "2015-%02d-%02d", 1 + i / 28, 1 + i % 28);
    csv += std::string(date) + "," + std::to_string(std::sin(i / 3.0) + 0.02 * i) + "\n";
  }
  testing::write_file(dir / "series.csv", csv);
  const std::string common = "report -i " + (dir / "series.csv").string() +
                             " --time-column date --test-count 6 --seed 42 --max-depth 2"
                             " --base SE,PER,LIN --operators +,* --restarts 2 -o ";
  out.require(run_cli(common + (dir / "a").string()) == 0, "first run failed");
  out.require(run_cli(common + (dir / "b").string()) == 0, "second run failed");
  if (!out.ok) return;
  for (const char* name : {"kernel.txt", "program.stan", "predictions.csv"})
    out.require(testing::read_file(dir / "a" / name) == testing::read_file(dir / "b" / name),
                std::string(name) + " differs between runs");

  // Recompute the predictive sd and recover the z-score from the interval.
  const auto run = nlohmann::json::parse(testing::read_file(dir / "a" / "run.json"));
  const auto config = run_config_from_json(run["config"]);
  const auto data = ingest(config);
  const auto kernel = parse(testing::read_file(dir / "a" / "kernel.txt"));
  const double noise = run["result"]["noise_variance"].get<double>();
  const auto post = posterior<double>(kernel, data.train_times(), data.train_values(), data.times(), noise);
  std::istringstream rows(testing::read_file(dir / "a" / "predictions.csv"));
  std::string line;
  std::getline(rows, line);
  double worst = 0;
  Eigen::Index i = 0;
  while (std::getline(rows, line)) {
    double t, mean, lower, upper;
    char c;
    std::istringstream(line) >> t >> c >> mean >> c >> lower >> c >> upper;
    const double sd = std::sqrt(std::max(post.covariance(i, i), 0.0) + noise);
    worst = std::max({worst, std::abs((upper - mean) / sd - 1.959964),
                      std::abs((mean - lower) / sd - 1.959964)});
    ++i;
  }
  out.require(i == data.size(), "predictions.csv row count");
  out.require(worst <= 1e-6, "interval z-score is not 1.959964");
  out.detail << (out.ok ? "" : "; ") << "kernel " << render_structure(kernel)
             << ", artifacts byte-identical, max |z - 1.959964| " << worst;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "posterior matches explicit-inverse oracle", 10, posterior_oracle},
      {2, "noiseless posterior interpolates", 1, noiseless_interpolation},
      {3, "simplifier soundness and normal form", 30, simplifier_soundness},
      {4, "SE*SE, WN*stationary, C*k rewrite rules", 1, rewrite_rules},
      {5, "Gram matrices are PSD", 10, psd_property},
      {6, "mu + L z sampler fidelity", 60, sampler_fidelity},
      {7, "codegen structure, golden and semantics", 30, codegen_structure},
      {8, "parse/render round trip", 5, round_trip},
      {9, "structure recovery on sine plus trend", 300, structure_recovery},
      {10, "end-to-end report determinism", 60, cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.ok = false;
      out.detail.str("");
      out.detail << "threw: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_seconds) {
      out.ok = false;
      out.detail << "; over the " << c.budget_seconds << " s budget";
    }
    failed += out.ok ? 0 : 1;
    std::cout << (out.ok ? "PASS" : "FAIL") << " criterion " << std::setw(2) << c.id << ": "
              << c.name << " (" << std::fixed << std::setprecision(2) << secs << " s) "
              << std::defaultfloat << std::setprecision(6) << out.detail.str() << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
