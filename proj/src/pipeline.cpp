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

#include "kernelgen/pipeline.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kernelgen/codegen.hpp"
#include "kernelgen/describe.hpp"
#include "kernelgen/errors.hpp"
#include "kernelgen/format.hpp"
#include "kernelgen/ingest.hpp"
#include "kernelgen/optimize.hpp"
#include "kernelgen/parse.hpp"
#include "kernelgen/report.hpp"

#ifndef KERNELGEN_VERSION
#define KERNELGEN_VERSION "unknown"
#endif

namespace kernelgen {

namespace fs = std::filesystem;

std::string library_version() { return KERNELGEN_VERSION; }

namespace {

// Same structure, every leaf at its data-scaled search prototype and every
// change operator at the data-scaled steepness.
KernelExpr data_scaled(const KernelExpr& e, const ExpansionContext& ctx) {
  return std::visit(
      overloaded{
          [&](const BaseKernel& b) { return KernelExpr::base(ctx.prototype(kind_of(b))); },
          [&](const KernelExpr::Sum& s) {
            std::vector<KernelExpr> terms;
            for (const auto& t : s.terms) terms.push_back(data_scaled(t, ctx));
            return KernelExpr::sum(std::move(terms));
          },
          [&](const KernelExpr::Product& p) {
            std::vector<KernelExpr> factors;
            for (const auto& f : p.factors) factors.push_back(data_scaled(f, ctx));
            return KernelExpr::product(std::move(factors));
          },
          [&](const KernelExpr::ChangePoint& c) {
            return KernelExpr::change_point(data_scaled(c.left, ctx), data_scaled(c.right, ctx),
                                            c.location, ctx.steepness);
          },
          [&](const KernelExpr::ChangeWindow& c) {
            return KernelExpr::change_window(data_scaled(c.inside, ctx),
                                             data_scaled(c.outside, ctx), c.start, c.end,
                                             ctx.steepness);
          },
          [&](const SigmoidFactor&) { return e; },
      },
      e.node().value);
}

}  // namespace

FittedModel fit_model(const RunConfig& config, const TimeSeriesDataset& data) {
  config.validate();
  if (config.mode == RunMode::search) {
    SearchConfig sc = config.search;
    sc.seed = config.seed;
    auto result = search(data, sc);
    return {result.best, result.noise_variance, std::move(result.trace)};
  }
  if (!config.fit_hyperparameters)
    return {parse(config.kernel), config.search.noise.variance, std::nullopt};

  // Omitted CP/CW locations bind to the data's time range.
  const Eigen::VectorXd t = data.train_times();
  const auto expr = parse(config.kernel, ParseOptions{TimeRange{t.minCoeff(), t.maxCoeff()}});
  OptimizeConfig oc;
  oc.restarts = config.search.restarts;
  oc.max_iters = config.search.max_iters;
  oc.seed = config.seed;
  // Text without hyperparameters carries unit defaults that can sit far from
  // the data's scales, so the data-scaled variant is fitted too; the written
  // values win ties.
  const auto written = optimize_hyperparams(expr, data, config.search.noise, oc);
  const auto scaled = optimize_hyperparams(data_scaled(expr, ExpansionContext::for_data(data)),
                                           data, config.search.noise, oc);
  const auto& best = scaled.lml > written.lml ? scaled : written;
  return {best.expr, best.noise_variance, std::nullopt};
}

namespace {

class Outputs {
 public:
  explicit Outputs(const RunConfig& config) : dir_(config.output_dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir_.string() + "'");
  }

  void write(const std::string& name, const std::string& content) {
    write_atomic(dir_ / name, content);
    written_.push_back(dir_ / name);
  }

  std::vector<fs::path> finish() { return std::move(written_); }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

std::string run_json(const RunConfig& config, const char* command,
                     const std::optional<FittedModel>& model) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["seed"] = config.seed;
  j["config"] = to_json(config);
  j["versions"] = {{"kernelgen", library_version()},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  if (model) {
    j["result"] = {{"kernel", render(model->expr)}, {"noise_variance", model->noise_variance}};
  }
  return j.dump(2) + "\n";
}

void write_model(Outputs& out, const FittedModel& model) {
  out.write("kernel.txt", render(model.expr) + "\n");
  out.write("description.txt", describe(model.expr) + "\n");
}

void write_program(Outputs& out, const FittedModel& model, const TimeSeriesDataset& data) {
  const auto program = emit_program(model.expr, data, EmitOptions{Dialect::stan2, model.noise_variance, {}, {}});
  out.write("program.stan", program.rendered);
  out.write("data.json", emit_data_json(data));
}

}  // namespace

std::vector<fs::path> run_fit(const RunConfig& config) {
  if (config.mode != RunMode::search) throw InvalidKernel("fit runs the structure search only");
  const auto data = ingest(config);
  const auto model = fit_model(config, data);
  Outputs out(config);
  write_model(out, model);
  out.write("trace.jsonl", model.trace->to_jsonl());
  out.write("run.json", run_json(config, "fit", model));
  return out.finish();
}

std::vector<fs::path> run_compile(const RunConfig& config) {
  if (config.mode != RunMode::fixed_kernel) throw InvalidKernel("compile needs kernel text");
  const auto data = ingest(config);
  const auto model = fit_model(config, data);
  Outputs out(config);
  out.write("kernel.txt", render(model.expr) + "\n");
  write_program(out, model, data);
  out.write("run.json", run_json(config, "compile", model));
  return out.finish();
}

std::vector<fs::path> run_sample(const RunConfig& config, const fs::path& program,
                                 Eigen::Index n_draws) {
  const auto data = ingest(config);
  std::ifstream in(program, std::ios::binary);
  if (!in) throw IoError("cannot open program '" + program.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  const auto draws = sample_program(text.str(), data, n_draws, config.seed);
  std::string csv = "draw,time,value\n";
  const Eigen::VectorXd x2 = data.test_times();
  for (Eigen::Index d = 0; d < draws.rows(); ++d)
    for (Eigen::Index i = 0; i < draws.cols(); ++i)
      csv += std::to_string(d + 1) + "," + format_shortest(x2(i)) + "," +
             format_shortest(draws(d, i)) + "\n";
  Outputs out(config);
  out.write("samples.csv", csv);
  out.write("run.json", run_json(config, "sample", std::nullopt));
  return out.finish();
}

std::vector<fs::path> run_report(const RunConfig& config) {
  const auto data = ingest(config);
  const auto model = fit_model(config, data);
  const auto table =
      predict(model.expr, data, model.noise_variance, config.interval_level, config.latent_only);
  Outputs out(config);
  write_model(out, model);
  write_program(out, model, data);
  out.write("predictions.csv", predictions_csv(table));
  if (model.trace) out.write("trace.jsonl", model.trace->to_jsonl());
  out.write("plot.svg", plot_svg(data, table));
  out.write("run.json", run_json(config, "report", model));
  return out.finish();
}

}  // namespace kernelgen
