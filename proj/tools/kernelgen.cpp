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

// Command-line front end: fit, compile, sample, report.
//
// Exit codes: 0 success, 1 pipeline error (one JSON line on stderr),
// 2 usage error (CLI11's message).

#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kernelgen/errors.hpp"
#include "kernelgen/pipeline.hpp"
#include "kernelgen/run_config.hpp"

namespace {

using kernelgen::RunConfig;

struct Flags {
  std::optional<double> test_count, test_fraction;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> base, operators;
  bool fixed_noise = false;
  bool no_fit = false;
  std::string program;
  long draws = 1000;
};

void add_common(CLI::App& cmd, RunConfig& c, Flags& f) {
  cmd.add_option("-i,--input", c.input, "CSV file with a header row")->required();
  cmd.add_option("--time-column", c.time_column, "time column (numbers or ISO-8601 dates)")
      ->capture_default_str();
  cmd.add_option("--value-column", c.value_column)->capture_default_str();
  auto* count = cmd.add_option("--test-count", f.test_count, "trailing rows held out");
  cmd.add_option("--test-fraction", f.test_fraction, "trailing fraction held out")->excludes(count);
  cmd.add_option("-o,--out", c.output_dir, "output directory")->capture_default_str();
  cmd.add_option("--seed", f.seed, "random seed; a logged random value if omitted");
  cmd.add_option("--noise", c.search.noise.variance, "noise variance (initial value unless fixed)")
      ->capture_default_str();
  cmd.add_flag("--fixed-noise", f.fixed_noise, "keep the noise variance at --noise");
  cmd.add_option("--restarts", c.search.restarts, "optimizer restarts per fit")
      ->capture_default_str();
  cmd.add_option("--max-iters", c.search.max_iters, "L-BFGS iterations per restart")
      ->capture_default_str();
}

void add_search(CLI::App& cmd, RunConfig& c, Flags& f) {
  cmd.add_option("--max-depth", c.search.max_depth, "search rounds, base round included")
      ->capture_default_str();
  cmd.add_option("--base", f.base, "base kernels, e.g. SE,PER,LIN")->delimiter(',');
  cmd.add_option("--operators", f.operators, "operators among +,*,CP,CW")->delimiter(',');
  cmd.add_option("--beam-width", c.search.beam_width)->capture_default_str();
}

void add_fixed(CLI::App& cmd, RunConfig& c, Flags& f, bool required) {
  auto* k = cmd.add_option("-k,--kernel", c.kernel, "kernel expression, e.g. \"SE * LIN\"");
  if (required) k->required();
  cmd.add_flag("--no-fit", f.no_fit, "use the kernel's hyperparameters as written");
}

void add_report(CLI::App& cmd, RunConfig& c) {
  cmd.add_option("--level", c.interval_level, "predictive interval level")->capture_default_str();
  cmd.add_flag("--latent-only", c.latent_only, "intervals without the noise variance");
}

void finish(RunConfig& c, const Flags& f) {
  if (f.test_count) c.split = {kernelgen::SplitSpec::Kind::count, *f.test_count};
  if (f.test_fraction) c.split = {kernelgen::SplitSpec::Kind::fraction, *f.test_fraction};
  if (f.seed) {
    c.seed = *f.seed;
  } else {
    c.seed = (std::uint64_t{std::random_device{}()} << 32) | std::random_device{}();
    std::cerr << "kernelgen: no --seed given, using seed " << c.seed << "\n";
  }
  c.search.seed = c.seed;
  c.search.noise.learn = !f.fixed_noise;
  c.fit_hyperparameters = !f.no_fit;
  if (!f.base.empty()) {
    c.search.base_set.clear();
    for (const auto& b : f.base) c.search.base_set.push_back(kernelgen::base_kind_from_string(b));
  }
  if (!f.operators.empty()) {
    c.search.operators.clear();
    for (const auto& o : f.operators)
      c.search.operators.push_back(kernelgen::operator_from_string(o));
  }
  c.mode = c.kernel.empty() ? kernelgen::RunMode::search : kernelgen::RunMode::fixed_kernel;
}

int report_error(const char* type, const std::string& message) {
  nlohmann::json j{{"error", type}, {"message", message}};
  std::cerr << j.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compositional GP kernel search and probabilistic-program generation"};
  app.require_subcommand(1);

  RunConfig config;
  Flags flags;

  auto* fit = app.add_subcommand("fit", "search for a kernel structure");
  add_common(*fit, config, flags);
  add_search(*fit, config, flags);

  auto* compile = app.add_subcommand("compile", "fit a fixed kernel and emit its program");
  add_common(*compile, config, flags);
  add_fixed(*compile, config, flags, true);

  auto* sample = app.add_subcommand("sample", "draw test-set extrapolations from an emitted program");
  add_common(*sample, config, flags);
  sample->add_option("--program", flags.program, "program.stan written by compile or report")
      ->required();
  sample->add_option("--draws", flags.draws, "number of draws")->capture_default_str();

  auto* report = app.add_subcommand("report", "full pipeline: fit, emit, predict, plot");
  add_common(*report, config, flags);
  add_search(*report, config, flags);
  add_fixed(*report, config, flags, false);
  add_report(*report, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version report success; everything else is a usage error
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    finish(config, flags);
    std::vector<std::filesystem::path> written;
    if (fit->parsed()) written = kernelgen::run_fit(config);
    else if (compile->parsed()) written = kernelgen::run_compile(config);
    else if (sample->parsed()) written = kernelgen::run_sample(config, flags.program, flags.draws);
    else written = kernelgen::run_report(config);
    for (const auto& p : written) std::cout << p.string() << "\n";
    return 0;
  } catch (const kernelgen::IngestError& e) {
    return report_error("IngestError", e.what());
  } catch (const kernelgen::ParseError& e) {
    return report_error("ParseError", e.what());
  } catch (const kernelgen::InvalidKernel& e) {
    return report_error("InvalidKernel", e.what());
  } catch (const kernelgen::InvalidDataset& e) {
    return report_error("InvalidDataset", e.what());
  } catch (const kernelgen::NotPositiveDefinite& e) {
    return report_error("NotPositiveDefinite", e.what());
  } catch (const kernelgen::OptimizationFailed& e) {
    return report_error("OptimizationFailed", e.what());
  } catch (const kernelgen::SemanticsMismatch& e) {
    return report_error("SemanticsMismatch", e.what());
  } catch (const kernelgen::IoError& e) {
    return report_error("IoError", e.what());
  } catch (const std::exception& e) {
    return report_error("Error", e.what());
  }
}
