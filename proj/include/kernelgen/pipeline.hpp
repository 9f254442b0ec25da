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

#ifndef KERNELGEN_PIPELINE_HPP
#define KERNELGEN_PIPELINE_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kernelgen/dataset.hpp"
#include "kernelgen/run_config.hpp"
#include "kernelgen/search.hpp"

namespace kernelgen {

/// The model a run settles on: searched, fitted from fixed kernel text, or
/// taken verbatim when fitting is off.
struct FittedModel {
  KernelExpr expr;
  double noise_variance = 0;
  std::optional<SearchTrace> trace;  // search mode only
};

FittedModel fit_model(const RunConfig& config, const TimeSeriesDataset& data);

/// Batch commands. Each ingests config.input, writes its artifacts into
/// config.output_dir (created if missing, every file replaced atomically)
/// and returns the paths written.
///   fit:     kernel.txt, description.txt, trace.jsonl, run.json
///   compile: kernel.txt, program.stan, data.json, run.json
///   sample:  samples.csv (draw, time, value), run.json
///   report:  everything above except samples.csv, plus predictions.csv and plot.svg
std::vector<std::filesystem::path> run_fit(const RunConfig& config);
std::vector<std::filesystem::path> run_compile(const RunConfig& config);
std::vector<std::filesystem::path> run_sample(const RunConfig& config,
                                              const std::filesystem::path& program,
                                              Eigen::Index n_draws);
std::vector<std::filesystem::path> run_report(const RunConfig& config);

/// Version strings recorded in run.json.
std::string library_version();

}  // namespace kernelgen

#endif  // KERNELGEN_PIPELINE_HPP
