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

#ifndef KERNELGEN_RUN_CONFIG_HPP
#define KERNELGEN_RUN_CONFIG_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "kernelgen/search.hpp"

namespace kernelgen {

/// How many trailing rows are held out for testing.
struct SplitSpec {
  enum class Kind { count, fraction };
  Kind kind = Kind::count;
  double value = 0;  // a row count, or a fraction in [0, 1)

  Eigen::Index test_rows(Eigen::Index total) const;
  bool operator==(const SplitSpec&) const = default;
};

enum class RunMode { search, fixed_kernel };

struct RunConfig {
  std::string input;
  std::string time_column = "time";
  std::string value_column = "value";
  SplitSpec split;
  RunMode mode = RunMode::search;
  std::string kernel;                   // fixed_kernel mode only
  bool fit_hyperparameters = true;      // fixed_kernel mode: optimize before emitting
  SearchConfig search;                  // search.seed mirrors `seed`
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  double interval_level = 0.95;
  bool latent_only = false;             // intervals without the noise variance

  /// Throws InvalidDataset / InvalidKernel on inconsistent settings.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

nlohmann::ordered_json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);

std::string to_string(BaseKind kind);
BaseKind base_kind_from_string(const std::string& name);
std::string to_string(Operator op);
Operator operator_from_string(const std::string& name);

}  // namespace kernelgen

#endif  // KERNELGEN_RUN_CONFIG_HPP
