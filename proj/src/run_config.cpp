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

#include "kernelgen/run_config.hpp"

#include <cmath>

#include "kernelgen/errors.hpp"
#include "kernelgen/parse.hpp"

namespace kernelgen {

Eigen::Index SplitSpec::test_rows(Eigen::Index total) const {
  Eigen::Index rows = 0;
  if (kind == Kind::count) {
    if (!(value >= 0) || value != std::floor(value))
      throw InvalidDataset("test count must be a non-negative integer");
    rows = static_cast<Eigen::Index>(value);
  } else {
    if (!(value >= 0 && value < 1)) throw InvalidDataset("test fraction must lie in [0, 1)");
    rows = static_cast<Eigen::Index>(std::llround(value * static_cast<double>(total)));
  }
  if (rows >= total) throw InvalidDataset("the test split leaves no training rows");
  return rows;
}

void RunConfig::validate() const {
  if (!(interval_level > 0 && interval_level < 1))
    throw InvalidDataset("interval level must lie strictly between 0 and 1");
  if (mode == RunMode::fixed_kernel && kernel.empty())
    throw InvalidKernel("fixed-kernel mode needs kernel text");
  if (mode == RunMode::search && !kernel.empty())
    throw InvalidKernel("kernel text is only used in fixed-kernel mode");
  if (mode == RunMode::fixed_kernel) (void)parse(kernel);
}

namespace {

constexpr std::pair<BaseKind, const char*> kKinds[] = {
    {BaseKind::wn, "WN"}, {BaseKind::c, "C"}, {BaseKind::lin, "LIN"},
    {BaseKind::se, "SE"}, {BaseKind::per, "PER"}};
constexpr std::pair<Operator, const char*> kOps[] = {{Operator::add, "+"},
                                                     {Operator::multiply, "*"},
                                                     {Operator::change_point, "CP"},
                                                     {Operator::change_window, "CW"}};

}  // namespace

std::string to_string(BaseKind kind) {
  for (auto [k, name] : kKinds)
    if (k == kind) return name;
  throw InvalidKernel("unknown base kind");
}

BaseKind base_kind_from_string(const std::string& name) {
  for (auto [k, n] : kKinds)
    if (name == n) return k;
  throw InvalidKernel("unknown base kernel '" + name + "'");
}

std::string to_string(Operator op) {
  for (auto [o, name] : kOps)
    if (o == op) return name;
  throw InvalidKernel("unknown operator");
}

Operator operator_from_string(const std::string& name) {
  for (auto [o, n] : kOps)
    if (name == n) return o;
  throw InvalidKernel("unknown operator '" + name + "'");
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["input"] = c.input;
  j["time_column"] = c.time_column;
  j["value_column"] = c.value_column;
  j["split"] = {{"kind", c.split.kind == SplitSpec::Kind::count ? "count" : "fraction"},
                {"value", c.split.value}};
  j["mode"] = c.mode == RunMode::search ? "search" : "fixed-kernel";
  j["kernel"] = c.kernel;
  j["fit_hyperparameters"] = c.fit_hyperparameters;
  auto& s = j["search"];
  s["max_depth"] = c.search.max_depth;
  s["base_set"] = nlohmann::json::array();
  for (auto k : c.search.base_set) s["base_set"].push_back(to_string(k));
  s["operators"] = nlohmann::json::array();
  for (auto o : c.search.operators) s["operators"].push_back(to_string(o));
  s["beam_width"] = c.search.beam_width;
  s["restarts"] = c.search.restarts;
  s["max_iters"] = c.search.max_iters;
  s["seed"] = c.search.seed;
  s["noise"] = {{"learn", c.search.noise.learn}, {"variance", c.search.noise.variance}};
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["interval_level"] = c.interval_level;
  j["latent_only"] = c.latent_only;
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  try {
    RunConfig c;
    c.input = j.at("input").get<std::string>();
    c.time_column = j.at("time_column").get<std::string>();
    c.value_column = j.at("value_column").get<std::string>();
    const auto kind = j.at("split").at("kind").get<std::string>();
    if (kind != "count" && kind != "fraction") throw InvalidDataset("unknown split kind " + kind);
    c.split.kind = kind == "count" ? SplitSpec::Kind::count : SplitSpec::Kind::fraction;
    c.split.value = j.at("split").at("value").get<double>();
    const auto mode = j.at("mode").get<std::string>();
    if (mode != "search" && mode != "fixed-kernel") throw InvalidKernel("unknown mode " + mode);
    c.mode = mode == "search" ? RunMode::search : RunMode::fixed_kernel;
    c.kernel = j.at("kernel").get<std::string>();
    c.fit_hyperparameters = j.at("fit_hyperparameters").get<bool>();
    const auto& s = j.at("search");
    c.search.max_depth = s.at("max_depth").get<int>();
    c.search.base_set.clear();
    for (const auto& k : s.at("base_set")) c.search.base_set.push_back(base_kind_from_string(k));
    c.search.operators.clear();
    for (const auto& o : s.at("operators")) c.search.operators.push_back(operator_from_string(o));
    c.search.beam_width = s.at("beam_width").get<int>();
    c.search.restarts = s.at("restarts").get<int>();
    c.search.max_iters = s.at("max_iters").get<int>();
    c.search.seed = s.at("seed").get<std::uint64_t>();
    c.search.noise.learn = s.at("noise").at("learn").get<bool>();
    c.search.noise.variance = s.at("noise").at("variance").get<double>();
    c.output_dir = j.at("output_dir").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.interval_level = j.at("interval_level").get<double>();
    c.latent_only = j.at("latent_only").get<bool>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidDataset(std::string("malformed run configuration: ") + e.what());
  }
}

}  // namespace kernelgen
