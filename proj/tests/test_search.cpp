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

#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "doctest.h"
#include "kernelgen/algebra.hpp"
#include "kernelgen/errors.hpp"
#include "kernelgen/kernels.hpp"
#include "kernelgen/parse.hpp"
#include "kernelgen/search.hpp"
#include "support/synthetic.hpp"

using namespace kernelgen;

namespace {

std::set<std::string> rendered(const std::vector<KernelExpr>& v) {
  std::set<std::string> out;
  for (const auto& e : v) out.insert(render_structure(e));
  return out;
}

SearchConfig small_config() {
  SearchConfig cfg;
  cfg.max_depth = 2;
  cfg.base_set = {BaseKind::se, BaseKind::per, BaseKind::lin};
  cfg.operators = {Operator::add, Operator::multiply};
  cfg.restarts = 2;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("expand SE over {SE, LIN} with + and *") {
  SearchConfig cfg;
  cfg.base_set = {BaseKind::se, BaseKind::lin};
  cfg.operators = {Operator::add, Operator::multiply};
  const auto out = expand(parse("SE"), cfg);
  // SE * SE is an SE again and is dropped as a duplicate of the input
  CHECK(rendered(out) == std::set<std::string>{"SE + SE", "SE + LIN", "SE * LIN"});
  CHECK(out.size() == 3);
}

TEST_CASE("expand edge cases") {
  SearchConfig cfg;
  cfg.operators = {};
  CHECK(expand(parse("SE + PER"), cfg).empty());

  cfg = SearchConfig{};
  const auto input = parse("SE * LIN + PER");
  const auto key = structure_key(input);
  const auto out = expand(input, cfg);
  CHECK(out.size() > 20);
  std::set<std::string> keys;
  for (const auto& e : out) {
    CHECK(structure_key(e) != key);
    CHECK(keys.insert(structure_key(e)).second);
  }
}

TEST_CASE("change point moves use the time quantiles") {
  const auto data = testing::sine_plus_trend(41, 1);
  const auto ctx = ExpansionContext::for_data(data);
  REQUIRE(ctx.change_locations.size() == 3);
  CHECK(ctx.change_locations[0] == doctest::Approx(2.5));
  CHECK(ctx.change_locations[1] == doctest::Approx(5.0));
  CHECK(ctx.change_locations[2] == doctest::Approx(7.5));
  CHECK(ctx.window_start == doctest::Approx(10.0 / 3));
  CHECK(ctx.window_end == doctest::Approx(20.0 / 3));

  SearchConfig cfg;
  cfg.base_set = {BaseKind::c};
  cfg.operators = {Operator::change_point, Operator::change_window};
  const auto out = expand(parse("SE"), cfg, ctx);
  REQUIRE(out.size() == 4);
  for (int i = 0; i < 3; ++i) {
    const auto* cp = out[static_cast<std::size_t>(i)].as<KernelExpr::ChangePoint>();
    REQUIRE(cp);
    CHECK(cp->location == ctx.change_locations[static_cast<std::size_t>(i)]);
  }
  CHECK(out[3].as<KernelExpr::ChangeWindow>());
}

TEST_CASE("max_depth = 1 returns the best base kernel") {
  auto cfg = small_config();
  cfg.max_depth = 1;
  const auto data = testing::sine_plus_trend(40, 3);
  const auto r = search(data, cfg);
  REQUIRE(r.trace.records.size() == 3);
  double best = r.trace.records[0].bic;
  for (const auto& rec : r.trace.records) best = std::min(best, rec.bic);
  CHECK(r.bic == best);
  CHECK(r.best.as<BaseKernel>());
}

TEST_CASE("white noise data picks a noise-like base and never worsens") {
  SearchConfig cfg;
  cfg.max_depth = 2;
  cfg.restarts = 2;
  cfg.seed = 11;
  const auto r = search(testing::white_noise(100, 4), cfg);
  double round0 = INFINITY;
  std::string winner;
  for (const auto& rec : r.trace.records)
    if (rec.round == 0 && rec.accepted) {
      round0 = rec.bic;
      winner = render_structure(rec.expr);
    }
  MESSAGE("round-0 winner " << winner << ", final " << render(r.best));
  CHECK((winner == "WN" || winner == "C"));
  CHECK(r.bic <= round0);
}

TEST_CASE("search is deterministic and its trace is well formed") {
  const auto data = testing::sine_plus_trend(50, 9);
  const auto a = search(data, small_config());
  const auto b = search(data, small_config());
  CHECK(a.trace.to_jsonl() == b.trace.to_jsonl());
  CHECK(render(a.best) == render(b.best));

  std::istringstream lines(a.trace.to_jsonl());
  std::string line;
  std::size_t count = 0;
  double last_accepted = INFINITY;
  int last_round = -1;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    for (const char* key : {"round", "expression", "hyperparameters", "lml", "bic", "accepted"})
      CHECK(j.contains(key));
    if (j["accepted"].get<bool>()) {
      const double bic = j["bic"].get<double>();
      CHECK(bic <= last_accepted);
      CHECK(j["round"].get<int>() > last_round);
      last_accepted = bic;
      last_round = j["round"].get<int>();
    }
    ++count;
  }
  CHECK(count == a.trace.records.size());
  CHECK(last_accepted == a.bic);
}

TEST_CASE("accepted candidates have their round's minimum BIC") {
  const auto r = search(testing::sine_plus_trend(50, 2), small_config());
  for (const auto& acc : r.trace.records) {
    if (!acc.accepted) continue;
    for (const auto& rec : r.trace.records)
      if (rec.round == acc.round && rec.error.empty()) CHECK(acc.bic <= rec.bic + 1e-9);
  }
}

TEST_CASE("every trace expression is valid and positive semi-definite") {
  const auto data = testing::sine_plus_trend(50, 2);
  const auto r = search(data, small_config());
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(15, -1, 11);
  for (const auto& rec : r.trace.records) {
    INFO(render(rec.expr));
    CHECK(parse(render(rec.expr)) == rec.expr);
    const Eigen::MatrixXd k = gram<double>(rec.expr, grid, grid);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * std::max(1.0, k.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("search input validation") {
  SearchConfig cfg;
  cfg.max_depth = 0;
  CHECK_THROWS_AS(search(testing::sine_plus_trend(20, 1), cfg), InvalidKernel);
  CHECK_THROWS_AS(search(testing::sine_plus_trend(4, 1), SearchConfig{}), InvalidDataset);
}
