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

#include "kernelgen/search.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kernelgen/algebra.hpp"
#include "kernelgen/errors.hpp"
#include "kernelgen/format.hpp"
#include "kernelgen/hyperparams.hpp"
#include "kernelgen/parse.hpp"
#include "kernelgen/posterior.hpp"

namespace kernelgen {

namespace {

// A move's result: the subtree replacing S and the paths, relative to S,
// of nodes whose hyperparameters are new (the added leaf, the operator).
struct Move {
  KernelExpr subtree;
  std::vector<std::string> fresh;
};

struct Candidate {
  KernelExpr expr;
  std::vector<std::string> fresh;  // absolute paths
};

using Moves = std::function<std::vector<Move>(const KernelExpr&)>;

// Every expression obtained by replacing exactly one subexpression S of
// `expr` with one of moves(S); the root comes first, then children in order.
std::vector<Candidate> replace_each(const KernelExpr& expr, const Moves& moves,
                                    const std::string& path = "") {
  std::vector<Candidate> out;
  for (auto& m : moves(expr)) {
    for (auto& f : m.fresh) f = path + f;
    out.push_back({std::move(m.subtree), std::move(m.fresh)});
  }
  auto with_child = [&](const KernelExpr& child, std::size_t index, auto rebuild) {
    for (auto& r : replace_each(child, moves, path + "/" + std::to_string(index)))
      out.push_back({rebuild(std::move(r.expr), index), std::move(r.fresh)});
  };
  std::visit(
      overloaded{
          [](const BaseKernel&) {},
          [](const SigmoidFactor&) {},
          [&](const KernelExpr::Sum& s) {
            for (std::size_t i = 0; i < s.terms.size(); ++i)
              with_child(s.terms[i], i, [&](KernelExpr r, std::size_t k) {
                auto terms = s.terms;
                terms[k] = std::move(r);
                return KernelExpr::sum(std::move(terms));
              });
          },
          [&](const KernelExpr::Product& p) {
            for (std::size_t i = 0; i < p.factors.size(); ++i)
              with_child(p.factors[i], i, [&](KernelExpr r, std::size_t k) {
                auto factors = p.factors;
                factors[k] = std::move(r);
                return KernelExpr::product(std::move(factors));
              });
          },
          [&](const KernelExpr::ChangePoint& c) {
            with_child(c.left, 0, [&](KernelExpr r, std::size_t) {
              return KernelExpr::change_point(std::move(r), c.right, c.location, c.steepness);
            });
            with_child(c.right, 1, [&](KernelExpr r, std::size_t) {
              return KernelExpr::change_point(c.left, std::move(r), c.location, c.steepness);
            });
          },
          [&](const KernelExpr::ChangeWindow& c) {
            with_child(c.inside, 0, [&](KernelExpr r, std::size_t) {
              return KernelExpr::change_window(std::move(r), c.outside, c.start, c.end,
                                               c.steepness);
            });
            with_child(c.outside, 1, [&](KernelExpr r, std::size_t) {
              return KernelExpr::change_window(c.inside, std::move(r), c.start, c.end,
                                               c.steepness);
            });
          },
      },
      expr.node().value);
  return out;
}

std::vector<bool> resample_mask(const Candidate& c) {
  std::vector<bool> mask;
  for (const auto& h : hyperparam_vector(c.expr))
    mask.push_back(std::find(c.fresh.begin(), c.fresh.end(), h.path) != c.fresh.end());
  return mask;
}

bool enabled(const SearchConfig& config, Operator op) {
  return std::find(config.operators.begin(), config.operators.end(), op) !=
         config.operators.end();
}

double quantile(const Eigen::VectorXd& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<Eigen::Index>(pos);
  const auto hi = std::min<Eigen::Index>(lo + 1, sorted.size() - 1);
  return sorted(lo) + (pos - static_cast<double>(lo)) * (sorted(hi) - sorted(lo));
}

// A successfully fitted candidate, by its position in the trace.
struct Scored {
  std::size_t slot;
  double bic;
  std::size_t params;
  std::string text;
};

// Lower BIC; within 1e-9, fewer parameters; then render order.
bool better(const Scored& a, const Scored& b) {
  if (std::abs(a.bic - b.bic) > 1e-9) return a.bic < b.bic;
  if (a.params != b.params) return a.params < b.params;
  return a.text < b.text;
}

std::vector<Scored> top(std::vector<Scored> fitted, int width) {
  std::sort(fitted.begin(), fitted.end(), better);
  if (static_cast<int>(fitted.size()) > width) fitted.resize(static_cast<std::size_t>(width));
  return fitted;
}

}  // namespace

ExpansionContext ExpansionContext::for_data(const TimeSeriesDataset& data) {
  const Eigen::VectorXd t = data.train_times();
  const Eigen::VectorXd y = data.train_values();
  ExpansionContext ctx;
  const double lo = t(0), hi = t(t.size() - 1);
  ctx.time_origin = lo;
  ctx.time_range = std::max(hi - lo, 1e-12);
  ctx.change_locations = {quantile(t, 0.25), quantile(t, 0.5), quantile(t, 0.75)};
  ctx.window_start = lo + ctx.time_range / 3.0;
  ctx.window_end = lo + 2.0 * ctx.time_range / 3.0;
  ctx.steepness = ctx.time_range / 20.0;
  ctx.signal_variance = std::max((y.array() - y.mean()).square().mean(), 1e-12);
  return ctx;
}

BaseKernel ExpansionContext::prototype(BaseKind kind) const {
  const double v = signal_variance;
  switch (kind) {
    case BaseKind::wn:
      return WhiteNoise{0.1 * v};
    case BaseKind::c:
      return Constant{v};
    case BaseKind::lin:
      return Linear{v / (time_range * time_range), time_origin};
    case BaseKind::se:
      return SquaredExp{v, time_range / 10.0};
    case BaseKind::per:
      return Periodic{v, 1.0, time_range / 10.0};
  }
  throw InvalidKernel("unknown base kind");
}

std::string structure_key(const KernelExpr& expr) {
  std::vector<std::string> terms;
  for (const auto& t : simplify(expr).terms) {
    std::string key = render_structure(to_expr(t));
    for (const auto& s : t.sigmoid_factors) key += "@" + format_shortest(s.location);
    terms.push_back(std::move(key));
  }
  std::sort(terms.begin(), terms.end());
  std::string out;
  for (const auto& t : terms) out += (out.empty() ? "" : " + ") + t;
  return out;
}

namespace {

std::vector<Candidate> expand_candidates(const KernelExpr& expr, const SearchConfig& config,
                                         const ExpansionContext& context) {
  const Moves moves = [&](const KernelExpr& s) {
    std::vector<Move> out;
    for (BaseKind kind : config.base_set) {
      const KernelExpr b = KernelExpr::base(context.prototype(kind));
      if (enabled(config, Operator::add)) {
        if (const auto* sum = s.as<KernelExpr::Sum>()) {
          auto terms = sum->terms;
          terms.push_back(b);
          const auto last = "/" + std::to_string(terms.size() - 1);
          out.push_back({KernelExpr::sum(std::move(terms)), {last}});
        } else {
          out.push_back({KernelExpr::sum({s, b}), {"/1"}});
        }
      }
      if (enabled(config, Operator::multiply)) {
        if (const auto* prod = s.as<KernelExpr::Product>()) {
          auto factors = prod->factors;
          factors.push_back(b);
          const auto last = "/" + std::to_string(factors.size() - 1);
          out.push_back({KernelExpr::product(std::move(factors)), {last}});
        } else {
          out.push_back({KernelExpr::product({s, b}), {"/1"}});
        }
      }
      if (enabled(config, Operator::change_point))
        for (double loc : context.change_locations)
          out.push_back({KernelExpr::change_point(s, b, loc, context.steepness), {"", "/1"}});
      if (enabled(config, Operator::change_window))
        out.push_back({KernelExpr::change_window(s, b, context.window_start, context.window_end,
                                                 context.steepness),
                       {"", "/1"}});
    }
    return out;
  };

  std::set<std::string> seen{structure_key(expr)};
  std::vector<Candidate> unique;
  for (auto& candidate : replace_each(expr, moves))
    if (seen.insert(structure_key(candidate.expr)).second) unique.push_back(std::move(candidate));
  return unique;
}

}  // namespace

std::vector<KernelExpr> expand(const KernelExpr& expr, const SearchConfig& config,
                               const ExpansionContext& context) {
  std::vector<KernelExpr> out;
  for (auto& c : expand_candidates(expr, config, context)) out.push_back(std::move(c.expr));
  return out;
}

void SearchTrace::write_jsonl(std::ostream& out) const {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["round"] = r.round;
    j["expression"] = render(r.expr);
    j["structure"] = render_structure(r.expr);
    auto params = nlohmann::ordered_json::array();
    for (const auto& h : hyperparam_vector(r.expr))
      params.push_back({{"path", h.path}, {"name", h.name}, {"value", h.value}});
    j["hyperparameters"] = std::move(params);
    if (r.error.empty()) {
      j["noise_variance"] = r.noise_variance;
      j["lml"] = r.lml;
      j["bic"] = r.bic;
    } else {
      j["noise_variance"] = nullptr;
      j["lml"] = nullptr;
      j["bic"] = nullptr;
      j["error"] = r.error;
    }
    j["accepted"] = r.accepted;
    out << j.dump() << '\n';
  }
}

std::string SearchTrace::to_jsonl() const {
  std::ostringstream s;
  write_jsonl(s);
  return s.str();
}

SearchResult search(const TimeSeriesDataset& data, const SearchConfig& config) {
  if (config.max_depth < 1) throw InvalidKernel("max_depth must be at least 1");
  if (config.base_set.empty()) throw InvalidKernel("base_set must not be empty");
  if (config.beam_width < 1) throw InvalidKernel("beam_width must be at least 1");
  if (data.n_train() < 5) throw InvalidDataset("search needs at least five training points");

  const ExpansionContext context = ExpansionContext::for_data(data);
  SearchTrace trace;
  std::size_t fit_index = 0;

  // Fits and records every candidate; returns the successful ones.
  auto fit_round = [&](int round, const std::vector<Candidate>& candidates,
                       double start_noise) {
    std::vector<Scored> fitted;
    for (const auto& c : candidates) {
      OptimizeConfig oc{config.restarts, config.max_iters, config.seed + 7919 * ++fit_index,
                        resample_mask(c)};
      NoiseModel nm = config.noise;
      if (nm.learn) nm.variance = start_noise;
      TraceRecord rec{round, c.expr, 0.0, 0.0, 0.0, false, {}};
      try {
        const auto fit = optimize_hyperparams(c.expr, data, nm, oc);
        rec.expr = fit.expr;
        rec.noise_variance = fit.noise_variance;
        rec.lml = fit.lml;
        rec.bic = bic(fit.lml, bic_parameter_count(fit.expr), data.n_train());
        fitted.push_back(
            {trace.records.size(), rec.bic, hyperparam_count(fit.expr), render(fit.expr)});
      } catch (const Error& e) {
        rec.error = e.what();
      }
      trace.records.push_back(std::move(rec));
    }
    return fitted;
  };
  auto accept = [&](const std::vector<Scored>& chosen) {
    for (const auto& s : chosen) trace.records[s.slot].accepted = true;
  };

  std::vector<Candidate> bases;
  for (BaseKind kind : config.base_set)
    bases.push_back({KernelExpr::base(context.prototype(kind)), {""}});
  auto incumbents = top(fit_round(0, bases, 0.1 * context.signal_variance), config.beam_width);
  if (incumbents.empty()) throw OptimizationFailed("every base kernel failed to fit");
  accept(incumbents);

  std::set<std::string> evaluated;
  for (const auto& b : bases) evaluated.insert(structure_key(b.expr));

  for (int round = 1; round < config.max_depth; ++round) {
    std::vector<Candidate> candidates;
    for (const auto& inc : incumbents) {
      for (auto& c : expand_candidates(trace.records[inc.slot].expr, config, context))
        if (evaluated.insert(structure_key(c.expr)).second) candidates.push_back(std::move(c));
    }
    if (candidates.empty()) break;
    const double start_noise = trace.records[incumbents.front().slot].noise_variance;
    auto next = top(fit_round(round, candidates, start_noise), config.beam_width);
    if (next.empty() || !(next.front().bic < incumbents.front().bic)) break;
    accept(next);
    incumbents = std::move(next);
  }

  const auto& best = trace.records[incumbents.front().slot];
  return {best.expr, best.noise_variance, best.lml, best.bic, std::move(trace)};
}

}  // namespace kernelgen
