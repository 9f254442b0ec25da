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

#ifndef KERNELGEN_SEARCH_HPP
#define KERNELGEN_SEARCH_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kernelgen/dataset.hpp"
#include "kernelgen/kernel_expr.hpp"
#include "kernelgen/optimize.hpp"

namespace kernelgen {

enum class Operator { add, multiply, change_point, change_window };

struct SearchConfig {
  int max_depth = 3;  // rounds, counting the base-kernel round
  std::vector<BaseKind> base_set{BaseKind::wn, BaseKind::c, BaseKind::lin, BaseKind::se,
                                 BaseKind::per};
  std::vector<Operator> operators{Operator::add, Operator::multiply, Operator::change_point,
                                  Operator::change_window};
  int beam_width = 1;
  int restarts = 3;
  int max_iters = 200;
  std::uint64_t seed = 0;
  NoiseModel noise;
  bool operator==(const SearchConfig&) const = default;
};

/// Where new leaves and change operators are placed. Bound to a dataset,
/// change points sit at the 0.25/0.5/0.75 time quantiles, windows cover the
/// middle third, and new leaves get data-scaled hyperparameters.
struct ExpansionContext {
  std::vector<double> change_locations{0.0};
  double window_start = 0.0;
  double window_end = 1.0;
  double steepness = 1.0;
  double signal_variance = 1.0;
  double time_range = 1.0;
  double time_origin = 0.0;

  static ExpansionContext for_data(const TimeSeriesDataset& data);
  BaseKernel prototype(BaseKind kind) const;
};

/// Structural identity used for deduplication: the hyperparameter-free
/// rendering of the canonical form plus the locations of its sigmoids, so
/// change points at different quantiles stay distinct.
std::string structure_key(const KernelExpr& expr);

/// All one-step grammar moves S -> S + B, S * B, CP(S, B), CW(S, B) over
/// every subexpression S and base B, deduplicated by structure_key and
/// excluding anything structurally equal to `expr`. Order is deterministic.
std::vector<KernelExpr> expand(const KernelExpr& expr, const SearchConfig& config,
                               const ExpansionContext& context = {});

struct TraceRecord {
  int round = 0;
  KernelExpr expr;
  double noise_variance = 0;
  double lml = 0;
  double bic = 0;
  bool accepted = false;
  std::string error;  // non-empty when the fit failed
};

struct SearchTrace {
  std::vector<TraceRecord> records;

  /// One JSON object per line, one line per candidate.
  void write_jsonl(std::ostream& out) const;
  std::string to_jsonl() const;
};

struct SearchResult {
  KernelExpr best;
  double noise_variance;
  double lml;
  double bic;
  SearchTrace trace;
};

/// Greedy BIC-driven search. Round 0 fits every base kernel; each later
/// round expands the incumbents, refits every candidate from the
/// incumbent's values (plus random restarts) and keeps the beam_width best.
/// Stops after max_depth rounds or when no candidate improves on the best
/// BIC so far. Candidates that fail to fit are recorded and skipped.
/// Throws OptimizationFailed if every base kernel fails.
SearchResult search(const TimeSeriesDataset& data, const SearchConfig& config);

}  // namespace kernelgen

#endif  // KERNELGEN_SEARCH_HPP
