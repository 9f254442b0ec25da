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

#ifndef KERNELGEN_CODEGEN_HPP
#define KERNELGEN_CODEGEN_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kernelgen/algebra.hpp"
#include "kernelgen/dataset.hpp"
#include "kernelgen/kernel_expr.hpp"

namespace kernelgen {

enum class Dialect { stan2 };

struct EmitOptions {
  Dialect dialect = Dialect::stan2;
  double noise_variance = 0.0;
  // Diagonal inflation for K(X,X) + noise I and for the conditional
  // covariance. Unset means whatever the engine's jitter ladder picks for
  // this (kernel, data, noise).
  std::optional<double> train_jitter;
  std::optional<double> jitter;
};

/// One kernel-function call site with its inlined literals.
struct CallSite {
  std::string function;
  std::vector<double> literals;
  bool operator==(const CallSite&) const = default;
};

struct ProgramManifest {
  std::vector<std::string> functions;  // in functions-block order
  std::vector<CallSite> calls;         // every call site of the Sigma expression, in order
  double noise_variance = 0;
  double train_jitter = 0;
  double jitter = 0;
};

struct EmittedProgram {
  std::string functions_block;
  std::string data_block;
  std::string parameters_block;
  std::string transformed_parameters_block;
  std::string model_block;
  std::string generated_quantities_block;
  std::string rendered;  // the six blocks above, in order
  ProgramManifest manifest;
};

/// Names of the functions a canonical kernel needs, in emission order:
/// kernel_wn, kernel_c, kernel_lin, kernel_se, kernel_per, sigmoid_weight.
std::vector<std::string> required_functions(const CanonicalKernel& canon);

std::string emit_kernel_functions(const CanonicalKernel& canon);

/// Declarations only; throws InvalidDataset when the test split is empty.
std::string emit_data_block(const TimeSeriesDataset& data);

/// Companion data file for emit_data_block: {"N1", "x1", "y1", "N2", "x2"}.
std::string emit_data_json(const TimeSeriesDataset& data);

struct ModelCore {
  std::string parameters_block;
  std::string transformed_parameters_block;
  std::string model_block;
  std::string generated_quantities_block;
};

/// Gram matrices as sums over canonical terms of Hadamard products of
/// kernel calls; the training Gram carries noise + train_jitter on its
/// diagonal. Hyperparameters become %.17g literals.
ModelCore emit_model_core(const CanonicalKernel& canon, const TimeSeriesDataset& data,
                          double noise_variance, double train_jitter, double jitter);

/// Canonicalizes `expr` and emits the whole program. Byte-deterministic.
EmittedProgram emit_program(const KernelExpr& expr, const TimeSeriesDataset& data,
                            const EmitOptions& options = {});

/// What an emitted program computes, recovered from its text alone.
struct ProgramSemantics {
  CanonicalKernel kernel;  // rebuilt from the Sigma expression
  double noise_variance = 0;  // the Sigma diagonal literal, train jitter included
  double jitter = 0;
  // Gram matrices as the program text evaluates them on the given data.
  Eigen::MatrixXd sigma, omega, cross;
};

/// Reads the transformed-parameters block of an emitted program and
/// evaluates its Sigma, Omega and K on `data`. Throws SemanticsMismatch if
/// the text does not follow the emitted grammar or the three Gram
/// expressions disagree on the kernel.
ProgramSemantics read_program(const std::string& program_text, const TimeSeriesDataset& data);

/// n_draws x N2 draws of the program's y2 = mu + L z, computed from its
/// text with z ~ N(0, I) seeded by `seed`.
Eigen::MatrixXd sample_program(const std::string& program_text, const TimeSeriesDataset& data,
                               Eigen::Index n_draws, std::uint64_t seed);

struct SemanticsReport {
  Eigen::Index n_draws = 0;
  double max_mean_error = 0;       // max_i |sample mean_i - mu_i|
  double max_mean_ratio = 0;       // max_i error_i / bound_i; <= 1 passes
  double covariance_rel_error = 0; // ||S - Sigma||_F / ||Sigma||_F
  bool covariance_within = false;  // ||S - Sigma||_F <= 0.05 ||Sigma||_F + 1e-8

  bool passed() const { return max_mean_ratio <= 1.0 && covariance_within; }
};

/// validate_semantics without the verdict: the same draws and measurements,
/// returned whether or not they pass. Malformed programs still throw.
SemanticsReport compare_semantics(const EmittedProgram& program, const KernelExpr& expr,
                                  const TimeSeriesDataset& data, double noise_variance,
                                  Eigen::Index n_draws, std::uint64_t seed);

/// Runs the program's generated quantities (mu + L z, z ~ N(0, I) seeded)
/// n_draws times from its own text and compares the sample moments with the
/// engine's analytic posterior N(mu, Sigma) of (expr, noise_variance), with
/// Sigma carrying the engine's own jitter (the Gaussian its sampler targets).
/// Per component the mean must lie within 3 sqrt(Sigma_ii / n) +
/// 1e-8 (1 + |mu_i|); the sample covariance within 5% Frobenius + 1e-8.
/// Throws SemanticsMismatch otherwise.
SemanticsReport validate_semantics(const EmittedProgram& program, const KernelExpr& expr,
                                   const TimeSeriesDataset& data, double noise_variance,
                                   Eigen::Index n_draws, std::uint64_t seed);

}  // namespace kernelgen

#endif  // KERNELGEN_CODEGEN_HPP
