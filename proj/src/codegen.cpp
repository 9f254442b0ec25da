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

#include "kernelgen/codegen.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "kernelgen/errors.hpp"
#include "kernelgen/format.hpp"
#include "kernelgen/parse.hpp"
#include "kernelgen/posterior.hpp"

namespace kernelgen {

namespace {

constexpr const char* kIndent = "  ";

std::string literal(double v) {
  if (!std::isfinite(v)) throw InvalidKernel("cannot emit a non-finite literal");
  return format_17g(v);
}

constexpr const char* kWn = R"(  matrix kernel_wn(vector xa, vector xb, real variance) {
    matrix[rows(xa), rows(xb)] k;
    for (i in 1:rows(xa)) {
      for (j in 1:rows(xb)) {
        k[i, j] = xa[i] == xb[j] ? variance : 0;
      }
    }
    return k;
  }
)";

constexpr const char* kC = R"(  matrix kernel_c(vector xa, vector xb, real variance) {
    return rep_matrix(variance, rows(xa), rows(xb));
  }
)";

constexpr const char* kLin = R"(  matrix kernel_lin(vector xa, vector xb, real variance, real offset) {
    return variance * (xa - offset) * (xb - offset)';
  }
)";

constexpr const char* kSe = R"(  matrix kernel_se(vector xa, vector xb, real variance, real lengthscale) {
    matrix[rows(xa), rows(xb)] k;
    for (i in 1:rows(xa)) {
      for (j in 1:rows(xb)) {
        k[i, j] = variance * exp(-0.5 * square((xa[i] - xb[j]) / lengthscale));
      }
    }
    return k;
  }
)";

// Divided through by exp(a) so the Bessel term never overflows.
constexpr const char* kPer = R"(  matrix kernel_per(vector xa, vector xb, real variance, real lengthscale, real period) {
    real a = inv_square(lengthscale);
    real m = expm1(log_modified_bessel_first_kind(0, a) - a);
    matrix[rows(xa), rows(xb)] k;
    for (i in 1:rows(xa)) {
      for (j in 1:rows(xb)) {
        k[i, j] = variance * (expm1(a * (cos(2 * pi() * (xa[i] - xb[j]) / period) - 1)) - m) / -m;
      }
    }
    return k;
  }
)";

constexpr const char* kSigmoid = R"(  vector sigmoid_weight(vector x, real location, real steepness, int rising) {
    vector[rows(x)] t = tanh((location - x) / steepness);
    return rising ? 0.5 * (1 + t) : 0.5 * (1 - t);
  }
)";

CallSite call_of(const BaseKernel& b) {
  return std::visit(overloaded{
                        [](const WhiteNoise& k) { return CallSite{"kernel_wn", {k.variance}}; },
                        [](const Constant& k) { return CallSite{"kernel_c", {k.variance}}; },
                        [](const Linear& k) {
                          return CallSite{"kernel_lin", {k.variance, k.offset}};
                        },
                        [](const SquaredExp& k) {
                          return CallSite{"kernel_se", {k.variance, k.lengthscale}};
                        },
                        [](const Periodic& k) {
                          return CallSite{"kernel_per", {k.variance, k.lengthscale, k.period}};
                        },
                    },
                    b);
}

CallSite call_of(const SigmoidFactor& s) {
  return {"sigmoid_weight",
          {s.location, s.steepness, s.orientation == Orientation::rising ? 1.0 : 0.0}};
}

// Call sites of one product term, in to_expr factor order.
std::vector<CallSite> term_calls(const ProductTerm& term) {
  std::vector<CallSite> calls;
  std::visit(overloaded{
                 [&](const WhiteNoise& k) { calls.push_back(call_of(BaseKernel{k})); },
                 [&](const Constant& k) {
                   if (!(k.variance == 1.0 && !term.lin_factors.empty()))
                     calls.push_back(call_of(BaseKernel{k}));
                 },
                 [&](const PeriodicProduct& k) {
                   for (const auto& p : k.factors) calls.push_back(call_of(BaseKernel{p}));
                 },
                 [&](const SmoothPeriodic& k) {
                   calls.push_back(call_of(BaseKernel{k.se}));
                   for (const auto& p : k.factors) calls.push_back(call_of(BaseKernel{p}));
                 },
             },
             term.core);
  for (const auto& l : term.lin_factors) calls.push_back(call_of(BaseKernel{l}));
  for (const auto& s : term.sigmoid_factors) calls.push_back(call_of(s));
  return calls;
}

std::string render_call(const CallSite& c, const char* xa, const char* xb) {
  std::ostringstream out;
  if (c.function == "sigmoid_weight") {
    const std::string args = ", " + literal(c.literals[0]) + ", " + literal(c.literals[1]) +
                             ", " + (c.literals[2] != 0 ? "1" : "0") + ")";
    out << "(sigmoid_weight(" << xa << args << " * sigmoid_weight(" << xb << args << "')";
    return out.str();
  }
  out << c.function << '(' << xa << ", " << xb;
  for (double v : c.literals) out << ", " << literal(v);
  out << ')';
  return out.str();
}

// Sum over terms of Hadamard products; one term per line after the first.
std::string gram_expression(const CanonicalKernel& canon, const char* xa, const char* xb,
                            const std::string& continuation) {
  std::string out;
  for (std::size_t t = 0; t < canon.terms.size(); ++t) {
    if (t > 0) out += "\n" + continuation + "+ ";
    const auto calls = term_calls(canon.terms[t]);
    for (std::size_t i = 0; i < calls.size(); ++i) {
      if (i > 0) out += " .* ";
      out += render_call(calls[i], xa, xb);
    }
  }
  return out;
}

std::string block(const char* name, const std::string& body) {
  return std::string(name) + " {\n" + body + "}\n";
}

}  // namespace

std::vector<std::string> required_functions(const CanonicalKernel& canon) {
  const auto kinds = base_kinds(canon);
  std::vector<std::string> names;
  // BaseKind's declaration order is the emission order
  for (BaseKind k : kinds) {
    switch (k) {
      case BaseKind::wn: names.emplace_back("kernel_wn"); break;
      case BaseKind::c: names.emplace_back("kernel_c"); break;
      case BaseKind::lin: names.emplace_back("kernel_lin"); break;
      case BaseKind::se: names.emplace_back("kernel_se"); break;
      case BaseKind::per: names.emplace_back("kernel_per"); break;
    }
  }
  if (has_sigmoids(canon)) names.emplace_back("sigmoid_weight");
  return names;
}

std::string emit_kernel_functions(const CanonicalKernel& canon) {
  std::string body;
  for (const auto& name : required_functions(canon)) {
    if (!body.empty()) body += "\n";
    if (name == "kernel_wn") body += kWn;
    else if (name == "kernel_c") body += kC;
    else if (name == "kernel_lin") body += kLin;
    else if (name == "kernel_se") body += kSe;
    else if (name == "kernel_per") body += kPer;
    else body += kSigmoid;
  }
  return block("functions", body);
}

std::string emit_data_block(const TimeSeriesDataset& data) {
  if (data.n_test() < 1) throw InvalidDataset("program emission needs at least one test point");
  return block("data",
               "  int<lower=1> N1;\n"
               "  vector[N1] x1;\n"
               "  vector[N1] y1;\n"
               "  int<lower=1> N2;\n"
               "  vector[N2] x2;\n");
}

std::string emit_data_json(const TimeSeriesDataset& data) {
  if (data.n_test() < 1) throw InvalidDataset("program emission needs at least one test point");
  auto to_list = [](const auto& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  const Eigen::VectorXd x1 = data.train_times(), y1 = data.train_values(),
                        x2 = data.test_times();
  nlohmann::ordered_json j;
  j["N1"] = data.n_train();
  j["x1"] = to_list(x1);
  j["y1"] = to_list(y1);
  j["N2"] = data.n_test();
  j["x2"] = to_list(x2);
  return j.dump(2) + "\n";
}

ModelCore emit_model_core(const CanonicalKernel& canon, const TimeSeriesDataset& data,
                          double noise_variance, double train_jitter, double jitter) {
  if (data.n_test() < 1) throw InvalidDataset("program emission needs at least one test point");
  if (canon.terms.empty()) throw InvalidKernel("canonical kernel has no terms");
  if (!(noise_variance >= 0) || !(train_jitter >= 0) || !(jitter >= 0))
    throw InvalidKernel("noise and jitter literals must be non-negative");

  ModelCore core;
  core.parameters_block = block("parameters", "  vector[N2] z;\n");

  const std::string cont = std::string(kIndent) + "        ";
  std::ostringstream tp;
  tp << kIndent << "matrix[N1, N1] Sigma;\n"
     << kIndent << "matrix[N2, N2] Omega;\n"
     << kIndent << "matrix[N1, N2] K;\n"
     << kIndent << "vector[N2] mu;\n"
     << kIndent << "matrix[N2, N2] L;\n"
     << kIndent << "Sigma = add_diag(" << gram_expression(canon, "x1", "x1", cont) << ",\n"
     << cont << literal(noise_variance + train_jitter) << ");\n"
     << kIndent << "Omega = " << gram_expression(canon, "x2", "x2", cont) << ";\n"
     << kIndent << "K = " << gram_expression(canon, "x1", "x2", cont) << ";\n"
     << kIndent << "{\n"
     << kIndent << kIndent << "matrix[N1, N1] L_Sigma = cholesky_decompose(Sigma);\n"
     << kIndent << kIndent << "matrix[N1, N2] v = mdivide_left_tri_low(L_Sigma, K);\n"
     << kIndent << kIndent << "matrix[N2, N2] C = Omega - v' * v;\n"
     << kIndent << kIndent << "mu = v' * mdivide_left_tri_low(L_Sigma, y1);\n"
     << kIndent << kIndent << "L = cholesky_decompose(add_diag(0.5 * (C + C'), "
     << literal(jitter) << "));\n"
     << kIndent << "}\n";
  core.transformed_parameters_block = block("transformed parameters", tp.str());
  core.model_block = block("model", "  z ~ std_normal();\n");
  core.generated_quantities_block = block("generated quantities", "  vector[N2] y2 = mu + L * z;\n");
  return core;
}

EmittedProgram emit_program(const KernelExpr& expr, const TimeSeriesDataset& data,
                            const EmitOptions& options) {
  if (options.dialect != Dialect::stan2) throw InvalidKernel("unsupported dialect");
  const CanonicalKernel canon = simplify(expr);

  double train_jitter = options.train_jitter.value_or(0.0);
  double jitter = options.jitter.value_or(0.0);
  if (!options.train_jitter || !options.jitter) {
    const auto post = posterior(expr, data, options.noise_variance);
    if (!options.train_jitter) train_jitter = post.train_jitter;
    if (!options.jitter) jitter = post.jitter;
  }

  EmittedProgram p;
  p.functions_block = emit_kernel_functions(canon);
  p.data_block = emit_data_block(data);
  auto core = emit_model_core(canon, data, options.noise_variance, train_jitter, jitter);
  p.parameters_block = std::move(core.parameters_block);
  p.transformed_parameters_block = std::move(core.transformed_parameters_block);
  p.model_block = std::move(core.model_block);
  p.generated_quantities_block = std::move(core.generated_quantities_block);

  p.rendered = "// kernel: " + render(to_expr(canon)) + "\n";
  for (const std::string* b : {&p.functions_block, &p.data_block, &p.parameters_block,
                               &p.transformed_parameters_block, &p.model_block,
                               &p.generated_quantities_block})
    p.rendered += "\n" + *b;

  p.manifest.functions = required_functions(canon);
  for (const auto& term : canon.terms)
    for (auto& c : term_calls(term)) p.manifest.calls.push_back(std::move(c));
  p.manifest.noise_variance = options.noise_variance;
  p.manifest.train_jitter = train_jitter;
  p.manifest.jitter = jitter;
  return p;
}

}  // namespace kernelgen
