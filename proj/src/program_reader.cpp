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

// Interprets the Gram expressions of an emitted program. The reader accepts
// exactly the grammar emit_model_core writes:
//   gram   := term ('+' term)*
//   term   := factor ('.*' factor)*
//   factor := NAME '(' GRID ',' GRID (',' number)* ')'
//           | '(' weight '*' weight "'" ')'
//   weight := 'sigmoid_weight' '(' GRID ',' number ',' number ',' number ')'

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <string_view>

#include "kernelgen/codegen.hpp"
#include "kernelgen/errors.hpp"
#include "kernelgen/posterior.hpp"
#include "kernelgen/sampler.hpp"

namespace kernelgen {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

[[noreturn]] void fail(const std::string& what) {
  throw SemanticsMismatch("emitted program: " + what);
}

struct Token {
  enum Kind { name, number, symbol } kind;
  std::string text;
  double value = 0;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Token::name, std::string(s.substr(i, j - i))});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])) &&
                !out.empty() && (out.back().text == "(" || out.back().text == ","))) {
      double v = 0;
      auto [end, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v);
      if (ec != std::errc()) fail("bad number literal");
      const auto len = static_cast<std::size_t>(end - (s.data() + i));
      out.push_back({Token::number, std::string(s.substr(i, len)), v});
      i += len;
    } else if (c == '.' && i + 1 < s.size() && s[i + 1] == '*') {
      out.push_back({Token::symbol, ".*"});
      i += 2;
    } else {
      out.push_back({Token::symbol, std::string(1, c)});
      ++i;
    }
  }
  return out;
}

struct Factor {
  std::string function;
  std::string grid_a, grid_b;
  std::vector<double> literals;  // a sigmoid pair carries both weights' literals
};

using Term = std::vector<Factor>;
using Gram = std::vector<Term>;

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  // Positions the cursor just past "<target> =" at statement level.
  void seek_assignment(const std::string& target) {
    for (pos_ = 0; pos_ + 1 < tokens_.size(); ++pos_) {
      const bool at_start = pos_ == 0 || tokens_[pos_ - 1].text == ";" ||
                            tokens_[pos_ - 1].text == "{" || tokens_[pos_ - 1].text == "}";
      if (at_start && tokens_[pos_].text == target && tokens_[pos_ + 1].text == "=") {
        pos_ += 2;
        return;
      }
    }
    fail("no assignment to " + target);
  }

  Gram gram() {
    Gram g{term()};
    while (peek("+")) {
      ++pos_;
      g.push_back(term());
    }
    return g;
  }

  void expect(const std::string& text) {
    if (!peek(text)) fail("expected '" + text + "' near token " + std::to_string(pos_));
    ++pos_;
  }

  double number() {
    if (pos_ >= tokens_.size() || tokens_[pos_].kind != Token::number) fail("expected a literal");
    return tokens_[pos_++].value;
  }

  std::string name() {
    if (pos_ >= tokens_.size() || tokens_[pos_].kind != Token::name) fail("expected a name");
    return tokens_[pos_++].text;
  }

  bool peek(const std::string& text) const {
    return pos_ < tokens_.size() && tokens_[pos_].text == text;
  }

 private:
  Term term() {
    Term t{factor()};
    while (peek(".*")) {
      ++pos_;
      t.push_back(factor());
    }
    return t;
  }

  Factor factor() {
    if (peek("(")) {
      ++pos_;
      Factor f{"sigmoid_weight", "", "", {}};
      weight(f.grid_a, f.literals);
      expect("*");
      weight(f.grid_b, f.literals);
      expect("'");
      expect(")");
      return f;
    }
    Factor f{name(), "", "", {}};
    expect("(");
    f.grid_a = name();
    expect(",");
    f.grid_b = name();
    while (peek(",")) {
      ++pos_;
      f.literals.push_back(number());
    }
    expect(")");
    return f;
  }

  void weight(std::string& grid, std::vector<double>& literals) {
    if (name() != "sigmoid_weight") fail("expected sigmoid_weight");
    expect("(");
    grid = name();
    for (int i = 0; i < 3; ++i) {
      expect(",");
      literals.push_back(number());
    }
    expect(")");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

BaseKernel base_of(const Factor& f) {
  const auto& v = f.literals;
  auto need = [&](std::size_t n) {
    if (v.size() != n) fail(f.function + " takes " + std::to_string(n) + " literals");
  };
  BaseKernel b;
  if (f.function == "kernel_wn") {
    need(1);
    b = WhiteNoise{v[0]};
  } else if (f.function == "kernel_c") {
    need(1);
    b = Constant{v[0]};
  } else if (f.function == "kernel_lin") {
    need(2);
    b = Linear{v[0], v[1]};
  } else if (f.function == "kernel_se") {
    need(2);
    b = SquaredExp{v[0], v[1]};
  } else if (f.function == "kernel_per") {
    need(3);
    b = Periodic{v[0], v[1], v[2]};
  } else {
    fail("unknown kernel function " + f.function);
  }
  try {
    validate(b);
  } catch (const InvalidKernel& e) {
    fail(e.what());
  }
  return b;
}

SigmoidFactor sigmoid_of(const double* lit) {
  if (!(lit[1] > 0)) fail("sigmoid steepness must be positive");
  return {lit[0], lit[1], lit[2] != 0 ? Orientation::rising : Orientation::falling};
}

const VectorXd& grid_named(const std::string& name, const VectorXd& x1, const VectorXd& x2) {
  if (name == "x1") return x1;
  if (name == "x2") return x2;
  fail("unknown grid " + name);
}

MatrixXd evaluate(const Gram& g, const VectorXd& x1, const VectorXd& x2) {
  MatrixXd total;
  for (const auto& term : g) {
    MatrixXd acc;
    for (const auto& f : term) {
      const VectorXd& a = grid_named(f.grid_a, x1, x2);
      const VectorXd& b = grid_named(f.grid_b, x1, x2);
      MatrixXd m;
      if (f.function == "sigmoid_weight") {
        const VectorXd wa = detail::sigmoid_vector(sigmoid_of(f.literals.data()), a);
        const VectorXd wb = detail::sigmoid_vector(sigmoid_of(f.literals.data() + 3), b);
        m = wa * wb.transpose();
      } else {
        m = detail::base_gram(base_of(f), a, b);
      }
      if (acc.size() == 0) acc = std::move(m);
      else if (acc.rows() == m.rows() && acc.cols() == m.cols()) acc.array() *= m.array();
      else fail("Hadamard product of mismatched shapes");
    }
    if (total.size() == 0) total = std::move(acc);
    else if (total.rows() == acc.rows() && total.cols() == acc.cols()) total += acc;
    else fail("sum of mismatched shapes");
  }
  return total;
}

// Grids stripped: the three Gram expressions must describe one kernel.
bool same_kernel(const Gram& a, const Gram& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (a[t].size() != b[t].size()) return false;
    for (std::size_t i = 0; i < a[t].size(); ++i)
      if (a[t][i].function != b[t][i].function || a[t][i].literals != b[t][i].literals)
        return false;
  }
  return true;
}

bool grids_are(const Gram& g, const char* a, const char* b) {
  for (const auto& term : g)
    for (const auto& f : term)
      if (f.grid_a != a || f.grid_b != b) return false;
  return true;
}

CanonicalKernel rebuild(const Gram& g) {
  CanonicalKernel canon;
  for (const auto& term : g) {
    ProductTerm pt{Constant{1.0}, {}, {}};
    std::optional<SquaredExp> se;
    std::vector<Periodic> pers;
    for (const auto& f : term) {
      if (f.function == "sigmoid_weight") {
        pt.sigmoid_factors.push_back(sigmoid_of(f.literals.data()));
        continue;
      }
      const BaseKernel b = base_of(f);
      if (const auto* k = std::get_if<WhiteNoise>(&b)) pt.core = *k;
      else if (const auto* k = std::get_if<Constant>(&b)) pt.core = *k;
      else if (const auto* k = std::get_if<Linear>(&b)) pt.lin_factors.push_back(*k);
      else if (const auto* k = std::get_if<SquaredExp>(&b)) se = *k;
      else pers.push_back(std::get<Periodic>(b));
    }
    if (se) pt.core = SmoothPeriodic{*se, pers};
    else if (!pers.empty()) pt.core = PeriodicProduct{pers};
    canon.terms.push_back(std::move(pt));
  }
  return canon;
}

}  // namespace

ProgramSemantics read_program(const std::string& program_text, const TimeSeriesDataset& data) {
  const auto begin = program_text.find("transformed parameters {");
  if (begin == std::string::npos) fail("no transformed parameters block");
  Parser p(tokenize(std::string_view(program_text).substr(begin)));

  p.seek_assignment("Sigma");
  p.expect("add_diag");
  p.expect("(");
  const Gram sigma = p.gram();
  p.expect(",");
  const double noise = p.number();
  p.expect(")");
  p.expect(";");

  p.seek_assignment("Omega");
  const Gram omega = p.gram();
  p.expect(";");
  p.seek_assignment("K");
  const Gram cross = p.gram();
  p.expect(";");

  p.seek_assignment("L");
  p.expect("cholesky_decompose");
  p.expect("(");
  p.expect("add_diag");
  p.expect("(");
  for (const char* t : {"0.5", "*", "(", "C", "+", "C", "'", ")", ","}) p.expect(t);
  const double jitter = p.number();

  if (!same_kernel(sigma, omega) || !same_kernel(sigma, cross))
    fail("Sigma, Omega and K describe different kernels");
  if (!grids_are(sigma, "x1", "x1") || !grids_are(omega, "x2", "x2") || !grids_are(cross, "x1", "x2"))
    fail("a Gram expression is evaluated on the wrong grids");
  if (!(noise >= 0) || !(jitter >= 0)) fail("negative diagonal literal");

  const VectorXd x1 = data.train_times(), x2 = data.test_times();
  ProgramSemantics s;
  s.kernel = rebuild(sigma);
  s.noise_variance = noise;
  s.jitter = jitter;
  s.sigma = evaluate(sigma, x1, x2);
  s.sigma.diagonal().array() += noise;
  s.omega = evaluate(omega, x1, x2);
  s.cross = evaluate(cross, x1, x2);
  return s;
}

Eigen::MatrixXd sample_program(const std::string& program_text, const TimeSeriesDataset& data,
                               Eigen::Index n_draws, std::uint64_t seed) {
  const auto sem = read_program(program_text, data);
  // The program's own conditioning: plain Cholesky, no ladder beyond its literals.
  const JitterPolicy exact{{0.0, 0.0, 0.0, 0.0, 0.0}, 1.0};
  PosteriorGaussian<double> prog;
  try {
    const auto train = cholesky(sem.sigma, exact);
    const auto L = train.lower.triangularView<Eigen::Lower>();
    const VectorXd y1 = data.train_values();
    const MatrixXd v = L.solve(sem.cross);
    prog.mean = v.transpose() * L.solve(y1);
    MatrixXd c = sem.omega - v.transpose() * v;
    c = (0.5 * (c + c.transpose())).eval();
    c.diagonal().array() += sem.jitter;
    prog.chol = cholesky(c, exact).lower;
  } catch (const NotPositiveDefinite& e) {
    fail(std::string("Cholesky fails on the program's matrices: ") + e.what());
  }
  return sample_posterior(prog, n_draws, seed);
}

SemanticsReport compare_semantics(const EmittedProgram& program, const KernelExpr& expr,
                                  const TimeSeriesDataset& data, double noise_variance,
                                  Eigen::Index n_draws, std::uint64_t seed) {
  if (n_draws < 2) throw InvalidDataset("semantic comparison needs at least two draws");
  const MatrixXd draws = sample_program(program.rendered, data, n_draws, seed);

  auto engine = posterior(expr, data, noise_variance);
  engine.covariance.diagonal().array() += engine.jitter;
  const VectorXd mean = draws.colwise().mean();
  const MatrixXd centered = draws.rowwise() - mean.transpose();
  const MatrixXd cov = centered.transpose() * centered / double(n_draws - 1);

  SemanticsReport r;
  r.n_draws = n_draws;
  const double n = static_cast<double>(n_draws);
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    const double err = std::abs(mean(i) - engine.mean(i));
    const double bound = 3 * std::sqrt(std::max(engine.covariance(i, i), 0.0) / n) +
                         1e-8 * (1 + std::abs(engine.mean(i)));
    r.max_mean_error = std::max(r.max_mean_error, err);
    r.max_mean_ratio = std::max(r.max_mean_ratio, err / bound);
  }
  const double ref = engine.covariance.norm();
  const double diff = (cov - engine.covariance).norm();
  r.covariance_rel_error = ref > 0 ? diff / ref : diff;
  r.covariance_within = diff <= 0.05 * ref + 1e-8;
  return r;
}

SemanticsReport validate_semantics(const EmittedProgram& program, const KernelExpr& expr,
                                   const TimeSeriesDataset& data, double noise_variance,
                                   Eigen::Index n_draws, std::uint64_t seed) {
  const auto r = compare_semantics(program, expr, data, noise_variance, n_draws, seed);
  if (!(r.max_mean_ratio <= 1.0))
    fail("sample mean off by " + std::to_string(r.max_mean_ratio) + "x the Monte Carlo bound");
  if (!r.covariance_within)
    fail("sample covariance off by " + std::to_string(r.covariance_rel_error) + " relative");
  return r;
}

}  // namespace kernelgen
