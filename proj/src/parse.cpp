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

#include "kernelgen/parse.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <utility>
#include <vector>

#include "kernelgen/errors.hpp"
#include "kernelgen/format.hpp"

namespace kernelgen {

namespace {

enum class Tok { name, number, plus, star, lparen, rparen, lbracket, rbracket, comma, equals, end };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t offset;
};

std::string_view describe_token(const Token& t) {
  return t.kind == Tok::end ? std::string_view("end of input") : t.text;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= text_.size()) return {Tok::end, {}, start};
    const char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      return {Tok::name, text_.substr(start, pos_ - start), start};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
      ++pos_;
      while (pos_ < text_.size()) {
        const char d = text_[pos_];
        const bool exp_sign =
            (d == '-' || d == '+') && (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E');
        if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' || d == 'E' ||
            exp_sign) {
          ++pos_;
        } else {
          break;
        }
      }
      return {Tok::number, text_.substr(start, pos_ - start), start};
    }
    ++pos_;
    switch (c) {
      case '+':
        return {Tok::plus, text_.substr(start, 1), start};
      case '*':
        return {Tok::star, text_.substr(start, 1), start};
      case '(':
        return {Tok::lparen, text_.substr(start, 1), start};
      case ')':
        return {Tok::rparen, text_.substr(start, 1), start};
      case '[':
        return {Tok::lbracket, text_.substr(start, 1), start};
      case ']':
        return {Tok::rbracket, text_.substr(start, 1), start};
      case ',':
        return {Tok::comma, text_.substr(start, 1), start};
      case '=':
        return {Tok::equals, text_.substr(start, 1), start};
      default:
        throw ParseError("unexpected character '" + std::string(1, c) + "'", start);
    }
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

struct Param {
  double value;
  std::size_t offset;
};

using ParamMap = std::map<std::string, Param, std::less<>>;

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& options) : lexer_(text), options_(options) {
    advance();
  }

  KernelExpr parse_all() {
    KernelExpr e = parse_sum();
    if (cur_.kind != Tok::end) fail("unexpected '" + std::string(describe_token(cur_)) + "'");
    return e;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, cur_.offset);
  }

  void expect(Tok kind, const char* what) {
    if (cur_.kind != kind) {
      fail(std::string("expected ") + what + ", found '" + std::string(describe_token(cur_)) +
           "'");
    }
    advance();
  }

  KernelExpr parse_sum() {
    std::vector<KernelExpr> terms;
    terms.push_back(parse_product());
    while (cur_.kind == Tok::plus) {
      advance();
      terms.push_back(parse_product());
    }
    return terms.size() == 1 ? terms.front() : KernelExpr::sum(std::move(terms));
  }

  KernelExpr parse_product() {
    std::vector<KernelExpr> factors;
    factors.push_back(parse_atom());
    while (cur_.kind == Tok::star) {
      advance();
      factors.push_back(parse_atom());
    }
    return factors.size() == 1 ? factors.front() : KernelExpr::product(std::move(factors));
  }

  KernelExpr parse_atom() {
    if (cur_.kind == Tok::lparen) {
      advance();
      KernelExpr inner = parse_sum();
      expect(Tok::rparen, "')'");
      return inner;
    }
    if (cur_.kind != Tok::name) {
      fail("expected kernel, found '" + std::string(describe_token(cur_)) + "'");
    }
    const Token name = cur_;
    advance();
    if (name.text == "CP" || name.text == "CW") return parse_change(name);
    if (name.text == "SIGMOID") {
      throw ParseError("sigmoid factors cannot be written directly", name.offset);
    }
    ParamMap params = parse_params();
    try {
      return build_base(name, params);
    } catch (const InvalidKernel& e) {
      throw ParseError(e.what(), name.offset);
    }
  }

  KernelExpr parse_change(const Token& name) {
    expect(Tok::lparen, "'('");
    KernelExpr first = parse_sum();
    expect(Tok::comma, "','");
    KernelExpr second = parse_sum();
    expect(Tok::rparen, "')'");
    ParamMap params = parse_params();
    try {
      if (name.text == "CP") {
        check_names(params, {"location", "steepness"});
        const double mid = options_.data_range
                               ? 0.5 * (options_.data_range->min + options_.data_range->max)
                               : 0.0;
        return KernelExpr::change_point(first, second, take(params, "location", mid),
                                        take(params, "steepness", 1.0));
      }
      check_names(params, {"start", "end", "steepness"});
      double start = 0.0;
      double end = 1.0;
      if (options_.data_range) {
        const double span = options_.data_range->max - options_.data_range->min;
        start = options_.data_range->min + span / 3.0;
        end = options_.data_range->min + 2.0 * span / 3.0;
      }
      return KernelExpr::change_window(first, second, take(params, "start", start),
                                       take(params, "end", end), take(params, "steepness", 1.0));
    } catch (const InvalidKernel& e) {
      throw ParseError(e.what(), name.offset);
    }
  }

  ParamMap parse_params() {
    ParamMap params;
    if (cur_.kind != Tok::lbracket) return params;
    advance();
    while (true) {
      if (cur_.kind != Tok::name) fail("expected hyperparameter name");
      const Token key = cur_;
      advance();
      expect(Tok::equals, "'='");
      if (cur_.kind != Tok::number) fail("expected number");
      double value = 0.0;
      const char* first = cur_.text.data();
      const char* last = first + cur_.text.size();
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last) fail("malformed number '" + std::string(cur_.text) + "'");
      if (!params.emplace(std::string(key.text), Param{value, key.offset}).second) {
        throw ParseError("duplicate hyperparameter '" + std::string(key.text) + "'", key.offset);
      }
      advance();
      if (cur_.kind == Tok::comma) {
        advance();
        continue;
      }
      expect(Tok::rbracket, "']'");
      break;
    }
    return params;
  }

  static void check_names(const ParamMap& params, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, p] : params) {
      bool ok = false;
      for (auto a : allowed) ok = ok || key == a;
      if (!ok) throw ParseError("unknown hyperparameter '" + key + "'", p.offset);
    }
  }

  static double take(const ParamMap& params, std::string_view key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second.value;
  }

  static KernelExpr build_base(const Token& name, const ParamMap& p) {
    const std::string_view n = name.text;
    if (n == "WN") {
      check_names(p, {"variance"});
      return KernelExpr::base(WhiteNoise{take(p, "variance", 1.0)});
    }
    if (n == "C") {
      check_names(p, {"variance"});
      return KernelExpr::base(Constant{take(p, "variance", 1.0)});
    }
    if (n == "LIN") {
      check_names(p, {"variance", "offset"});
      return KernelExpr::base(Linear{take(p, "variance", 1.0), take(p, "offset", 0.0)});
    }
    if (n == "SE") {
      check_names(p, {"variance", "lengthscale"});
      return KernelExpr::base(SquaredExp{take(p, "variance", 1.0), take(p, "lengthscale", 1.0)});
    }
    if (n == "PER") {
      check_names(p, {"variance", "lengthscale", "period"});
      return KernelExpr::base(Periodic{take(p, "variance", 1.0), take(p, "lengthscale", 1.0),
                                       take(p, "period", 1.0)});
    }
    throw ParseError("unknown kernel '" + std::string(n) + "'", name.offset);
  }

  Lexer lexer_;
  const ParseOptions& options_;
  Token cur_{Tok::end, {}, 0};
};

// Rendering.

class ParamWriter {
 public:
  explicit ParamWriter(bool enabled) : enabled_(enabled) {}

  void add(std::string_view key, double value, double fallback) {
    if (!enabled_ || value == fallback) return;
    if (!body_.empty()) body_ += ", ";
    body_ += key;
    body_ += '=';
    body_ += format_shortest(value);
  }

  // Always written: orientation is structure, not a hyperparameter.
  void add_raw(std::string_view key, std::string_view value) {
    if (!body_.empty()) body_ += ", ";
    body_ += key;
    body_ += '=';
    body_ += value;
  }

  std::string str() const { return body_.empty() ? std::string() : "[" + body_ + "]"; }

 private:
  bool enabled_;
  std::string body_;
};

void render_into(const KernelExpr& expr, bool with_params, std::string& out);

void render_child(const KernelExpr& child, bool parens, bool with_params, std::string& out) {
  if (parens) out += '(';
  render_into(child, with_params, out);
  if (parens) out += ')';
}

void render_into(const KernelExpr& expr, bool with_params, std::string& out) {
  std::visit(
      overloaded{
          [&](const BaseKernel& base) {
            out += kind_name(kind_of(base));
            ParamWriter w(with_params);
            std::visit(overloaded{
                           [&](const WhiteNoise& k) { w.add("variance", k.variance, 1.0); },
                           [&](const Constant& k) { w.add("variance", k.variance, 1.0); },
                           [&](const Linear& k) {
                             w.add("variance", k.variance, 1.0);
                             w.add("offset", k.offset, 0.0);
                           },
                           [&](const SquaredExp& k) {
                             w.add("variance", k.variance, 1.0);
                             w.add("lengthscale", k.lengthscale, 1.0);
                           },
                           [&](const Periodic& k) {
                             w.add("variance", k.variance, 1.0);
                             w.add("lengthscale", k.lengthscale, 1.0);
                             w.add("period", k.period, 1.0);
                           },
                       },
                       base);
            out += w.str();
          },
          [&](const KernelExpr::Sum& s) {
            for (std::size_t i = 0; i < s.terms.size(); ++i) {
              if (i) out += " + ";
              render_child(s.terms[i], s.terms[i].as<KernelExpr::Sum>() != nullptr, with_params,
                           out);
            }
          },
          [&](const KernelExpr::Product& p) {
            for (std::size_t i = 0; i < p.factors.size(); ++i) {
              if (i) out += " * ";
              const auto& f = p.factors[i];
              const bool parens =
                  f.as<KernelExpr::Sum>() != nullptr || f.as<KernelExpr::Product>() != nullptr;
              render_child(f, parens, with_params, out);
            }
          },
          [&](const KernelExpr::ChangePoint& c) {
            out += "CP(";
            render_into(c.left, with_params, out);
            out += ", ";
            render_into(c.right, with_params, out);
            out += ')';
            ParamWriter w(with_params);
            w.add("location", c.location, 0.0);
            w.add("steepness", c.steepness, 1.0);
            out += w.str();
          },
          [&](const KernelExpr::ChangeWindow& c) {
            out += "CW(";
            render_into(c.inside, with_params, out);
            out += ", ";
            render_into(c.outside, with_params, out);
            out += ')';
            ParamWriter w(with_params);
            w.add("start", c.start, 0.0);
            w.add("end", c.end, 1.0);
            w.add("steepness", c.steepness, 1.0);
            out += w.str();
          },
          [&](const SigmoidFactor& f) {
            out += "SIGMOID";
            ParamWriter w(with_params);
            w.add("location", f.location, 0.0);
            w.add("steepness", f.steepness, 1.0);
            if (f.orientation == Orientation::falling) w.add_raw("orientation", "falling");
            out += w.str();
          },
      },
      expr.node().value);
}

}  // namespace

KernelExpr parse(std::string_view text, const ParseOptions& options) {
  return Parser(text, options).parse_all();
}

std::string render(const KernelExpr& expr) {
  std::string out;
  render_into(expr, true, out);
  return out;
}

std::string render_structure(const KernelExpr& expr) {
  std::string out;
  render_into(expr, false, out);
  return out;
}

}  // namespace kernelgen
